#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fbmavg {

/// splitmix64 finalizer; used to derive substream keys.
std::uint64_t mix64(std::uint64_t z);

/// FNV-1a hash of a byte string, for naming substreams.
std::uint64_t hash_name(std::string_view name);

/// Seeded random stream with named substream derivation.
///
/// A stream is identified by a 64-bit key. Substreams are derived from
/// (key, tag) so that Monte-Carlo roles ("driver", "gamma", sample index,
/// ...) replay identically regardless of execution order or thread count.
/// Gaussian variates use the Marsaglia polar method on top of mt19937_64;
/// both are fully specified, so sequences are bit-identical across
/// platforms for a fixed key.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    RngStream substream(std::uint64_t tag) const;
    RngStream substream(std::string_view name) const;

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01();

    /// Standard normal (exact polar method, not a CLT approximation).
    double gaussian();

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace fbmavg
