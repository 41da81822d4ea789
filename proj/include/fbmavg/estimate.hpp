#pragma once

namespace fbmavg {

/// A Monte-Carlo point estimate with its standard error.
struct Estimate {
    double value;
    double std_error;
};

} // namespace fbmavg
