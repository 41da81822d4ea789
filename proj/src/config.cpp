#include "fbmavg/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fbmavg/rng.hpp"
#include "fbmavg/stats.hpp"

namespace fbmavg {

const char* experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::ap_diagram: return "ap-diagram";
    case ExperimentKind::rate_fit: return "rate-fit";
    case ExperimentKind::eps_sweep: return "eps-sweep";
    case ExperimentKind::brownian_compare: return "brownian-compare";
    case ExperimentKind::variation_diag: return "variation-diag";
    }
    return "?";
}

ExperimentKind experiment_kind_from_name(std::string_view name) {
    for (ExperimentKind k :
         {ExperimentKind::simulate, ExperimentKind::ap_diagram, ExperimentKind::rate_fit,
          ExperimentKind::eps_sweep, ExperimentKind::brownian_compare,
          ExperimentKind::variation_diag})
        if (name == experiment_kind_name(k))
            return k;
    throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string s) {
    const auto is_space = [](unsigned char c) { return c == ' ' || c == '\t'; };
    while (!s.empty() && is_space(s.front()))
        s.erase(s.begin());
    while (!s.empty() && is_space(s.back()))
        s.pop_back();
    return s;
}

struct Entry {
    std::string value;
    int line;
};

// section -> key -> entry; strict: duplicate keys are rejected.
using Sections = std::map<std::string, std::map<std::string, Entry>>;

Sections parse_sections(std::istream& in, const std::string& path) {
    Sections sections;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(path + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        if (section.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": key outside of any [section]");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key or value");
        auto [it, inserted] = sections[section].try_emplace(key, Entry{value, lineno});
        (void)it;
        if (!inserted)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in [" + section + "]");
    }
    return sections;
}

class Reader {
public:
    Reader(Sections sections, std::string path)
        : sections_(std::move(sections)), path_(std::move(path)) {}

    std::optional<std::string> take(const std::string& section, const std::string& key) {
        auto sit = sections_.find(section);
        if (sit == sections_.end())
            return std::nullopt;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end())
            return std::nullopt;
        std::string value = kit->second.value;
        sit->second.erase(kit);
        return value;
    }

    double take_real(const std::string& section, const std::string& key, double fallback) {
        auto v = take(section, key);
        return v ? parse_real(section, key, *v) : fallback;
    }

    long long take_int(const std::string& section, const std::string& key, long long fallback) {
        auto v = take(section, key);
        return v ? parse_int(section, key, *v) : fallback;
    }

    std::vector<std::string> split_list(const std::string& value) {
        std::vector<std::string> items;
        std::string cur;
        for (char c : value) {
            if (c == ',') {
                items.push_back(trim(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        items.push_back(trim(cur));
        return items;
    }

    double parse_real(const std::string& section, const std::string& key,
                      const std::string& value) {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size())
                throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(path_ + ": [" + section + "] " + key + ": '" + value +
                              "' is not a real number");
        }
    }

    long long parse_int(const std::string& section, const std::string& key,
                        const std::string& value) {
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size())
            throw ConfigError(path_ + ": [" + section + "] " + key + ": '" + value +
                              "' is not an integer");
        return v;
    }

    std::uint64_t parse_u64(const std::string& section, const std::string& key,
                            const std::string& value) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size())
            throw ConfigError(path_ + ": [" + section + "] " + key + ": '" + value +
                              "' is not a 64-bit unsigned integer");
        return v;
    }

    void reject_unknown() const {
        static const std::map<std::string, bool> known_sections{
            {"system", true}, {"grid", true}, {"experiment", true}, {"mc", true},
            {"output", true}};
        for (const auto& [section, entries] : sections_) {
            if (!known_sections.count(section))
                throw ConfigError(path_ + ": unknown section [" + section + "]");
            if (!entries.empty()) {
                const auto& [key, entry] = *entries.begin();
                throw ConfigError(path_ + ":" + std::to_string(entry.line) + ": unknown key '" +
                                  key + "' in [" + section + "]");
            }
        }
    }

    const std::string& path() const { return path_; }

private:
    Sections sections_;
    std::string path_;
};

} // namespace

SystemSpec ExperimentConfig::make_system(double epsilon) const {
    if (!g)
        throw ConfigError("config has no coefficient expression g");
    return SystemSpec(*g, HurstIndex(h), OuParams{epsilon, m0}, x0, driver);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("config file '" + path + "' does not exist or is unreadable");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    std::istringstream stream(text);
    Reader reader(parse_sections(stream, path), path);
    ExperimentConfig cfg;
    cfg.config_hash = hash_name(text);

    // [system]
    if (auto g = reader.take("system", "g")) {
        cfg.g_text = *g;
        try {
            cfg.g = CoeffExpr::parse(*g);
        } catch (const ParseError& e) {
            throw ConfigError(path + ": [system] g: " + e.what());
        }
    } else {
        throw ConfigError(path + ": [system] g is required");
    }
    if (auto d = reader.take("system", "driver")) {
        if (*d == "fractional")
            cfg.driver = Driver::fractional;
        else if (*d == "brownian")
            cfg.driver = Driver::brownian;
        else
            throw ConfigError(path + ": [system] driver must be 'fractional' or 'brownian', got '" +
                              *d + "'");
    }
    cfg.h = reader.take_real("system", "h", cfg.driver == Driver::brownian ? 0.5 : 0.75);
    if (cfg.driver == Driver::fractional && !(cfg.h > 0.5))
        throw ConfigError(path + ": [system] h: h must be > 0.5 for the fractional driver");
    if (!(cfg.h >= 0.5 && cfg.h < 1.0))
        throw ConfigError(path + ": [system] h: require 0.5 <= h < 1");
    if (auto eps = reader.take("system", "epsilon")) {
        if (reader.take("system", "epsilon_list"))
            throw ConfigError(path + ": [system] give either epsilon or epsilon_list, not both");
        cfg.epsilons = {reader.parse_real("system", "epsilon", *eps)};
    } else if (auto list = reader.take("system", "epsilon_list")) {
        cfg.epsilons.clear();
        for (const auto& item : reader.split_list(*list))
            cfg.epsilons.push_back(reader.parse_real("system", "epsilon_list", item));
        if (cfg.epsilons.empty())
            throw ConfigError(path + ": [system] epsilon_list must not be empty");
    }
    for (double e : cfg.epsilons)
        if (!(e == 0.0 || (e > 0.0 && e <= 1.0)))
            throw ConfigError(path +
                              ": [system] epsilon: values must lie in (0, 1] or be 0 (limiting)");
    cfg.x0 = reader.take_real("system", "x0", cfg.x0);
    cfg.m0 = reader.take_real("system", "m0", cfg.m0);

    // [grid]
    cfg.horizon = reader.take_real("grid", "T", cfg.horizon);
    if (!(cfg.horizon > 0.0))
        throw ConfigError(path + ": [grid] T must be positive");
    if (auto n = reader.take("grid", "N")) {
        if (reader.take("grid", "N_list"))
            throw ConfigError(path + ": [grid] give either N or N_list, not both");
        cfg.step_counts = {static_cast<int>(reader.parse_int("grid", "N", *n))};
    } else if (auto list = reader.take("grid", "N_list")) {
        cfg.step_counts.clear();
        for (const auto& item : reader.split_list(*list))
            cfg.step_counts.push_back(static_cast<int>(reader.parse_int("grid", "N_list", item)));
        if (cfg.step_counts.empty())
            throw ConfigError(path + ": [grid] N_list must not be empty");
    }
    for (int n : cfg.step_counts)
        if (n < 1)
            throw ConfigError(path + ": [grid] N: step counts must be >= 1");

    // [experiment]
    if (auto kind = reader.take("experiment", "kind")) {
        try {
            cfg.kind = experiment_kind_from_name(*kind);
        } catch (const ConfigError& e) {
            throw ConfigError(path + ": [experiment] kind: " + e.what());
        }
    }
    if (auto phi = reader.take("experiment", "phi")) {
        cfg.phi = *phi;
        TestFunction::from_name(cfg.phi); // validates the name
    }
    if (auto eta = reader.take("experiment", "eta")) {
        if (reader.take("experiment", "eta_list"))
            throw ConfigError(path + ": [experiment] give either eta or eta_list, not both");
        cfg.etas = {reader.parse_real("experiment", "eta", *eta)};
    } else if (auto list = reader.take("experiment", "eta_list")) {
        cfg.etas.clear();
        for (const auto& item : reader.split_list(*list))
            cfg.etas.push_back(reader.parse_real("experiment", "eta_list", item));
    }
    for (double e : cfg.etas)
        if (!(e > 0.0))
            throw ConfigError(path + ": [experiment] eta: thresholds must be positive");
    cfg.quad_order = static_cast<int>(reader.take_int("experiment", "quad_order", cfg.quad_order));
    if (cfg.quad_order < 2)
        throw ConfigError(path + ": [experiment] quad_order must be >= 2");
    cfg.fd_step = reader.take_real("experiment", "fd_step", cfg.fd_step);
    if (!(cfg.fd_step > 0.0))
        throw ConfigError(path + ": [experiment] fd_step must be positive");
    cfg.paths = static_cast<int>(reader.take_int("experiment", "paths", cfg.paths));
    if (cfg.paths < 1)
        throw ConfigError(path + ": [experiment] paths must be >= 1");

    // [mc]
    cfg.outer = static_cast<int>(reader.take_int("mc", "outer", cfg.outer));
    cfg.inner = static_cast<int>(reader.take_int("mc", "inner", cfg.inner));
    if (cfg.outer < 2)
        throw ConfigError(path + ": [mc] outer must be >= 2");
    if (cfg.inner < 1)
        throw ConfigError(path + ": [mc] inner must be >= 1");
    if (auto seed = reader.take("mc", "base_seed"))
        cfg.base_seed = reader.parse_u64("mc", "base_seed", *seed);

    // [output]
    if (auto dir = reader.take("output", "dir"))
        cfg.out_dir = *dir;

    reader.reject_unknown();

    // cross-field checks
    if (cfg.driver == Driver::brownian && cfg.h != 0.5)
        throw ConfigError(path + ": [system] h: the brownian driver fixes h = 0.5");

    return cfg;
}

} // namespace fbmavg
