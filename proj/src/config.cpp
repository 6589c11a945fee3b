#include "hskdv/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "hskdv/sources.hpp"

namespace hskdv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

Interval to_interval(const std::string& key, const std::string& v) {
    const auto comma = v.find(',');
    if (comma == std::string::npos)
        throw ConfigError("config: key '" + key + "' expects 'a, b', got '" + v + "'");
    return {to_double(key, trim(v.substr(0, comma))), to_double(key, trim(v.substr(comma + 1)))};
}

std::string num(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = {
        {"L", [](auto& c, auto& k, auto& v) { c.L = to_double(k, v); }},
        {"N", [](auto& c, auto& k, auto& v) { c.N = int(to_int(k, v)); }},
        {"M", [](auto& c, auto& k, auto& v) { c.M = int(to_int(k, v)); }},
        {"T", [](auto& c, auto& k, auto& v) { c.T = to_double(k, v); }},
        {"theta", [](auto& c, auto& k, auto& v) { c.theta = to_double(k, v); }},
        {"omega", [](auto& c, auto& k, auto& v) { c.omega = to_interval(k, v); }},
        {"obs", [](auto& c, auto& k, auto& v) { c.obs = to_interval(k, v); }},
        {"omega0", [](auto& c, auto& k, auto& v) { c.omega0 = to_interval(k, v); }},
        {"s", [](auto& c, auto& k, auto& v) { c.s = to_double(k, v); }},
        {"eps", [](auto& c, auto& k, auto& v) { c.eps = to_double(k, v); }},
        {"cg_tol", [](auto& c, auto& k, auto& v) { c.cg_tol = to_double(k, v); }},
        {"cg_max", [](auto& c, auto& k, auto& v) { c.cg_max = int(to_int(k, v)); }},
        {"precond", [](auto& c, auto& k, auto& v) { c.precond = to_bool(k, v); }},
        {"R", [](auto& c, auto& k, auto& v) { c.R = to_double(k, v); }},
        {"picard_tol", [](auto& c, auto& k, auto& v) { c.picard_tol = to_double(k, v); }},
        {"picard_max", [](auto& c, auto& k, auto& v) { c.picard_max = int(to_int(k, v)); }},
        {"outer_max", [](auto& c, auto& k, auto& v) { c.outer_max = int(to_int(k, v)); }},
        {"outer_tol", [](auto& c, auto& k, auto& v) { c.outer_tol = to_double(k, v); }},
        {"target_ratio", [](auto& c, auto& k, auto& v) { c.target_ratio = to_double(k, v); }},
        {"amplitude", [](auto& c, auto& k, auto& v) { c.amplitude = to_double(k, v); }},
        {"f3_amplitude", [](auto& c, auto& k, auto& v) { c.f3_amplitude = to_double(k, v); }},
        {"source_rate", [](auto& c, auto& k, auto& v) { c.source_rate = to_double(k, v); }},
        {"xi1_center", [](auto& c, auto& k, auto& v) { c.xi1_center = to_double(k, v); }},
        {"xi2_center", [](auto& c, auto& k, auto& v) { c.xi2_center = to_double(k, v); }},
        {"f3_center", [](auto& c, auto& k, auto& v) { c.f3_center = to_double(k, v); }},
        {"source_width", [](auto& c, auto& k, auto& v) { c.source_width = to_double(k, v); }},
        {"tau", [](auto& c, auto& k, auto& v) { c.tau = to_double(k, v); }},
        {"trials", [](auto& c, auto& k, auto& v) { c.trials = int(to_int(k, v)); }},
        {"zero_control", [](auto& c, auto& k, auto& v) { c.zero_control = to_bool(k, v); }},
        {"ensemble", [](auto& c, auto& k, auto& v) { c.ensemble = int(to_int(k, v)); }},
        {"seed", [](auto& c, auto& k, auto& v) {
             const long long s = to_int(k, v);
             if (s < 0) throw ConfigError("config: key 'seed' must be non-negative");
             c.seed = std::uint64_t(s);
         }},
        {"sim_field", [](auto& c, auto&, auto& v) { c.sim_field = v; }},
        {"sim_center", [](auto& c, auto& k, auto& v) { c.sim_center = to_double(k, v); }},
        {"sim_width", [](auto& c, auto& k, auto& v) { c.sim_width = to_double(k, v); }},
        {"sim_source_amplitude", [](auto& c, auto& k, auto& v) { c.sim_source_amplitude = to_double(k, v); }},
        {"cascade_system", [](auto& c, auto&, auto& v) { c.cascade_system = v; }},
    };
    return m;
}

const char* const kRequired[] = {"L", "N", "M", "T", "omega", "obs", "omega0"};

void check_positive(const std::string& key, double v) {
    if (!(v > 0)) throw ConfigError("config: key '" + key + "' must be positive");
}

} // namespace

void validate_geometry(const ExperimentConfig& c) {
    check_positive("L", c.L);
    check_positive("T", c.T);
    if (c.N < 8) throw ConfigError("config: key 'N' must be >= 8");
    if (c.M < 2) throw ConfigError("config: key 'M' must be >= 2");
    const std::pair<const char*, Interval> iv[3] = {{"omega", c.omega}, {"obs", c.obs}, {"omega0", c.omega0}};
    for (auto [k, I] : iv) {
        if (!(I.a < I.b)) throw ConfigError(std::string("config: key '") + k + "' is empty or inverted");
        if (I.a < 0 || I.b > c.L)
            throw ConfigError(std::string("config: key '") + k + "' leaves the domain (0, L)");
    }
    if (!(c.omega0.a > 0 && c.omega0.b < c.L))
        throw ConfigError("config: key 'omega0' must sit strictly inside (0, L)");
    const double ia = std::max(c.omega.a, c.obs.a), ib = std::min(c.omega.b, c.obs.b);
    if (!(ia < ib))
        throw ConfigError("config: keys 'omega'/'obs' violate the hypothesis that O and omega intersect");
    if (!(ia < c.omega0.a && c.omega0.b < ib)) {
        std::ostringstream os;
        os << "config: key 'omega0' violates the hypothesis omega0 compactly inside O n omega = (" << ia << ", " << ib
           << ")";
        throw ConfigError(os.str());
    }
}

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides) {
    std::map<std::string, std::string> raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " ('" + line + "') is not 'key = value'");
        const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty() || v.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key or value");
        raw[k] = v;
    }
    for (const auto& [k, v] : overrides) raw[k] = v;
    for (const char* k : kRequired)
        if (!raw.count(k)) throw ConfigError(std::string("config: missing key '") + k + "'");

    ExperimentConfig c;
    const auto& set = setters();
    for (const auto& [k, v] : raw) {
        const auto it = set.find(k);
        if (it == set.end()) throw ConfigError("config: unknown key '" + k + "'");
        it->second(c, k, v);
    }
    validate_geometry(c);
    check_positive("s", c.s);
    check_positive("eps", c.eps);
    if (!(c.cg_tol > 0 && c.cg_tol < 1)) throw ConfigError("config: key 'cg_tol' must lie in (0,1)");
    check_positive("R", c.R);
    check_positive("picard_tol", c.picard_tol);
    check_positive("tau", c.tau);
    check_positive("source_width", c.source_width);
    if (c.source_rate < 0) throw ConfigError("config: key 'source_rate' must be non-negative");
    if (c.trials < 1) throw ConfigError("config: key 'trials' must be >= 1");
    if (c.ensemble < 1) throw ConfigError("config: key 'ensemble' must be >= 1");
    if (!(c.theta >= 0.5 && c.theta <= 1)) throw ConfigError("config: key 'theta' must lie in [0.5, 1]");
    if (c.cascade_system != "extended" && c.cascade_system != "adjoint")
        throw ConfigError("config: key 'cascade_system' must be 'extended' or 'adjoint'");
    return c;
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    auto iv = [](Interval I) { return num(I.a) + ", " + num(I.b); };
    os << "L = " << num(L) << "\n"
       << "N = " << N << "\n"
       << "M = " << M << "\n"
       << "T = " << num(T) << "\n"
       << "theta = " << num(theta) << "\n"
       << "omega = " << iv(omega) << "\n"
       << "obs = " << iv(obs) << "\n"
       << "omega0 = " << iv(omega0) << "\n"
       << "s = " << num(s) << "\n"
       << "eps = " << num(eps) << "\n"
       << "cg_tol = " << num(cg_tol) << "\n"
       << "cg_max = " << cg_max << "\n"
       << "precond = " << (precond ? "true" : "false") << "\n"
       << "R = " << num(R) << "\n"
       << "picard_tol = " << num(picard_tol) << "\n"
       << "picard_max = " << picard_max << "\n"
       << "outer_max = " << outer_max << "\n"
       << "outer_tol = " << num(outer_tol) << "\n"
       << "target_ratio = " << num(target_ratio) << "\n"
       << "amplitude = " << num(amplitude) << "\n"
       << "f3_amplitude = " << num(f3_amplitude) << "\n"
       << "source_rate = " << num(source_rate) << "\n"
       << "xi1_center = " << num(xi1_center) << "\n"
       << "xi2_center = " << num(xi2_center) << "\n"
       << "f3_center = " << num(f3_center) << "\n"
       << "source_width = " << num(source_width) << "\n"
       << "tau = " << num(tau) << "\n"
       << "trials = " << trials << "\n"
       << "zero_control = " << (zero_control ? "true" : "false") << "\n"
       << "ensemble = " << ensemble << "\n"
       << "seed = " << seed << "\n"
       << "sim_field = " << sim_field << "\n"
       << "sim_center = " << num(sim_center) << "\n"
       << "sim_width = " << num(sim_width) << "\n"
       << "sim_source_amplitude = " << num(sim_source_amplitude) << "\n"
       << "cascade_system = " << cascade_system << "\n";
    return os.str();
}

std::string ExperimentConfig::hash() const {
    // FNV-1a, 64 bit
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Problem make_problem(const ExperimentConfig& c) {
    return make_problem(c.L, c.N, c.T, c.M, c.omega, c.obs, c.omega0, c.theta);
}

WeightSet make_weights(const ExperimentConfig& c, const Problem& pb) {
    return build_weights({c.omega0.a, c.omega0.b, c.s, c.T, std::nullopt}, pb.grid, pb.tgrid);
}

HumConfig hum_config(const ExperimentConfig& c) { return {c.eps, c.cg_tol, c.cg_max, c.s, c.precond}; }
PicardConfig picard_config(const ExperimentConfig& c) { return {c.R, c.picard_tol, c.picard_max}; }
OuterConfig outer_config(const ExperimentConfig& c) { return {c.outer_max, c.target_ratio, c.outer_tol}; }

double source_rate(const ExperimentConfig& c, const WeightSet& w) {
    return c.source_rate > 0 ? c.source_rate : default_source_rate(c.s, w.beta_max, c.T);
}

} // namespace hskdv
