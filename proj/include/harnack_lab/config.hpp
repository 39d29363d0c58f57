#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "harnack_lab/errors.hpp"
#include "harnack_lab/grid.hpp"
#include "harnack_lab/heat_solver.hpp"

namespace harnack {

inline const std::vector<std::string>& valid_presets() {
    static const std::vector<std::string> v{"constant",         "neumann_cosine", "gaussian",
                                           "gaussian_mixture", "log_quadratic",  "bump",
                                           "random_smooth"};
    return v;
}

/// Check ids selectable in a scenario file. crossed_term yields two margin
/// rows (identity + inequality); the convexity_* ids map to modes.
inline const std::vector<std::string>& valid_checks() {
    static const std::vector<std::string> v{
        "li_yau",          "hamilton",          "hsz_gradient",
        "oscillation_gradient", "bernstein",    "lp_smoothing",
        "reversed",        "crossed_term",      "hsz2_integral",
        "second_b_integral", "k0k_integral",    "convexity_convex",
        "convexity_concave", "convexity_two_sided", "convexity_potential_a",
        "convexity_potential_b", "convexity_potential_c"};
    return v;
}

struct InitialSpec {
    std::string preset = "constant";
    double constant_value = 1.0;
    double a = 2.0, b = 1.0; // neumann_cosine offset/amplitude
    int kx = 1, ky = 0;
    double t0 = 1e-2;                      // gaussian age
    std::array<double, 2> center{0.0, 0.0};
    std::vector<double> ages, weights;     // gaussian_mixture
    std::vector<double> centers_x, centers_y;
    double c0 = 1.0;                       // log_quadratic concavity
    std::array<double, 2> linear{0.0, 0.0};
    double radius = 0.25;                  // bump half-width
};

struct ScenarioConfig {
    std::string id = "scenario";
    unsigned seed = 0;
    uint64_t config_hash = 0;

    BoxDomain domain = BoxDomain::interval(0.0, 1.0);
    std::array<int, 2> n_cells{64, 0};

    InitialSpec initial;
    std::optional<double> delta; // default: 1e-8 * max u(0)

    PotentialSpec potential;
    SolverParams solver;
    std::optional<double> datum_time; // default: solver.t0

    std::vector<std::string> checks;
    double p = 2.0;
    std::map<std::string, double> tolerance_overrides; // absolute, per check id
    int bumps = 8;                  // adjoint terminal-bump family cadence
    std::optional<double> bump_radius;
    bool delta_stability = false;   // also evaluate pointwise checks at delta/10
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct IniValue {
    std::string value;
    int line = 0;
};

/// Sections of key = value lines; '#' and ';' start comments.
struct IniFile {
    std::map<std::string, std::map<std::string, IniValue>> sections;
    std::string path;

    const IniValue* find(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }
};

inline IniFile parse_ini(const std::string& path, std::istream& in) {
    IniFile ini;
    ini.path = path;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(path + ":" + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ParseError(path + ":" + std::to_string(lineno) + ": empty section name");
            ini.sections[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ParseError(path + ":" + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ParseError(path + ":" + std::to_string(lineno) + ": key outside a section");
        ini.sections[section][key] = {trim(line.substr(eq + 1)), lineno};
    }
    return ini;
}

inline double to_double(const IniFile& ini, const std::string& sec, const std::string& key,
                        const IniValue& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v.value, &pos);
        if (pos != v.value.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ParseError(ini.path + ":" + std::to_string(v.line) + ": [" + sec + "] " + key +
                         ": not a number: '" + v.value + "'");
    }
}

inline std::vector<double> to_doubles(const IniFile& ini, const std::string& sec,
                                      const std::string& key, const IniValue& v) {
    std::vector<double> out;
    std::istringstream ss(v.value);
    std::string tok;
    while (ss >> tok) {
        IniValue one{tok, v.line};
        out.push_back(to_double(ini, sec, key, one));
    }
    return out;
}

inline double get_double(const IniFile& ini, const std::string& sec, const std::string& key,
                         double fallback) {
    const IniValue* v = ini.find(sec, key);
    return v ? to_double(ini, sec, key, *v) : fallback;
}

inline int get_int(const IniFile& ini, const std::string& sec, const std::string& key,
                   int fallback) {
    return static_cast<int>(get_double(ini, sec, key, fallback));
}

inline std::string get_string(const IniFile& ini, const std::string& sec, const std::string& key,
                              const std::string& fallback) {
    const IniValue* v = ini.find(sec, key);
    return v ? v->value : fallback;
}

inline bool get_bool(const IniFile& ini, const std::string& sec, const std::string& key,
                     bool fallback) {
    const IniValue* v = ini.find(sec, key);
    if (!v) return fallback;
    if (v->value == "true" || v->value == "1") return true;
    if (v->value == "false" || v->value == "0") return false;
    throw ParseError(ini.path + ":" + std::to_string(v->line) + ": [" + sec + "] " + key +
                     ": expected true/false");
}

inline std::array<double, 2> get_vec2(const IniFile& ini, const std::string& sec,
                                      const std::string& key, std::array<double, 2> fallback) {
    const IniValue* v = ini.find(sec, key);
    if (!v) return fallback;
    const auto xs = to_doubles(ini, sec, key, *v);
    if (xs.empty() || xs.size() > 2)
        throw ParseError(ini.path + ":" + std::to_string(v->line) + ": [" + sec + "] " + key +
                         ": expected 1 or 2 numbers");
    return {xs[0], xs.size() == 2 ? xs[1] : 0.0};
}

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string joined(const std::vector<std::string>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return s;
}

} // namespace detail

inline void validate_config(const ScenarioConfig& cfg) {
    cfg.domain.validate();
    for (int a = 0; a < cfg.domain.dim; ++a) {
        const int cap = cfg.domain.dim == 1 ? 1024 : 256;
        if (cfg.n_cells[a] < 8)
            throw ValidationError(cfg.id + ": n_cells < 8 on axis " + std::to_string(a));
        if (cfg.n_cells[a] > cap)
            throw ValidationError(cfg.id + ": resolution exceeds the desk-scale cap (" +
                                  std::to_string(cap + 1) + " nodes per axis)");
    }
    bool preset_ok = false;
    for (const auto& p : valid_presets()) preset_ok = preset_ok || p == cfg.initial.preset;
    if (!preset_ok)
        throw ValidationError(cfg.id + ": unknown initial preset '" + cfg.initial.preset +
                              "'; valid presets: " + detail::joined(valid_presets()));
    for (const auto& c : cfg.checks) {
        bool ok = false;
        for (const auto& v : valid_checks()) ok = ok || v == c;
        if (!ok)
            throw ValidationError(cfg.id + ": unknown estimate '" + c +
                                  "'; valid names: " + detail::joined(valid_checks()));
    }
    for (const auto& [name, tol] : cfg.tolerance_overrides) {
        bool ok = name == "crossed_identity" || name == "crossed_inequality";
        for (const auto& v : valid_checks()) ok = ok || v == name;
        if (!ok)
            throw ValidationError(cfg.id + ": tolerance override for unknown estimate '" + name +
                                  "'");
        if (tol < 0.0)
            throw ValidationError(cfg.id + ": negative tolerance override for '" + name + "'");
    }
    const double datum = cfg.datum_time.value_or(cfg.solver.t0);
    if (datum > cfg.solver.t0 + 1e-15)
        throw ValidationError(cfg.id + ": datum_time must not exceed the solver start time");
    for (double c : cfg.solver.checkpoints)
        if (c - datum <= 1e-12)
            throw ValidationError(cfg.id + ": estimates undefined at tau=0 (checkpoint " +
                                  std::to_string(c) + " coincides with the datum time)");
    cfg.solver.validate();
    if (cfg.solver.checkpoints.empty())
        throw ValidationError(cfg.id + ": at least one checkpoint is required");
    if (cfg.delta && !(*cfg.delta > 0.0))
        throw ValidationError(cfg.id + ": delta must be positive");
    if (!(cfg.p >= 1.0) && !std::isinf(cfg.p))
        throw ValidationError(cfg.id + ": p must be in [1, inf]");
    if (cfg.bumps < 1 || cfg.bumps > 64)
        throw ValidationError(cfg.id + ": bumps must be in [1, 64]");
}

inline ScenarioConfig parse_config_stream(const std::string& path, std::istream& in,
                                          const std::string& content_for_hash) {
    const detail::IniFile ini = detail::parse_ini(path, in);
    ScenarioConfig cfg;
    cfg.config_hash = detail::fnv1a(content_for_hash);
    cfg.id = detail::get_string(ini, "scenario", "id", "scenario");
    cfg.seed = static_cast<unsigned>(detail::get_int(ini, "scenario", "seed", 0));

    const int dim = detail::get_int(ini, "domain", "dim", 1);
    cfg.domain.dim = dim;
    cfg.domain.lower = detail::get_vec2(ini, "domain", "lower", {0.0, 0.0});
    cfg.domain.upper = detail::get_vec2(ini, "domain", "upper", {1.0, dim == 2 ? 1.0 : 0.0});
    cfg.domain.truncates_full_space =
        detail::get_bool(ini, "domain", "truncates_full_space", false);

    const int n = detail::get_int(ini, "grid", "n_cells", 64);
    cfg.n_cells = {detail::get_int(ini, "grid", "n_cells_x", n),
                   dim == 2 ? detail::get_int(ini, "grid", "n_cells_y", n) : 0};

    cfg.initial.preset = detail::get_string(ini, "initial", "preset", "constant");
    cfg.initial.constant_value = detail::get_double(ini, "initial", "value", 1.0);
    cfg.initial.a = detail::get_double(ini, "initial", "a", 2.0);
    cfg.initial.b = detail::get_double(ini, "initial", "b", 1.0);
    cfg.initial.kx = detail::get_int(ini, "initial", "kx", detail::get_int(ini, "initial", "k", 1));
    cfg.initial.ky = detail::get_int(ini, "initial", "ky", 0);
    cfg.initial.t0 = detail::get_double(ini, "initial", "t0", 1e-2);
    cfg.initial.center = detail::get_vec2(ini, "initial", "center", {0.0, 0.0});
    cfg.initial.c0 = detail::get_double(ini, "initial", "c0", 1.0);
    cfg.initial.linear = detail::get_vec2(ini, "initial", "linear", {0.0, 0.0});
    cfg.initial.radius = detail::get_double(ini, "initial", "radius", 0.25);
    if (const auto* v = ini.find("initial", "ages"))
        cfg.initial.ages = detail::to_doubles(ini, "initial", "ages", *v);
    if (const auto* v = ini.find("initial", "weights"))
        cfg.initial.weights = detail::to_doubles(ini, "initial", "weights", *v);
    if (const auto* v = ini.find("initial", "centers_x"))
        cfg.initial.centers_x = detail::to_doubles(ini, "initial", "centers_x", *v);
    if (const auto* v = ini.find("initial", "centers_y"))
        cfg.initial.centers_y = detail::to_doubles(ini, "initial", "centers_y", *v);

    if (const auto* v = ini.find("estimates", "delta"))
        cfg.delta = detail::to_double(ini, "estimates", "delta", *v);

    const std::string pot_kind = detail::get_string(ini, "potential", "kind", "none");
    if (pot_kind == "quadratic") {
        cfg.potential.kind = PotentialSpec::Kind::quadratic;
        cfg.potential.amplitude = detail::get_double(ini, "potential", "amplitude", 0.0);
        cfg.potential.center = detail::get_vec2(ini, "potential", "center", {0.0, 0.0});
        if (const auto* v = ini.find("potential", "cf1_rate"))
            cfg.potential.declared_cf1_rate = detail::to_double(ini, "potential", "cf1_rate", *v);
        if (const auto* v = ini.find("potential", "cf2_rate"))
            cfg.potential.declared_cf2_rate = detail::to_double(ini, "potential", "cf2_rate", *v);
        if (const auto* v = ini.find("potential", "cf3_rate"))
            cfg.potential.declared_cf3_rate = detail::to_double(ini, "potential", "cf3_rate", *v);
    } else if (pot_kind != "none") {
        throw ValidationError(path + ": unknown potential kind '" + pot_kind +
                              "'; valid kinds: none, quadratic");
    }

    cfg.solver.dt = detail::get_double(ini, "solver", "dt", 1e-3);
    cfg.solver.t0 = detail::get_double(ini, "solver", "t0", 0.0);
    cfg.solver.t_end = detail::get_double(ini, "solver", "t_end", 0.1);
    if (const auto* v = ini.find("solver", "checkpoints"))
        cfg.solver.checkpoints = detail::to_doubles(ini, "solver", "checkpoints", *v);
    if (const auto* v = ini.find("solver", "datum_time"))
        cfg.datum_time = detail::to_double(ini, "solver", "datum_time", *v);

    if (const auto* v = ini.find("estimates", "checks")) {
        std::istringstream ss(v->value);
        std::string tok;
        while (ss >> tok) cfg.checks.push_back(tok);
    }
    cfg.p = detail::get_string(ini, "estimates", "p", "2") == "inf"
                ? std::numeric_limits<double>::infinity()
                : detail::get_double(ini, "estimates", "p", 2.0);
    cfg.bumps = detail::get_int(ini, "estimates", "bumps", 8);
    if (const auto* v = ini.find("estimates", "bump_radius"))
        cfg.bump_radius = detail::to_double(ini, "estimates", "bump_radius", *v);
    cfg.delta_stability = detail::get_bool(ini, "estimates", "delta_stability", false);
    if (auto s = ini.sections.find("estimates"); s != ini.sections.end())
        for (const auto& [key, val] : s->second)
            if (key.rfind("tolerance.", 0) == 0)
                cfg.tolerance_overrides[key.substr(10)] =
                    detail::to_double(ini, "estimates", key, val);

    validate_config(cfg);
    return cfg;
}

inline ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::istringstream stream(buf.str());
    return parse_config_stream(path, stream, buf.str());
}

} // namespace harnack
