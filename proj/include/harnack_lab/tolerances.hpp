#pragma once

#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "harnack_lab/errors.hpp"

namespace harnack {

/// Per-check calibration constants. The pass/fail tolerance of a check is
/// C_est * (h + dt + delta); the constants below were fixed once from the
/// Gaussian and cosine refinement studies (see the calibrate subcommand) and
/// are versioned so reports can cite them.
class ToleranceTable {
  public:
    static ToleranceTable defaults() {
        ToleranceTable t;
        t.version_ = "calib-1";
        t.c_est_ = {
            {"li_yau", 3.5},
            {"hamilton", 2.0},
            {"hsz_gradient", 0.5},
            {"oscillation_gradient", 0.5},
            {"bernstein", 0.5},
            {"lp_smoothing", 0.5},
            {"reversed", 1.0},
            {"crossed_identity", 1.0},
            {"crossed_inequality", 0.5},
            {"hsz2_integral", 0.5},
            {"second_b_integral", 0.5},
            {"k0k_integral", 0.5},
            {"convexity_convex", 0.5},
            {"convexity_concave", 0.5},
            {"convexity_two_sided", 0.5},
            {"convexity_potential_a", 0.5},
            {"convexity_potential_b", 0.5},
            {"convexity_potential_c", 0.5},
        };
        return t;
    }

    const std::string& version() const { return version_; }
    void set_version(std::string v) { version_ = std::move(v); }

    bool has(const std::string& check) const { return c_est_.count(check) > 0; }

    double c_est(const std::string& check) const {
        auto it = c_est_.find(check);
        if (it == c_est_.end())
            throw ValidationError("tolerance table has no entry for check '" + check + "'");
        return it->second;
    }

    void set_c_est(const std::string& check, double c) { c_est_[check] = c; }

    /// tolerance = C_est * (h + dt + delta).
    double tolerance(const std::string& check, double h, double dt, double delta) const {
        return c_est(check) * (h + dt + delta);
    }

    void save(const std::string& path) const {
        nlohmann::json j;
        j["version"] = version_;
        j["c_est"] = c_est_;
        std::ofstream out(path);
        if (!out) throw IoError("cannot write tolerance table to " + path);
        out << j.dump(2) << "\n";
    }

    static ToleranceTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot read tolerance table from " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
        ToleranceTable t = defaults();
        if (j.contains("version")) t.version_ = j["version"].get<std::string>();
        if (j.contains("c_est"))
            for (auto& [k, v] : j["c_est"].items()) t.c_est_[k] = v.get<double>();
        return t;
    }

  private:
    std::string version_ = "calib-1";
    std::map<std::string, double> c_est_;
};

} // namespace harnack
