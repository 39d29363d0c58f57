#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harnack_lab/adjoint_solver.hpp"
#include "harnack_lab/config.hpp"
#include "harnack_lab/estimator.hpp"
#include "harnack_lab/presets.hpp"
#include "harnack_lab/tolerances.hpp"

namespace harnack {

struct CheckRecord {
    Margin margin;
    double runtime_ms = 0.0;
};

struct EstimateReport {
    std::string scenario_id;
    uint64_t config_hash = 0;
    std::string tolerance_version;
    std::vector<CheckRecord> records;

    // solver diagnostics
    double mass_drift = 0.0; // max relative drift of the integral of u
    double min_u = 0.0;
    double sup_bound = 0.0;
    double wall_ms = 0.0;
    // |margin(delta) - margin(delta/10)| per "check@tau", when requested
    std::map<std::string, double> delta_stability;

    bool all_passed() const {
        for (const auto& r : records)
            if (!r.margin.passed) return false;
        return true;
    }
};

/// Report plus the data needed for plot output.
struct ScenarioResult {
    ScenarioConfig cfg;
    EstimateReport report;
    Trajectory traj;
    double delta = 0.0;
};

inline ScalarField make_initial(const GridPtr& g, const ScenarioConfig& cfg) {
    const InitialSpec& s = cfg.initial;
    if (s.preset == "constant") return presets::constant(g, s.constant_value);
    if (s.preset == "neumann_cosine") return presets::neumann_cosine(g, s.a, s.b, s.kx, s.ky);
    if (s.preset == "gaussian") return presets::gaussian(g, s.t0, s.center);
    if (s.preset == "gaussian_mixture") {
        if (s.ages.empty() || s.ages.size() != s.weights.size() ||
            s.ages.size() != s.centers_x.size() ||
            (g->dim() == 2 && s.ages.size() != s.centers_y.size()))
            throw ValidationError(cfg.id + ": gaussian_mixture needs matching ages/weights/centers");
        std::vector<std::array<double, 2>> centers(s.ages.size());
        for (size_t k = 0; k < s.ages.size(); ++k)
            centers[k] = {s.centers_x[k], g->dim() == 2 ? s.centers_y[k] : 0.0};
        return presets::gaussian_mixture(g, s.ages, centers, s.weights);
    }
    if (s.preset == "log_quadratic") return presets::log_quadratic(g, s.c0, s.center, s.linear);
    if (s.preset == "bump") return presets::bump(g, s.center, s.radius);
    if (s.preset == "random_smooth") return presets::random_smooth(g, cfg.seed);
    throw ValidationError(cfg.id + ": unknown initial preset '" + s.preset + "'");
}

namespace detail {

inline double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

/// Deterministic family of normalized terminal bumps spread across the box.
inline std::vector<ScalarField> bump_family(const GridPtr& g, int count, double radius) {
    const BoxDomain& box = g->domain();
    std::vector<ScalarField> out;
    out.reserve(count);
    for (int b = 0; b < count; ++b) {
        const double frac = (b + 1.0) / (count + 1.0);
        std::array<double, 2> c{0.0, 0.0};
        for (int a = 0; a < g->dim(); ++a) {
            // 2D: walk a diagonal-ish sweep so the family is not collinear
            const double f = a == 0 ? frac : 1.0 - 0.5 * frac;
            c[a] = box.lower[a] + f * (box.upper[a] - box.lower[a]);
        }
        out.push_back(presets::bump(g, c, radius));
    }
    return out;
}

inline double default_bump_radius(const Grid& g) {
    double len = std::numeric_limits<double>::infinity();
    double h = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        len = std::min(len, g.domain().upper[a] - g.domain().lower[a]);
        h = std::max(h, g.h(a));
    }
    return std::max(0.2 * len, 4.0 * h);
}

/// Fold the worse (smaller-margin) record into acc.
inline void fold_min(std::optional<Margin>& acc, const Margin& m) {
    if (!acc || m.value < acc->value) acc = m;
}

} // namespace detail

inline ScenarioResult run_scenario(const ScenarioConfig& cfg,
                                   const ToleranceTable& table = ToleranceTable::defaults()) {
    validate_config(cfg);
    const double wall_start = detail::now_ms();
    ScenarioResult res;
    res.cfg = cfg;
    res.report.scenario_id = cfg.id;
    res.report.config_hash = cfg.config_hash;
    res.report.tolerance_version = table.version();

    const GridPtr grid = build_grid(cfg.domain, cfg.n_cells);
    const ScalarField u0 = make_initial(grid, cfg);
    const double delta = cfg.delta.value_or(1e-8 * u0.max());
    res.delta = delta;

    Trajectory traj = solve_heat(u0, cfg.solver, cfg.potential);
    traj.delta = delta;
    traj.datum_time = cfg.datum_time.value_or(cfg.solver.t0);
    res.traj = traj;

    const double A = certify_sup(traj);
    res.report.sup_bound = A;
    {
        const double m0 = integrate(traj.initial());
        double drift = 0.0;
        double min_u = std::numeric_limits<double>::infinity();
        for (const auto& f : traj.fields) {
            drift = std::max(drift, std::abs(integrate(f) - m0) / std::abs(m0));
            min_u = std::min(min_u, f.min());
        }
        res.report.mass_drift = drift;
        res.report.min_u = min_u;
    }

    double h = 0.0;
    for (int a = 0; a < grid->dim(); ++a) h = std::max(h, grid->h(a));
    auto tol_for = [&](const std::string& name) {
        auto it = cfg.tolerance_overrides.find(name);
        if (it != cfg.tolerance_overrides.end()) return it->second;
        return table.tolerance(name, h, cfg.solver.dt, delta);
    };

    const double bump_radius = cfg.bump_radius.value_or(detail::default_bump_radius(*grid));

    // Drift for the crossed/Hessian integral checks, shared by all checkpoints.
    std::optional<DriftSampler> drift;
    auto need_drift = [&] {
        for (const auto& c : cfg.checks)
            if (c == "crossed_term" || c == "hsz2_integral" || c == "k0k_integral") return true;
        return false;
    };
    if (need_drift()) drift = DriftSampler::from_trajectory(traj, delta);

    auto record = [&](const Margin& m, double t_start) {
        res.report.records.push_back({m, detail::now_ms() - t_start});
    };

    for (double checkpoint : cfg.solver.checkpoints) {
        EstimateParams params;
        params.tau = checkpoint - traj.datum_time;
        params.A = A;
        params.delta = delta;
        params.p = cfg.p;

        const int k_tau = traj.index_of(checkpoint);
        const std::vector<double> window(traj.times.begin(), traj.times.begin() + k_tau + 1);

        auto pointwise = [&](const std::string& name,
                             const EstimateParams& pr) -> std::optional<Margin> {
            if (name == "li_yau") return check_li_yau(traj, pr);
            if (name == "hamilton") return check_hamilton(traj, pr);
            if (name == "hsz_gradient") return check_hsz_gradient(traj, pr);
            if (name == "oscillation_gradient") return check_oscillation_gradient(traj, pr);
            if (name == "bernstein") return check_bernstein(traj, pr);
            if (name == "lp_smoothing") return check_lp_smoothing(traj, pr);
            if (name == "reversed") return check_reversed(traj, pr);
            if (name == "convexity_convex")
                return check_convexity_preservation(traj, pr, ConvexityMode::convex);
            if (name == "convexity_concave")
                return check_convexity_preservation(traj, pr, ConvexityMode::concave);
            if (name == "convexity_two_sided")
                return check_convexity_preservation(traj, pr, ConvexityMode::two_sided);
            if (name == "convexity_potential_a")
                return check_convexity_preservation(traj, pr, ConvexityMode::potential_a,
                                                   cfg.potential);
            if (name == "convexity_potential_b")
                return check_convexity_preservation(traj, pr, ConvexityMode::potential_b,
                                                   cfg.potential);
            if (name == "convexity_potential_c")
                return check_convexity_preservation(traj, pr, ConvexityMode::potential_c,
                                                   cfg.potential);
            return std::nullopt;
        };

        for (const std::string& name : cfg.checks) {
            const double t_start = detail::now_ms();
            // crossed_term fans out into identity + inequality tolerances
            if (name != "crossed_term") params.tolerance = tol_for(name);
            if (auto m = pointwise(name, params)) {
                record(*m, t_start);
                if (cfg.delta_stability) {
                    EstimateParams ps = params;
                    ps.delta = delta / 10.0;
                    if (auto ms = pointwise(name, ps))
                        res.report.delta_stability[name + "@" + std::to_string(params.tau)] =
                            std::abs(ms->value - m->value);
                }
                continue;
            }
            if (name == "crossed_term") {
                EstimateParams pi = params;
                pi.tolerance = tol_for("crossed_identity");
                EstimateParams pq = params;
                pq.tolerance = tol_for("crossed_inequality");
                std::optional<Margin> ident, ineq;
                for (const auto& rho_tau : detail::bump_family(grid, cfg.bumps, bump_radius)) {
                    const AdjointRun run = solve_backward_fp(rho_tau, *drift, window);
                    auto [mi, mq] = check_crossed_term(traj, run, pi);
                    const Margin mq2 =
                        Margin::make(mq.name, mq.value, mq.worst_node, mq.tau, pq.tolerance,
                                     mq.worst_value);
                    detail::fold_min(ident, mi);
                    detail::fold_min(ineq, mq2);
                }
                const double half = 0.5 * (detail::now_ms() - t_start);
                res.report.records.push_back({*ident, half});
                res.report.records.push_back({*ineq, half});
                continue;
            }
            if (name == "hsz2_integral") {
                std::optional<Margin> worst;
                for (const auto& rho_tau : detail::bump_family(grid, cfg.bumps, bump_radius)) {
                    const AdjointRun run = solve_backward_fp(rho_tau, *drift, window);
                    detail::fold_min(worst, check_integral_hessian_hsz2(traj, run, params));
                }
                record(*worst, t_start);
                continue;
            }
            if (name == "k0k_integral") {
                std::optional<Margin> worst;
                for (const auto& rho_tau : detail::bump_family(grid, cfg.bumps, bump_radius)) {
                    const AdjointRun run = solve_backward_fp(rho_tau, *drift, window);
                    detail::fold_min(worst, check_k0k(traj, run, params, cfg.potential));
                }
                record(*worst, t_start);
                continue;
            }
            if (name == "second_b_integral") {
                const double pp = std::isinf(cfg.p) ? cfg.p : std::max(cfg.p, 2.0);
                EstimateParams pb = params;
                pb.p = pp;
                const double q = std::isinf(pp) ? 1.0
                                 : pp == 2.0    ? kInfExponent
                                               : (pp / 2.0) / (pp / 2.0 - 1.0);
                std::optional<Margin> worst;
                for (ScalarField mu_tau : detail::bump_family(grid, cfg.bumps, bump_radius)) {
                    const double norm = lp_norm(mu_tau, q);
                    for (double& v : mu_tau.values) v /= norm;
                    const AdjointRun run =
                        solve_backward_fp(mu_tau, DriftSampler::zero(), window);
                    detail::fold_min(worst, check_integral_hessian_2ndb(traj, run, pb));
                }
                record(*worst, t_start);
                continue;
            }
            throw ValidationError(cfg.id + ": unknown estimate '" + name + "'");
        }
    }
    res.report.wall_ms = detail::now_ms() - wall_start;
    return res;
}

} // namespace harnack
