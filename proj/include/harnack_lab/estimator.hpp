#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "harnack_lab/adjoint_solver.hpp"
#include "harnack_lab/calculus.hpp"
#include "harnack_lab/fields.hpp"
#include "harnack_lab/heat_solver.hpp"

namespace harnack {

/// Signed slack (rhs - lhs) of one certified inequality. Nonnegative up to
/// the tolerance means the estimate holds.
struct Margin {
    std::string name;
    double value = 0.0;
    int worst_node = -1;
    double worst_value = 0.0; // the bounded quantity at the worst location
    double tau = 0.0;
    double tolerance = 0.0;
    bool passed = false;

    static Margin make(std::string name, double value, int node, double tau, double tol,
                       double worst_value = 0.0) {
        Margin m;
        m.name = std::move(name);
        m.value = value;
        m.worst_node = node;
        m.worst_value = worst_value;
        m.tau = tau;
        m.tolerance = tol;
        m.passed = value >= -tol;
        return m;
    }
};

struct EstimateParams {
    double tau = 0.0;    // elapsed time since the trajectory's initial datum
    double A = 0.0;      // certified sup bound of u over the trajectory
    double delta = 0.0;  // Hopf-Cole shift
    double p = 2.0;      // exponent for L^p checks
    double tolerance = 0.0;
};

namespace detail {

struct MinLoc {
    double value = std::numeric_limits<double>::infinity();
    int node = -1;
};

/// Lowest node index wins ties (determinism).
inline MinLoc min_loc(const std::vector<double>& v) {
    MinLoc m;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (v[i] < m.value) {
            m.value = v[i];
            m.node = i;
        }
    return m;
}

inline MinLoc max_loc(const std::vector<double>& v) {
    MinLoc m;
    m.value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (v[i] > m.value) {
            m.value = v[i];
            m.node = i;
        }
    return m;
}

inline const ScalarField& field_at_tau(const Trajectory& traj, double tau) {
    return traj.fields[traj.index_of(traj.datum_time + tau)];
}

inline double elapsed(const Trajectory& traj, int k) { return traj.times[k] - traj.datum_time; }

/// Trapezoid in time over stored steps up to (and including) index k_end.
inline double time_trapezoid(const std::vector<double>& times, const std::vector<double>& vals,
                             int k_end) {
    double s = 0.0;
    for (int k = 1; k <= k_end; ++k)
        s += 0.5 * (times[k] - times[k - 1]) * (vals[k] + vals[k - 1]);
    return s;
}

inline void require_sup_certified(const Trajectory& traj, double A) {
    for (const auto& f : traj.fields)
        if (f.max() > A * (1.0 + 1e-12))
            throw SupBoundViolated("stored u exceeds the declared sup bound A");
}

inline void require_matched_run(const Trajectory& traj, const AdjointRun& run,
                                const EstimateParams& params) {
    if (run.drift_source != "trajectory" ||
        std::abs(run.drift_delta - params.delta) > 1e-14 * std::max(1.0, params.delta))
        throw DriftMismatch("adjoint run drift was not built from this trajectory/delta");
    const int m = run.rho.steps();
    if (m < 2 || m > traj.steps())
        throw DriftMismatch("adjoint run and trajectory use different time grids");
    for (int k = 0; k < m; ++k)
        if (std::abs(run.rho.times[k] - traj.times[k]) > 1e-9)
            throw DriftMismatch("adjoint run and trajectory use different time grids");
    if (std::abs(run.rho.times[m - 1] - (traj.datum_time + params.tau)) > 1e-9)
        throw DriftMismatch("adjoint run does not terminate at the requested checkpoint");
    const double mass = integrate(run.terminal);
    if (std::abs(mass - 1.0) > 1e-8)
        throw MassNotUnit("adjoint terminal mass = " + std::to_string(mass));
}

} // namespace detail

/// Max of u over every stored field (initial included); certifies 0 < u <= A.
inline double certify_sup(const Trajectory& traj) {
    double a = -std::numeric_limits<double>::infinity();
    for (const auto& f : traj.fields) a = std::max(a, f.max());
    return a;
}

/// Li-Yau: Delta log u(tau) >= -n/(2 tau).
inline Margin check_li_yau(const Trajectory& traj, const EstimateParams& params) {
    const ScalarField& u = detail::field_at_tau(traj, params.tau);
    const ScalarField lap = laplacian(hopf_cole(u, params.delta));
    const double n = u.grid->dim();
    std::vector<double> m(lap.values);
    for (double& x : m) x += n / (2.0 * params.tau);
    const auto worst = detail::min_loc(m);
    return Margin::make("li_yau", worst.value, worst.node, params.tau, params.tolerance,
                        worst.value - n / (2.0 * params.tau));
}

/// Hamilton matrix estimate: D^2 log u(tau) >= -I/(2 tau).
inline Margin check_hamilton(const Trajectory& traj, const EstimateParams& params) {
    const ScalarField& u = detail::field_at_tau(traj, params.tau);
    const auto [lmin, lmax] = min_max_eigenvalue(hessian(hopf_cole(u, params.delta)));
    std::vector<double> m(lmin.values);
    for (double& x : m) x += 1.0 / (2.0 * params.tau);
    const auto worst = detail::min_loc(m);
    return Margin::make("hamilton", worst.value, worst.node, params.tau, params.tolerance,
                        worst.value - 1.0 / (2.0 * params.tau));
}

/// Hamilton-Souplet-Zhang gradient bound in its delta form:
/// |D log(u+delta)|^2 <= (1/tau) log((A+delta)/(u+delta)).
inline Margin check_hsz_gradient(const Trajectory& traj, const EstimateParams& params) {
    detail::require_sup_certified(traj, params.A);
    const ScalarField& u = detail::field_at_tau(traj, params.tau);
    const VectorField dv = gradient(hopf_cole(u, params.delta));
    std::vector<double> m(u.size());
    for (int id = 0; id < u.size(); ++id)
        m[id] = std::log((params.A + params.delta) / (u.values[id] + params.delta)) / params.tau -
                dv.norm_sq(id);
    const auto worst = detail::min_loc(m);
    return Margin::make("hsz_gradient", worst.value, worst.node, params.tau, params.tolerance,
                        dv.norm_sq(worst.node));
}

/// Oscillation gradient bound: |Du(tau)|^2 <= (sup u(0)^2 - u(tau)^2)/(2 tau).
inline Margin check_oscillation_gradient(const Trajectory& traj, const EstimateParams& params) {
    const ScalarField& u0 = traj.initial();
    const ScalarField& u = detail::field_at_tau(traj, params.tau);
    double sup0_sq = 0.0;
    for (double v : u0.values) sup0_sq = std::max(sup0_sq, v * v);
    const VectorField du = gradient(u);
    std::vector<double> m(u.size());
    for (int id = 0; id < u.size(); ++id)
        m[id] = (sup0_sq - u.values[id] * u.values[id]) / (2.0 * params.tau) - du.norm_sq(id);
    const auto worst = detail::min_loc(m);
    return Margin::make("oscillation_gradient", worst.value, worst.node, params.tau,
                        params.tolerance, du.norm_sq(worst.node));
}

/// Bernstein field bound: max_x G_{1/2}(tau) <= (1/2) sup u(0)^2, with
/// G_{1/2} = t|Du|^2 + u^2/2.
inline Margin check_bernstein(const Trajectory& traj, const EstimateParams& params) {
    const ScalarField& u0 = traj.initial();
    const ScalarField& u = detail::field_at_tau(traj, params.tau);
    double sup0_sq = 0.0;
    for (double v : u0.values) sup0_sq = std::max(sup0_sq, v * v);
    const VectorField du = gradient(u);
    std::vector<double> g(u.size());
    for (int id = 0; id < u.size(); ++id)
        g[id] = params.tau * du.norm_sq(id) + 0.5 * u.values[id] * u.values[id];
    const auto worst = detail::max_loc(g);
    return Margin::make("bernstein", 0.5 * sup0_sq - worst.value, worst.node, params.tau,
                        params.tolerance, worst.value);
}

/// L^p gradient smoothing: tau ||Du(tau)||_p^2 <= (1/2) ||u(0)||_p^2.
inline Margin check_lp_smoothing(const Trajectory& traj, const EstimateParams& params) {
    if (!(params.p >= 2.0) && !std::isinf(params.p))
        throw InvalidExponent("check_lp_smoothing: p must be in [2, inf]");
    const ScalarField& u0 = traj.initial();
    const ScalarField& u = detail::field_at_tau(traj, params.tau);
    const double lhs = params.tau * std::pow(lp_norm(gradient(u), params.p), 2);
    const double rhs = 0.5 * std::pow(lp_norm(u0, params.p), 2);
    return Margin::make("lp_smoothing", rhs - lhs, -1, params.tau, params.tolerance, lhs);
}

/// Reversed (semi-log-superharmonic) estimate:
/// Delta log u + 2|D log u|^2 <= (1/tau)(n + (7/2) log(A/u)), folded with the
/// intermediate bound Delta log u <= (3/(2 tau)) log(A/u) + n/tau.
inline Margin check_reversed(const Trajectory& traj, const EstimateParams& params) {
    detail::require_sup_certified(traj, params.A);
    const ScalarField& u = detail::field_at_tau(traj, params.tau);
    const ScalarField v = hopf_cole(u, params.delta);
    const ScalarField lap = laplacian(v);
    const VectorField dv = gradient(v);
    const double n = u.grid->dim();
    std::vector<double> m(u.size());
    for (int id = 0; id < u.size(); ++id) {
        const double log_ratio =
            std::log((params.A + params.delta) / (u.values[id] + params.delta));
        const double full =
            (n + 3.5 * log_ratio) / params.tau - lap.values[id] - 2.0 * dv.norm_sq(id);
        const double intermediate = 1.5 * log_ratio / params.tau + n / params.tau - lap.values[id];
        m[id] = std::min(full, intermediate);
    }
    const auto worst = detail::min_loc(m);
    return Margin::make("reversed", worst.value, worst.node, params.tau, params.tolerance,
                        lap.values[worst.node] + 2.0 * dv.norm_sq(worst.node));
}

/// Crossed-term duality chain: the identity
///   integral integral |Dv|^2 rho + int v(tau) rho_tau - int v(start) rho(start) = 0
/// (exact on full-space truncations up to O(h+dt)), and the bound
///   integral integral |Dv|^2 rho <= int log((A+delta)/(u(tau)+delta)) rho_tau.
/// Returned pair: (identity margin = -|residual|, inequality margin).
inline std::pair<Margin, Margin> check_crossed_term(const Trajectory& traj, const AdjointRun& run,
                                                    const EstimateParams& params) {
    detail::require_sup_certified(traj, params.A);
    detail::require_matched_run(traj, run, params);
    const int k_tau = traj.index_of(traj.datum_time + params.tau);
    std::vector<double> slice(k_tau + 1, 0.0);
    for (int k = 0; k <= k_tau; ++k) {
        const VectorField dv = gradient(hopf_cole(traj.fields[k], params.delta));
        double s = 0.0;
        const GridPtr& g = traj.grid();
        for (int id = 0; id < g->size(); ++id)
            s += g->weight(id) * dv.norm_sq(id) * run.rho.fields[k].values[id];
        slice[k] = s;
    }
    const double cross = detail::time_trapezoid(traj.times, slice, k_tau);

    const ScalarField v_tau = hopf_cole(traj.fields[k_tau], params.delta);
    const ScalarField v_0 = hopf_cole(traj.fields[0], params.delta);
    double v_tau_rho = 0.0, v_0_rho = 0.0, log_ratio_rho = 0.0;
    const GridPtr& g = traj.grid();
    for (int id = 0; id < g->size(); ++id) {
        v_tau_rho += g->weight(id) * v_tau.values[id] * run.terminal.values[id];
        v_0_rho += g->weight(id) * v_0.values[id] * run.rho.fields[0].values[id];
        log_ratio_rho += g->weight(id) *
                         std::log((params.A + params.delta) /
                                  (traj.fields[k_tau].values[id] + params.delta)) *
                         run.terminal.values[id];
    }
    const double residual = std::abs(cross + v_tau_rho - v_0_rho);
    return {Margin::make("crossed_identity", -residual, -1, params.tau, params.tolerance,
                         residual),
            Margin::make("crossed_inequality", log_ratio_rho - cross, -1, params.tau,
                         params.tolerance, cross)};
}

/// Integral Hessian bound along the drifted adjoint run:
/// int (log((A+d)/(u(tau)+d)) - tau |Dv(tau)|^2) rho_tau >= iint 2t |D^2 v|^2 rho.
inline Margin check_integral_hessian_hsz2(const Trajectory& traj, const AdjointRun& run,
                                          const EstimateParams& params) {
    detail::require_sup_certified(traj, params.A);
    detail::require_matched_run(traj, run, params);
    const int k_tau = traj.index_of(traj.datum_time + params.tau);
    const GridPtr& g = traj.grid();
    std::vector<double> slice(k_tau + 1, 0.0);
    for (int k = 0; k <= k_tau; ++k) {
        const SymMatrixField d2v = hessian(hopf_cole(traj.fields[k], params.delta));
        double s = 0.0;
        for (int id = 0; id < g->size(); ++id)
            s += g->weight(id) * d2v.frobenius_sq(id) * run.rho.fields[k].values[id];
        slice[k] = 2.0 * detail::elapsed(traj, k) * s;
    }
    const double hess_term = detail::time_trapezoid(traj.times, slice, k_tau);

    const ScalarField& u_tau = traj.fields[k_tau];
    const VectorField dv_tau = gradient(hopf_cole(u_tau, params.delta));
    double data_term = 0.0;
    for (int id = 0; id < g->size(); ++id)
        data_term += g->weight(id) *
                     (std::log((params.A + params.delta) / (u_tau.values[id] + params.delta)) -
                      params.tau * dv_tau.norm_sq(id)) *
                     run.terminal.values[id];
    return Margin::make("hsz2_integral", data_term - hess_term, -1, params.tau,
                        params.tolerance, hess_term);
}

/// Drift-free integral Hessian bound:
/// iint 2t |D^2 u|^2 mu <= (1/2) ||u(0)||_p^2, mu the backward heat solution
/// from mu_tau with ||mu_tau||_{(p/2)'} = 1.
inline Margin check_integral_hessian_2ndb(const Trajectory& traj, const AdjointRun& mu_run,
                                          const EstimateParams& params) {
    if (!mu_run.drift_zero)
        throw DriftNotZero("check_integral_hessian_2ndb requires a drift-free backward run");
    if (!(params.p >= 2.0) && !std::isinf(params.p))
        throw InvalidExponent("check_integral_hessian_2ndb: p must be in [2, inf]");
    const double q = std::isinf(params.p) ? 1.0
                     : params.p == 2.0    ? kInfExponent
                                          : (params.p / 2.0) / (params.p / 2.0 - 1.0);
    const double norm = lp_norm(mu_run.terminal, q);
    if (std::abs(norm - 1.0) > 1e-8)
        throw MassNotUnit("terminal datum is not normalized in L^{(p/2)'}");
    const int k_tau = traj.index_of(traj.datum_time + params.tau);
    if (mu_run.rho.steps() != k_tau + 1)
        throw DriftMismatch("backward run does not cover the datum-to-checkpoint window");
    for (int k = 0; k <= k_tau; ++k)
        if (std::abs(mu_run.rho.times[k] - traj.times[k]) > 1e-9)
            throw DriftMismatch("backward run and trajectory use different time grids");
    const GridPtr& g = traj.grid();
    std::vector<double> slice(k_tau + 1, 0.0);
    for (int k = 0; k <= k_tau; ++k) {
        const SymMatrixField d2u = hessian(traj.fields[k]);
        double s = 0.0;
        for (int id = 0; id < g->size(); ++id)
            s += g->weight(id) * d2u.frobenius_sq(id) * mu_run.rho.fields[k].values[id];
        slice[k] = 2.0 * detail::elapsed(traj, k) * s;
    }
    const double hess_term = detail::time_trapezoid(traj.times, slice, k_tau);
    const double rhs = 0.5 * std::pow(lp_norm(traj.initial(), params.p), 2);
    return Margin::make("second_b_integral", rhs - hess_term, -1, params.tau, params.tolerance,
                        hess_term);
}

enum class ConvexityMode { convex, concave, two_sided, potential_a, potential_b, potential_c };

inline std::string to_string(ConvexityMode m) {
    switch (m) {
        case ConvexityMode::convex: return "convexity_convex";
        case ConvexityMode::concave: return "convexity_concave";
        case ConvexityMode::two_sided: return "convexity_two_sided";
        case ConvexityMode::potential_a: return "convexity_potential_a";
        case ConvexityMode::potential_b: return "convexity_potential_b";
        case ConvexityMode::potential_c: return "convexity_potential_c";
    }
    return "convexity";
}

namespace detail {

/// Per-time potential bound rates certified by sampling F on the grid; any
/// declared analytic rate must dominate the sampled one.
struct PotentialRates {
    std::vector<double> cf1, cf2, cf3, df_inf; // one entry per stored time
};

inline PotentialRates certify_potential(const PotentialSpec& pot, const Trajectory& traj) {
    PotentialRates r;
    const int m = traj.steps();
    r.cf1.assign(m, 0.0);
    r.cf2.assign(m, 0.0);
    r.cf3.assign(m, 0.0);
    r.df_inf.assign(m, 0.0);
    if (pot.kind == PotentialSpec::Kind::none) return r;
    const GridPtr& g = traj.grid();
    for (int k = 0; k < m; ++k) {
        const ScalarField f = pot.sample(g, traj.times[k]);
        const auto [lmin, lmax] = min_max_eigenvalue(hessian(f));
        const ScalarField lap = laplacian(f);
        const VectorField df = gradient(f);
        double dmax = 0.0;
        for (int id = 0; id < g->size(); ++id) dmax = std::max(dmax, std::sqrt(df.norm_sq(id)));
        r.cf1[k] = lmax.max();
        r.cf2[k] = lap.max();
        r.cf3[k] = std::max(0.0, -lmin.min());
        r.df_inf[k] = dmax;
        const double tol = 1e-8 * (1.0 + std::abs(r.cf1[k]));
        if (pot.declared_cf1_rate && *pot.declared_cf1_rate < r.cf1[k] - tol)
            throw ConstantNotCertified("declared cf1 rate below sampled D^2 F bound");
        if (pot.declared_cf2_rate && *pot.declared_cf2_rate < r.cf2[k] - tol)
            throw ConstantNotCertified("declared cf2 rate below sampled Lap F bound");
        if (pot.declared_cf3_rate && *pot.declared_cf3_rate < r.cf3[k] - tol)
            throw ConstantNotCertified("declared cf3 rate below sampled D^2 F bound");
    }
    return r;
}

} // namespace detail

/// Semi-log-convexity / concavity preservation margins (with and without a
/// potential). All constants are certified on the grid from the stored data.
inline Margin check_convexity_preservation(const Trajectory& traj, const EstimateParams& params,
                                           ConvexityMode mode,
                                           const PotentialSpec& potential = {}) {
    const ScalarField v0 = hopf_cole(traj.initial(), params.delta);
    const auto [l0min, l0max] = min_max_eigenvalue(hessian(v0));
    const double c_minus = std::max(0.0, -l0min.min()); // D^2 log u(0) >= -c_minus I
    const double c_plus = std::max(0.0, l0max.max());   // D^2 log u(0) <= c_plus I
    const VectorField dv0 = gradient(v0);
    double k0 = 0.0;
    for (int id = 0; id < dv0.grid->size(); ++id)
        k0 = std::max(k0, std::sqrt(dv0.norm_sq(id)));

    const int k_tau = traj.index_of(traj.datum_time + params.tau);
    const ScalarField v_tau = hopf_cole(traj.fields[k_tau], params.delta);
    const auto [lmin, lmax] = min_max_eigenvalue(hessian(v_tau));

    const auto rates = detail::certify_potential(potential, traj);

    auto rate_integral = [&](const std::vector<double>& r) {
        return detail::time_trapezoid(traj.times, r, k_tau);
    };

    double value = 0.0;
    int node = -1;
    switch (mode) {
        case ConvexityMode::convex: {
            const auto w = detail::min_loc(lmin.values);
            value = w.value + c_minus;
            node = w.node;
            break;
        }
        case ConvexityMode::concave: {
            const double c0 = std::max(c_minus, c_plus);
            const auto w = detail::max_loc(lmax.values);
            value = (k0 * k0 + c0) - w.value;
            node = w.node;
            break;
        }
        case ConvexityMode::two_sided: {
            const Margin a = check_convexity_preservation(traj, params, ConvexityMode::convex);
            const Margin b = check_convexity_preservation(traj, params, ConvexityMode::concave);
            value = std::min(a.value, b.value);
            node = a.value <= b.value ? a.worst_node : b.worst_node;
            break;
        }
        case ConvexityMode::potential_a: {
            const auto w = detail::min_loc(lmin.values);
            value = w.value + c_minus + rate_integral(rates.cf1);
            node = w.node;
            break;
        }
        case ConvexityMode::potential_b: {
            const ScalarField lap0 = laplacian(v0);
            const double c2 = std::max(0.0, -lap0.min());
            const ScalarField lap_tau = laplacian(v_tau);
            const auto w = detail::min_loc(lap_tau.values);
            value = w.value + c2 + rate_integral(rates.cf2);
            node = w.node;
            break;
        }
        case ConvexityMode::potential_c: {
            double k_traj = 0.0;
            for (const auto& f : traj.fields) {
                const VectorField dv = gradient(hopf_cole(f, params.delta));
                for (int id = 0; id < dv.grid->size(); ++id)
                    k_traj = std::max(k_traj, std::sqrt(dv.norm_sq(id)));
            }
            const auto w = detail::max_loc(lmax.values);
            value = (k0 * k0 + k_traj * rate_integral(rates.df_inf) + c_plus +
                     rate_integral(rates.cf3)) -
                    w.value;
            node = w.node;
            break;
        }
    }
    return Margin::make(to_string(mode), value, node, params.tau, params.tolerance,
                        node >= 0 ? (mode == ConvexityMode::concave ||
                                             mode == ConvexityMode::potential_c
                                         ? lmax.values[node]
                                         : lmin.values[node])
                                  : 0.0);
}

/// Intermediate integral bound in the potential-case concavity proof:
/// 2 iint |D^2 v|^2 rho <= K_0^2 + K ||DF||_{L^1 L^inf}.
inline Margin check_k0k(const Trajectory& traj, const AdjointRun& run,
                        const EstimateParams& params, const PotentialSpec& potential = {}) {
    detail::require_matched_run(traj, run, params);
    const int k_tau = traj.index_of(traj.datum_time + params.tau);
    const GridPtr& g = traj.grid();
    std::vector<double> slice(k_tau + 1, 0.0);
    double k0 = 0.0, k_traj = 0.0;
    for (int k = 0; k <= k_tau; ++k) {
        const ScalarField v = hopf_cole(traj.fields[k], params.delta);
        const SymMatrixField d2v = hessian(v);
        const VectorField dv = gradient(v);
        double s = 0.0;
        for (int id = 0; id < g->size(); ++id) {
            s += g->weight(id) * d2v.frobenius_sq(id) * run.rho.fields[k].values[id];
            const double grad = std::sqrt(dv.norm_sq(id));
            if (k == 0) k0 = std::max(k0, grad);
            k_traj = std::max(k_traj, grad);
        }
        slice[k] = 2.0 * s;
    }
    const double lhs = detail::time_trapezoid(traj.times, slice, k_tau);
    const auto rates = detail::certify_potential(potential, traj);
    const double df_l1 = detail::time_trapezoid(traj.times, rates.df_inf, k_tau);
    return Margin::make("k0k_integral", k0 * k0 + k_traj * df_l1 - lhs, -1, params.tau,
                        params.tolerance, lhs);
}

} // namespace harnack
