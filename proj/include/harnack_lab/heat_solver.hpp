#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "harnack_lab/calculus.hpp"
#include "harnack_lab/fields.hpp"
#include "harnack_lab/linsolve.hpp"

namespace harnack {

/// Space-time potential F(x,t) for the equation dt u - Lap u + F u = 0.
/// The only built-in family is the separable quadratic F = a(t)|x-c|^2,
/// which covers the convex/concave potential scenarios.
struct PotentialSpec {
    enum class Kind { none, quadratic };
    Kind kind = Kind::none;
    double amplitude = 0.0;                        // a in a(t) = amplitude * time_factor(t)
    std::array<double, 2> center{0.0, 0.0};
    std::function<double(double)> time_factor;     // defaults to 1

    // Optional analytic bound rates per the potential-case estimates. When
    // present they are cross-checked against the sampled field before use.
    std::optional<double> declared_cf1_rate; // D^2 F <= cf1(t) I
    std::optional<double> declared_cf2_rate; // Lap F <= cf2(t)
    std::optional<double> declared_cf3_rate; // D^2 F >= -cf3(t) I

    double a_of(double t) const { return amplitude * (time_factor ? time_factor(t) : 1.0); }

    double eval(const std::array<double, 2>& x, double t, int dim) const {
        if (kind == Kind::none) return 0.0;
        double r2 = 0.0;
        for (int c = 0; c < dim; ++c) r2 += (x[c] - center[c]) * (x[c] - center[c]);
        return a_of(t) * r2;
    }

    std::string id() const {
        if (kind == Kind::none) return "none";
        return "quadratic(a=" + std::to_string(amplitude) + ")";
    }

    /// Sample F on the grid at time t.
    ScalarField sample(const GridPtr& g, double t) const {
        ScalarField f(g, 0.0, t);
        for (int id = 0; id < g->size(); ++id) f.values[id] = eval(g->coord(id), t, g->dim());
        return f;
    }
};

struct SolverParams {
    double dt = 1e-3;
    double t0 = 0.0;
    double t_end = 0.1;
    std::vector<double> checkpoints; // sorted, within (t0, t_end]

    void validate() const {
        if (!(dt > 0.0)) throw ValidationError("SolverParams: dt must be positive");
        if (!(t_end > t0)) throw ValidationError("SolverParams: t_end <= t0");
        if (dt > (t_end - t0) / 16.0 + 1e-15)
            throw ValidationError("SolverParams: dt > (t_end - t0)/16");
        double prev = t0;
        for (double c : checkpoints) {
            if (!(c > t0) || c > t_end + 1e-12)
                throw ValidationError("SolverParams: checkpoint outside (t0, t_end]");
            if (!(c > prev)) throw ValidationError("SolverParams: checkpoints not increasing");
            prev = c;
        }
    }
};

namespace detail {

/// One backward-Euler step of (I + dt(-Lap_h + F)) u_new = u with Neumann
/// reflection. F is the potential sampled at the new time (empty = none).
inline std::vector<double> implicit_heat_step(const Grid& g, const std::vector<double>& u,
                                              double dt, const std::vector<double>& f_new) {
    const bool has_f = !f_new.empty();
    if (g.dim() == 1) {
        const int n = g.size();
        const double r = dt / (g.h(0) * g.h(0));
        std::vector<double> lower(n, -r), diag(n), upper(n, -r), rhs(u);
        for (int i = 0; i < n; ++i)
            diag[i] = 1.0 + 2.0 * r + (has_f ? dt * f_new[i] : 0.0);
        upper[0] = -2.0 * r;       // reflected neighbor counted twice
        lower[n - 1] = -2.0 * r;
        thomas_solve(lower, diag, upper, rhs);
        return rhs;
    }
    // 2D: matrix-free CG; the reflected 5-point operator is symmetric in the
    // trapezoid-weighted inner product.
    const int nx = g.n_nodes(0), ny = g.n_nodes(1);
    const double rx = dt / (g.h(0) * g.h(0)), ry = dt / (g.h(1) * g.h(1));
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int id = g.index(i, j);
                const double c = x[id];
                const double xm = x[g.index(g.reflect(i - 1, 0), j)];
                const double xp = x[g.index(g.reflect(i + 1, 0), j)];
                const double ym = x[g.index(i, g.reflect(j - 1, 1))];
                const double yp = x[g.index(i, g.reflect(j + 1, 1))];
                y[id] = c - rx * (xp - 2.0 * c + xm) - ry * (yp - 2.0 * c + ym);
                if (has_f) y[id] += dt * f_new[id] * c;
            }
        }
    };
    std::vector<double> x(u); // warm start from previous level
    cg_weighted(apply, g.weights(), u, x);
    return x;
}

} // namespace detail

inline ScalarField step_heat(const ScalarField& u, double dt,
                             const PotentialSpec& potential = {}) {
    u.require_finite("step_heat");
    if (!(dt > 0.0)) throw ValidationError("step_heat: dt must be positive");
    const double t_new = u.time + dt;
    std::vector<double> f_new;
    if (potential.kind != PotentialSpec::Kind::none) {
        f_new = potential.sample(u.grid, t_new).values;
        const double f_min = *std::min_element(f_new.begin(), f_new.end());
        if (dt * std::max(0.0, -f_min) >= 1.0)
            throw PositivityLoss("step_heat: dt*max|F^-| >= 1, positivity not guaranteed");
    }
    ScalarField out(u.grid, 0.0, t_new);
    out.values = detail::implicit_heat_step(*u.grid, u.values, dt, f_new);
    if (potential.kind != PotentialSpec::Kind::none && out.min() <= 0.0)
        throw PositivityLoss("step_heat: potential drove the solution nonpositive");
    return out;
}

namespace detail {

/// Time grid that lands exactly on every checkpoint and on t_end.
inline std::vector<double> snapped_times(const SolverParams& p) {
    std::vector<double> bounds{p.t0};
    for (double c : p.checkpoints)
        if (std::abs(c - p.t_end) > 1e-12) bounds.push_back(c);
    bounds.push_back(p.t_end);
    std::vector<double> times{p.t0};
    for (size_t s = 0; s + 1 < bounds.size(); ++s) {
        const double a = bounds[s], b = bounds[s + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / p.dt - 1e-9)));
        for (int k = 1; k <= n; ++k) times.push_back(k == n ? b : a + k * (b - a) / n);
    }
    return times;
}

} // namespace detail

/// Forward Neumann heat flow (optionally with potential), backward Euler in
/// time, every accepted step stored.
inline Trajectory solve_heat(const ScalarField& u0, const SolverParams& params,
                             const PotentialSpec& potential = {}) {
    params.validate();
    u0.require_finite("solve_heat");
    // Nonnegative suffices: sharp truncated Gaussians underflow to 0 in the
    // far tail, and one implicit step restores strict positivity (M-matrix).
    if (u0.min() < 0.0 || !(u0.max() > 0.0))
        throw ValidationError("solve_heat: initial datum must be nonnegative and nonzero");
    const std::vector<double> times = detail::snapped_times(params);
    Trajectory traj;
    traj.times = times;
    traj.potential_id = potential.id();
    traj.datum_time = params.t0;
    traj.fields.reserve(times.size());
    ScalarField u = u0;
    u.time = params.t0;
    traj.fields.push_back(u);
    for (size_t k = 1; k < times.size(); ++k) {
        u = step_heat(u, times[k] - times[k - 1], potential);
        u.time = times[k];
        traj.fields.push_back(u);
    }
    return traj;
}

/// Backward Neumann heat flow from a terminal datum at t_end; same kernel as
/// solve_heat under time reversal. Returned trajectory is forward-ordered:
/// fields[k] holds mu(times[k]) with mu(t_end) = mu_tau.
inline Trajectory solve_backward_heat(const ScalarField& mu_tau, const SolverParams& params) {
    params.validate();
    mu_tau.require_finite("solve_backward_heat");
    if (mu_tau.min() < 0.0)
        throw ValidationError("solve_backward_heat: terminal datum must be nonnegative");
    const std::vector<double> times = detail::snapped_times(params);
    const int m = static_cast<int>(times.size());
    Trajectory traj;
    traj.times = times;
    traj.datum_time = params.t0;
    traj.fields.resize(m);
    ScalarField mu = mu_tau;
    mu.time = times[m - 1];
    traj.fields[m - 1] = mu;
    for (int k = m - 2; k >= 0; --k) {
        mu = step_heat(mu, times[k + 1] - times[k]);
        mu.time = times[k];
        traj.fields[k] = mu;
    }
    return traj;
}

} // namespace harnack
