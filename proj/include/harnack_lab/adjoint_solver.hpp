#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "harnack_lab/calculus.hpp"
#include "harnack_lab/fields.hpp"
#include "harnack_lab/heat_solver.hpp"
#include "harnack_lab/linsolve.hpp"

namespace harnack {

/// Drift b(x,t) for the backward advection-diffusion problem. The main source
/// is a stored log-trajectory v, with b = 2 Dv sampled at the stored times.
class DriftSampler {
  public:
    enum class Kind { zero, constant, trajectory };

    static DriftSampler zero() {
        DriftSampler d;
        d.kind_ = Kind::zero;
        d.source_id_ = "zero";
        return d;
    }

    static DriftSampler constant(const GridPtr& g, std::array<double, 2> b) {
        DriftSampler d;
        d.kind_ = Kind::constant;
        d.const_vec_ = b;
        d.grid_ = g;
        d.bound_ = std::sqrt(b[0] * b[0] + (g->dim() == 2 ? b[1] * b[1] : 0.0));
        d.source_id_ = "constant";
        return d;
    }

    /// b(.,t_k) = 2 D log(u(t_k) + delta) from a stored positive trajectory.
    static DriftSampler from_trajectory(const Trajectory& u_traj, double delta) {
        DriftSampler d;
        d.kind_ = Kind::trajectory;
        d.grid_ = u_traj.grid();
        d.times_ = u_traj.times;
        d.delta_ = delta;
        d.source_id_ = "trajectory";
        d.fields_.reserve(u_traj.steps());
        for (int k = 0; k < u_traj.steps(); ++k) {
            const ScalarField v = hopf_cole(u_traj.fields[k], delta);
            VectorField b = gradient(v);
            for (double& x : b.values) x *= 2.0;
            for (int id = 0; id < d.grid_->size(); ++id)
                d.bound_ = std::max(d.bound_, std::sqrt(b.norm_sq(id)));
            d.fields_.push_back(std::move(b));
        }
        if (d.bound_ > 1e6)
            throw DriftUnboundedError("drift sup-norm " + std::to_string(d.bound_) +
                                      " exceeds 1e6 (delta too small in Hopf-Cole?)");
        return d;
    }

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }
    double bound() const { return bound_; }
    double delta() const { return delta_; }
    const std::string& source_id() const { return source_id_; }

    VectorField at(const GridPtr& g, double t) const {
        if (kind_ == Kind::zero) return VectorField(g);
        if (kind_ == Kind::constant) {
            VectorField b(g);
            for (int id = 0; id < g->size(); ++id)
                for (int c = 0; c < g->dim(); ++c) b.at(id, c) = const_vec_[c];
            return b;
        }
        for (size_t k = 0; k < times_.size(); ++k)
            if (std::abs(times_[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return fields_[k];
        throw DriftMismatch("drift sampler has no stored field at t = " + std::to_string(t));
    }

  private:
    Kind kind_ = Kind::zero;
    GridPtr grid_;
    std::array<double, 2> const_vec_{0.0, 0.0};
    std::vector<double> times_;
    std::vector<VectorField> fields_;
    double bound_ = 0.0;
    double delta_ = 0.0;
    std::string source_id_ = "zero";
};

namespace detail {

/// Faces of the dual (finite-volume) mesh. A face sits between lexicographic
/// neighbors; its area is the transverse trapezoid weight, so summation by
/// parts closes against the node quadrature.
struct Face {
    int i, j;      // node ids, i -> j along +axis
    int axis;
    double area;
};

inline std::vector<Face> make_faces(const Grid& g) {
    std::vector<Face> faces;
    const int nx = g.n_nodes(0), ny = g.n_nodes(1);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i)
            faces.push_back({g.index(i, j), g.index(i + 1, j), 0,
                             g.dim() == 2 ? g.weights_1d(1)[j] : 1.0});
    if (g.dim() == 2)
        for (int j = 0; j + 1 < ny; ++j)
            for (int i = 0; i < nx; ++i)
                faces.push_back({g.index(i, j), g.index(i, j + 1), 1, g.weights_1d(0)[i]});
    return faces;
}

/// Upwind face velocities <b, e_axis> (average of the two node values).
inline std::vector<double> face_velocities(const std::vector<Face>& faces, const VectorField& b) {
    std::vector<double> u(faces.size());
    for (size_t f = 0; f < faces.size(); ++f)
        u[f] = 0.5 * (b.at(faces[f].i, faces[f].axis) + b.at(faces[f].j, faces[f].axis));
    return u;
}

} // namespace detail

/// The discrete spatial operator of the adjoint problem in flux form:
/// (A_h rho)_i = (1/w_i) * sum of outgoing (advective upwind + diffusive)
/// face fluxes. Boundary faces carry zero flux, so weighted sums telescope.
class FpOperator {
  public:
    FpOperator(GridPtr g, const VectorField& drift)
        : grid_(std::move(g)), faces_(detail::make_faces(*grid_)),
          u_(detail::face_velocities(faces_, drift)) {}

    const GridPtr& grid() const { return grid_; }

    /// A_h rho  (discretization of -Lap rho + div(b rho) with flux BCs).
    std::vector<double> apply_adjoint(const std::vector<double>& rho) const {
        std::vector<double> out(grid_->size(), 0.0);
        accumulate_fluxes(rho, out);
        for (int id = 0; id < grid_->size(); ++id) out[id] /= grid_->weight(id);
        return out;
    }

    /// L_h z, the W-adjoint of A_h (discretization of -Lap z - <b, Dz>):
    /// <L_h z, rho>_w = <z, A_h rho>_w exactly, for all z and rho.
    std::vector<double> apply_forward(const std::vector<double>& z) const {
        std::vector<double> out(grid_->size(), 0.0);
        for (size_t f = 0; f < faces_.size(); ++f) {
            const auto& fc = faces_[f];
            const double h = grid_->h(fc.axis);
            const double dz = z[fc.i] - z[fc.j];
            out[fc.i] += fc.area * (std::max(u_[f], 0.0) + 1.0 / h) * dz;
            out[fc.j] += fc.area * (std::min(u_[f], 0.0) - 1.0 / h) * dz;
        }
        for (int id = 0; id < grid_->size(); ++id) out[id] /= grid_->weight(id);
        return out;
    }

    /// Implicit upwind step of length ds backward in time:
    /// (W + ds * W A_h) rho_new = W rho_old. M-matrix, hence nonnegativity;
    /// columns sum to w, hence exact discrete mass conservation.
    std::vector<double> implicit_step(const std::vector<double>& rho_old, double ds) const {
        const Grid& g = *grid_;
        std::vector<double> rhs(g.size());
        for (int id = 0; id < g.size(); ++id) rhs[id] = g.weight(id) * rho_old[id];
        if (g.dim() == 1) {
            const int n = g.size();
            std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0);
            for (int id = 0; id < n; ++id) diag[id] = g.weight(id);
            for (size_t f = 0; f < faces_.size(); ++f) {
                const auto& fc = faces_[f];
                const double h = g.h(0);
                const double cii = fc.area * (std::max(u_[f], 0.0) + 1.0 / h);
                const double cij = fc.area * (std::min(u_[f], 0.0) - 1.0 / h);
                diag[fc.i] += ds * cii;
                upper[fc.i] += ds * cij;     // j = i+1
                lower[fc.j] += ds * (-cii);  // row j, column i
                diag[fc.j] += ds * (-cij);
            }
            thomas_solve(lower, diag, upper, rhs);
            return rhs;
        }
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            for (int id = 0; id < g.size(); ++id) y[id] = g.weight(id) * x[id];
            std::vector<double> flux(g.size(), 0.0);
            accumulate_fluxes(x, flux);
            for (int id = 0; id < g.size(); ++id) y[id] += ds * flux[id];
        };
        std::vector<double> x(rho_old);
        bicgstab(apply, rhs, x, 1e-13);
        return x;
    }

  private:
    void accumulate_fluxes(const std::vector<double>& rho, std::vector<double>& out) const {
        for (size_t f = 0; f < faces_.size(); ++f) {
            const auto& fc = faces_[f];
            const double h = grid_->h(fc.axis);
            const double upw = u_[f] > 0.0 ? rho[fc.i] : rho[fc.j];
            const double flux = fc.area * (u_[f] * upw - (rho[fc.j] - rho[fc.i]) / h);
            out[fc.i] += flux;
            out[fc.j] -= flux;
        }
    }

    GridPtr grid_;
    std::vector<detail::Face> faces_;
    std::vector<double> u_;
};

/// Result of a backward advection-diffusion run; trajectory stored
/// forward-ordered in time.
struct AdjointRun {
    Trajectory rho;
    ScalarField terminal;
    std::vector<double> mass_log; // per stored time, ascending
    bool drift_zero = false;
    double drift_bound = 0.0;
    double drift_delta = 0.0;
    std::string drift_source;
};

/// Solve the backward Cauchy-Neumann advection-diffusion problem on an
/// explicit ascending time grid whose last entry is the terminal time.
inline AdjointRun solve_backward_fp(const ScalarField& rho_tau, const DriftSampler& drift,
                                    const std::vector<double>& times) {
    rho_tau.require_finite("solve_backward_fp");
    if (rho_tau.min() < 0.0)
        throw ValidationError("solve_backward_fp: terminal datum must be nonnegative");
    if (times.size() < 2) throw ValidationError("solve_backward_fp: need at least two times");
    const GridPtr g = rho_tau.grid;
    const int m = static_cast<int>(times.size());
    AdjointRun run;
    run.terminal = rho_tau;
    run.drift_zero = drift.is_zero();
    run.drift_bound = drift.bound();
    run.drift_delta = drift.delta();
    run.drift_source = drift.source_id();
    run.rho.times = times;
    run.rho.fields.resize(m);
    run.rho.datum_time = times.front();
    ScalarField rho = rho_tau;
    rho.time = times[m - 1];
    run.rho.fields[m - 1] = rho;
    for (int k = m - 2; k >= 0; --k) {
        const FpOperator op(g, drift.at(g, times[k]));
        rho.values = op.implicit_step(rho.values, times[k + 1] - times[k]);
        rho.time = times[k];
        run.rho.fields[k] = rho;
    }
    run.mass_log.resize(m);
    for (int k = 0; k < m; ++k) run.mass_log[k] = integrate(run.rho.fields[k]);
    return run;
}

inline AdjointRun solve_backward_fp(const ScalarField& rho_tau, const DriftSampler& drift,
                                    const SolverParams& params) {
    params.validate();
    return solve_backward_fp(rho_tau, drift, detail::snapped_times(params));
}

inline double total_mass(const AdjointRun& run, int t_index) {
    return integrate(run.rho.fields.at(t_index));
}

/// Minimum over stored times of ||rho_tau||_p - ||rho(t)||_p. Only defined
/// for drift-free runs; with divergence terms contraction can fail.
inline double lp_contraction_check(const AdjointRun& run, double p) {
    if (!run.drift_zero)
        throw DriftNotZero("lp_contraction_check requires a drift-free run");
    if (!(p >= 1.0) && !std::isinf(p)) throw InvalidExponent("lp_contraction_check: p < 1");
    const double terminal_norm = lp_norm(run.terminal, p);
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& f : run.rho.fields) margin = std::min(margin, terminal_norm - lp_norm(f, p));
    return margin;
}

/// Discrete tail functional: squared mass outside the ball B_R at the stored
/// time plus the gradient energy outside B_R from that time to the horizon.
inline double tail_energy(const AdjointRun& run, double R, int t_index) {
    const GridPtr g = run.rho.grid();
    const BoxDomain& box = g->domain();
    double reach = std::numeric_limits<double>::infinity();
    for (int a = 0; a < box.dim; ++a)
        reach = std::min(reach, std::min(-box.lower[a], box.upper[a]));
    if (R < 0.0 || R > reach)
        throw RadiusTooLarge("tail_energy: ball of radius " + std::to_string(R) +
                             " not contained in the box");
    auto outside = [&](int id) {
        const auto x = g->coord(id);
        double r2 = 0.0;
        for (int c = 0; c < g->dim(); ++c) r2 += x[c] * x[c];
        return r2 > R * R;
    };
    auto slice = [&](int k) {
        const ScalarField& f = run.rho.fields[k];
        const VectorField df = gradient(f);
        double sq = 0.0, grad = 0.0;
        for (int id = 0; id < g->size(); ++id) {
            if (!outside(id)) continue;
            sq += g->weight(id) * f.values[id] * f.values[id];
            grad += g->weight(id) * df.norm_sq(id);
        }
        return std::pair{sq, grad};
    };
    const int m = run.rho.steps();
    double h = slice(t_index).first;
    double prev_grad = slice(t_index).second;
    for (int k = t_index + 1; k < m; ++k) {
        const double grad = slice(k).second;
        h += 0.5 * (run.rho.times[k] - run.rho.times[k - 1]) * (prev_grad + grad);
        prev_grad = grad;
    }
    return h;
}

} // namespace harnack
