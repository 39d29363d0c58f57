#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "harnack_lab/fields.hpp"

namespace harnack {

namespace detail {

/// Value at (i,j) with even reflection across the faces. Encodes the
/// homogeneous Neumann condition: the ghost node mirrors its interior twin.
inline double refl(const ScalarField& f, int i, int j) {
    const Grid& g = *f.grid;
    i = g.reflect(i, 0);
    if (g.dim() == 2) j = g.reflect(j, 1);
    return f.values[g.index(i, j)];
}

} // namespace detail

/// Second-order central differences; even reflection at faces makes the
/// normal derivative exactly zero on the boundary.
inline VectorField gradient(const ScalarField& f) {
    f.require_finite("gradient");
    const Grid& g = *f.grid;
    VectorField out(f.grid);
    for (int j = 0; j < g.n_nodes(1); ++j) {
        for (int i = 0; i < g.n_nodes(0); ++i) {
            const int id = g.index(i, j);
            out.at(id, 0) = (detail::refl(f, i + 1, j) - detail::refl(f, i - 1, j)) / (2.0 * g.h(0));
            if (g.dim() == 2)
                out.at(id, 1) =
                    (detail::refl(f, i, j + 1) - detail::refl(f, i, j - 1)) / (2.0 * g.h(1));
        }
    }
    return out;
}

/// 3-point second differences and cross differences with even reflection.
inline SymMatrixField hessian(const ScalarField& f) {
    f.require_finite("hessian");
    const Grid& g = *f.grid;
    SymMatrixField out(f.grid);
    const double hx2 = g.h(0) * g.h(0);
    for (int j = 0; j < g.n_nodes(1); ++j) {
        for (int i = 0; i < g.n_nodes(0); ++i) {
            const int id = g.index(i, j);
            const double fxx = (detail::refl(f, i + 1, j) - 2.0 * f.values[id] +
                                detail::refl(f, i - 1, j)) /
                               hx2;
            if (g.dim() == 1) {
                out.at(id, 0) = fxx;
            } else {
                const double hy2 = g.h(1) * g.h(1);
                const double fyy = (detail::refl(f, i, j + 1) - 2.0 * f.values[id] +
                                    detail::refl(f, i, j - 1)) /
                                   hy2;
                const double fxy = (detail::refl(f, i + 1, j + 1) - detail::refl(f, i - 1, j + 1) -
                                    detail::refl(f, i + 1, j - 1) + detail::refl(f, i - 1, j - 1)) /
                                   (4.0 * g.h(0) * g.h(1));
                out.at(id, 0) = fxx;
                out.at(id, 1) = fxy;
                out.at(id, 2) = fyy;
            }
        }
    }
    return out;
}

/// Trace of the hessian stencil (identical to summing pure second differences).
inline ScalarField laplacian(const ScalarField& f) {
    const SymMatrixField H = hessian(f);
    ScalarField out(f.grid, 0.0, f.time);
    for (int id = 0; id < out.size(); ++id) out.values[id] = H.trace(id);
    return out;
}

/// v = log(u + delta).
inline ScalarField hopf_cole(const ScalarField& u, double delta) {
    u.require_finite("hopf_cole");
    if (!(u.min() + delta > 0.0))
        throw NonPositiveShiftedField("hopf_cole: min(u) + delta = " +
                                      std::to_string(u.min() + delta) + " <= 0");
    ScalarField v(u.grid, 0.0, u.time);
    for (int id = 0; id < u.size(); ++id) v.values[id] = std::log(u.values[id] + delta);
    return v;
}

/// Residual of Bochner's identity Delta|Dv|^2 = 2|D^2v|^2 + 2<Dv, D(Delta v)>
/// evaluated with the module's own stencils. Small for smooth v.
inline ScalarField bochner_residual(const ScalarField& v) {
    v.require_finite("bochner_residual");
    const VectorField dv = gradient(v);
    const SymMatrixField d2v = hessian(v);
    ScalarField omega(v.grid, 0.0, v.time);
    for (int id = 0; id < omega.size(); ++id) omega.values[id] = dv.norm_sq(id);
    const ScalarField lap_omega = laplacian(omega);
    const VectorField dlap = gradient(laplacian(v));
    ScalarField out(v.grid, 0.0, v.time);
    for (int id = 0; id < out.size(); ++id) {
        double cross = 0.0;
        for (int c = 0; c < v.grid->dim(); ++c) cross += dv.at(id, c) * dlap.at(id, c);
        out.values[id] = lap_omega.values[id] - 2.0 * d2v.frobenius_sq(id) - 2.0 * cross;
    }
    return out;
}

/// Pointwise extreme eigenvalues; closed form for d <= 2.
inline std::pair<ScalarField, ScalarField> min_max_eigenvalue(const SymMatrixField& m) {
    const Grid& g = *m.grid;
    if (g.dim() > 2) throw UnsupportedDim("min_max_eigenvalue: dim > 2");
    ScalarField lo(m.grid), hi(m.grid);
    for (int id = 0; id < g.size(); ++id) {
        if (g.dim() == 1) {
            lo.values[id] = hi.values[id] = m.at(id, 0);
        } else {
            const double a = m.at(id, 0), b = m.at(id, 1), c = m.at(id, 2);
            const double mean = 0.5 * (a + c);
            const double r = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
            lo.values[id] = mean - r;
            hi.values[id] = mean + r;
        }
    }
    return {std::move(lo), std::move(hi)};
}

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

namespace detail {

inline double lp_norm_of(const GridPtr& g, const std::vector<double>& absval, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : absval) m = std::max(m, v);
        return m;
    }
    if (!(p >= 1.0)) throw InvalidExponent("lp_norm: p = " + std::to_string(p) + " < 1");
    double s = 0.0;
    for (int id = 0; id < g->size(); ++id) s += g->weight(id) * std::pow(absval[id], p);
    return std::pow(s, 1.0 / p);
}

} // namespace detail

/// Quadrature-weighted L^p norm; max-norm for p = infinity.
inline double lp_norm(const ScalarField& f, double p) {
    std::vector<double> a(f.values.size());
    for (size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f.values[i]);
    return detail::lp_norm_of(f.grid, a, p);
}

inline double lp_norm(const VectorField& f, double p) {
    std::vector<double> a(f.grid->size());
    for (int id = 0; id < f.grid->size(); ++id) a[id] = std::sqrt(f.norm_sq(id));
    return detail::lp_norm_of(f.grid, a, p);
}

} // namespace harnack
