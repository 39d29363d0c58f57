#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "harnack_lab/errors.hpp"

namespace harnack {

/// Tridiagonal solve (Thomas algorithm). Coefficient arrays are modified.
/// Intended for diagonally dominant systems; no pivoting.
inline void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                         std::vector<double>& upper, std::vector<double>& rhs) {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) throw LinearSolveFailure("thomas_solve: zero pivot");
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) throw LinearSolveFailure("thomas_solve: zero pivot");
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

using LinOp = std::function<void(const std::vector<double>&, std::vector<double>&)>;

/// Conjugate gradients for operators that are SPD in the inner product
/// <x,y>_w = sum w_i x_i y_i. Deterministic; fixed relative tolerance.
inline void cg_weighted(const LinOp& apply, const std::vector<double>& w,
                        const std::vector<double>& b, std::vector<double>& x,
                        double rel_tol = 1e-13, int max_iter = 10000) {
    const size_t n = b.size();
    std::vector<double> r(n), p(n), ap(n);
    apply(x, ap);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    p = r;
    auto dotw = [&](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += w[i] * a[i] * c[i];
        return s;
    };
    double rr = dotw(r, r);
    const double bb = dotw(b, b);
    const double stop = rel_tol * rel_tol * (bb > 0.0 ? bb : 1.0);
    for (int it = 0; it < max_iter; ++it) {
        if (rr <= stop) return;
        apply(p, ap);
        const double pap = dotw(p, ap);
        if (!(pap > 0.0)) throw LinearSolveFailure("cg_weighted: operator not positive definite");
        const double alpha = rr / pap;
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dotw(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    if (rr > stop) throw LinearSolveFailure("cg_weighted: no convergence");
}

/// BiCGSTAB for general (nonsymmetric) systems; used by the 2D implicit
/// upwind step. Deterministic shadow vector r0 = initial residual.
inline void bicgstab(const LinOp& apply, const std::vector<double>& b, std::vector<double>& x,
                     double rel_tol = 1e-13, int max_iter = 20000) {
    const size_t n = b.size();
    std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n);
    apply(x, v);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - v[i];
    r0 = r;
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
        double sum = 0.0;
        for (size_t i = 0; i < n; ++i) sum += a[i] * c[i];
        return sum;
    };
    double bb = std::sqrt(dot(b, b));
    if (bb == 0.0) bb = 1.0;
    const double stop = rel_tol * bb;
    double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(v.begin(), v.end(), 0.0);
    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(dot(r, r)) <= stop) return;
        const double rho = dot(r0, r);
        if (rho == 0.0) throw LinearSolveFailure("bicgstab: breakdown (rho = 0)");
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho / rho_prev) * (alpha / omega);
            for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        apply(p, v);
        alpha = rho / dot(r0, v);
        for (size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        apply(s, t);
        const double tt = dot(t, t);
        omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        if (omega == 0.0) {
            if (std::sqrt(dot(r, r)) <= stop) return;
            throw LinearSolveFailure("bicgstab: breakdown (omega = 0)");
        }
        rho_prev = rho;
    }
    throw LinearSolveFailure("bicgstab: no convergence");
}

} // namespace harnack
