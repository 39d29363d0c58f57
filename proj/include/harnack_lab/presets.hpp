#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "harnack_lab/fields.hpp"

namespace harnack {
namespace presets {

inline ScalarField constant(const GridPtr& g, double c) { return ScalarField(g, c); }

/// a + b * prod_axes cos(k_ax pi (x - lo)/L): a Neumann eigenfunction plus a
/// constant, the workhorse closed-form scenario.
inline ScalarField neumann_cosine(const GridPtr& g, double a, double b, int kx, int ky = 0) {
    ScalarField f(g);
    const BoxDomain& box = g->domain();
    for (int id = 0; id < g->size(); ++id) {
        const auto x = g->coord(id);
        double mode = std::cos(kx * std::numbers::pi * (x[0] - box.lower[0]) /
                               (box.upper[0] - box.lower[0]));
        if (g->dim() == 2 && ky > 0)
            mode *= std::cos(ky * std::numbers::pi * (x[1] - box.lower[1]) /
                             (box.upper[1] - box.lower[1]));
        f.values[id] = a + b * mode;
    }
    return f;
}

/// Gauss-Weierstrass kernel of age t0 centered at c, sampled on the grid.
inline ScalarField gaussian(const GridPtr& g, double t0, std::array<double, 2> c = {0.0, 0.0}) {
    ScalarField f(g);
    const int n = g->dim();
    const double norm = std::pow(4.0 * std::numbers::pi * t0, -0.5 * n);
    for (int id = 0; id < g->size(); ++id) {
        const auto x = g->coord(id);
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
        f.values[id] = norm * std::exp(-r2 / (4.0 * t0));
    }
    return f;
}

inline ScalarField gaussian_mixture(const GridPtr& g, const std::vector<double>& ages,
                                    const std::vector<std::array<double, 2>>& centers,
                                    const std::vector<double>& weights) {
    ScalarField f(g, 0.0);
    for (size_t k = 0; k < ages.size(); ++k) {
        const ScalarField gk = gaussian(g, ages[k], centers[k]);
        for (int id = 0; id < g->size(); ++id) f.values[id] += weights[k] * gk.values[id];
    }
    return f;
}

/// u0 = exp(-c0 |x - ctr|^2 / 2 + lin . x): semi-log-convex with constant
/// exactly c0 (D^2 log u0 = -c0 I).
inline ScalarField log_quadratic(const GridPtr& g, double c0, std::array<double, 2> ctr = {0, 0},
                                 std::array<double, 2> lin = {0, 0}) {
    ScalarField f(g);
    for (int id = 0; id < g->size(); ++id) {
        const auto x = g->coord(id);
        double q = 0.0;
        for (int a = 0; a < g->dim(); ++a)
            q += -0.5 * c0 * (x[a] - ctr[a]) * (x[a] - ctr[a]) + lin[a] * x[a];
        f.values[id] = std::exp(q);
    }
    return f;
}

/// Tensor cosine bump supported in the box of half-width `radius` around
/// `center`, normalized to unit discrete mass. Terminal data for adjoint runs.
inline ScalarField bump(const GridPtr& g, std::array<double, 2> center, double radius) {
    ScalarField f(g);
    for (int id = 0; id < g->size(); ++id) {
        const auto x = g->coord(id);
        double v = 1.0;
        for (int a = 0; a < g->dim(); ++a) {
            const double r = std::abs(x[a] - center[a]) / radius;
            v *= r < 1.0 ? 0.5 * (1.0 + std::cos(std::numbers::pi * r)) : 0.0;
        }
        f.values[id] = v;
    }
    const double mass = integrate(f);
    if (mass <= 0.0) throw ValidationError("bump: support does not meet the grid");
    for (double& v : f.values) v /= mass;
    return f;
}

/// Seeded random positive smooth datum: exponential of a concave quadratic
/// centered inside the box plus a few low-frequency cosine perturbations.
inline ScalarField random_smooth(const GridPtr& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const BoxDomain& box = g->domain();
    std::array<double, 2> ctr{};
    std::array<double, 2> len{};
    for (int a = 0; a < g->dim(); ++a) {
        len[a] = box.upper[a] - box.lower[a];
        ctr[a] = box.lower[a] + (0.3 + 0.4 * unif(rng)) * len[a];
    }
    const double alpha = 0.2 + 1.0 * unif(rng); // concavity of the quadratic
    struct Mode {
        int k[2];
        double amp;
    };
    std::vector<Mode> modes;
    const int n_modes = 2 + static_cast<int>(unif(rng) * 3);
    for (int m = 0; m < n_modes; ++m) {
        Mode md{};
        md.k[0] = 1 + static_cast<int>(unif(rng) * 3);
        md.k[1] = g->dim() == 2 ? static_cast<int>(unif(rng) * 3) : 0;
        md.amp = 0.15 * (2.0 * unif(rng) - 1.0);
        modes.push_back(md);
    }
    ScalarField f(g);
    for (int id = 0; id < g->size(); ++id) {
        const auto x = g->coord(id);
        double q = 0.0;
        for (int a = 0; a < g->dim(); ++a) q -= alpha * (x[a] - ctr[a]) * (x[a] - ctr[a]);
        for (const auto& md : modes) {
            double mode = std::cos(md.k[0] * std::numbers::pi * (x[0] - box.lower[0]) / len[0]);
            if (g->dim() == 2 && md.k[1] > 0)
                mode *= std::cos(md.k[1] * std::numbers::pi * (x[1] - box.lower[1]) / len[1]);
            q += md.amp * mode;
        }
        f.values[id] = std::exp(q);
    }
    return f;
}

} // namespace presets
} // namespace harnack
