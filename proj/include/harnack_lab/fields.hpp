#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "harnack_lab/errors.hpp"
#include "harnack_lab/grid.hpp"

namespace harnack {

/// Node-indexed scalar values at one time instant.
struct ScalarField {
    GridPtr grid;
    std::vector<double> values;
    double time = 0.0;

    ScalarField() = default;
    ScalarField(GridPtr g, double fill = 0.0, double t = 0.0)
        : grid(std::move(g)), values(grid->size(), fill), time(t) {}

    double& operator[](int id) { return values[id]; }
    double operator[](int id) const { return values[id]; }
    int size() const { return static_cast<int>(values.size()); }

    double min() const { return *std::min_element(values.begin(), values.end()); }
    double max() const { return *std::max_element(values.begin(), values.end()); }

    bool finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
    void require_finite(const char* op) const {
        if (!finite()) throw NonFiniteInput(std::string(op) + ": non-finite input field");
    }
};

/// Node-indexed dim-vectors, stored node-major.
struct VectorField {
    GridPtr grid;
    std::vector<double> values; // values[id*dim + c]

    VectorField() = default;
    explicit VectorField(GridPtr g) : grid(std::move(g)), values(grid->size() * grid->dim(), 0.0) {}

    double& at(int id, int c) { return values[id * grid->dim() + c]; }
    double at(int id, int c) const { return values[id * grid->dim() + c]; }

    double norm_sq(int id) const {
        double s = 0.0;
        for (int c = 0; c < grid->dim(); ++c) s += at(id, c) * at(id, c);
        return s;
    }
};

/// Node-indexed symmetric dim x dim matrices; upper triangle storage,
/// d=1: (xx), d=2: (xx, xy, yy).
struct SymMatrixField {
    GridPtr grid;
    std::vector<double> values;

    SymMatrixField() = default;
    explicit SymMatrixField(GridPtr g)
        : grid(std::move(g)), values(grid->size() * (grid->dim() == 1 ? 1 : 3), 0.0) {}

    int comps() const { return grid->dim() == 1 ? 1 : 3; }
    double& at(int id, int c) { return values[id * comps() + c]; }
    double at(int id, int c) const { return values[id * comps() + c]; }

    double trace(int id) const {
        return grid->dim() == 1 ? at(id, 0) : at(id, 0) + at(id, 2);
    }
    /// Squared Frobenius norm |M|^2 (off-diagonal counted twice).
    double frobenius_sq(int id) const {
        if (grid->dim() == 1) return at(id, 0) * at(id, 0);
        const double a = at(id, 0), b = at(id, 1), c = at(id, 2);
        return a * a + 2.0 * b * b + c * c;
    }
    /// Quadratic form <M xi, xi>.
    double quad_form(int id, const std::array<double, 2>& xi) const {
        if (grid->dim() == 1) return at(id, 0) * xi[0] * xi[0];
        return at(id, 0) * xi[0] * xi[0] + 2.0 * at(id, 1) * xi[0] * xi[1] +
               at(id, 2) * xi[1] * xi[1];
    }
};

/// Time-indexed sequence of scalar fields on one grid.
struct Trajectory {
    std::vector<double> times; // strictly increasing
    std::vector<ScalarField> fields;
    double delta = 0.0;           // Hopf-Cole shift attached by the scenario
    std::string potential_id = "none";
    double datum_time = 0.0;      // time the initial datum refers to (<= times.front())

    GridPtr grid() const { return fields.empty() ? nullptr : fields.front().grid; }
    int steps() const { return static_cast<int>(times.size()); }

    const ScalarField& initial() const { return fields.front(); }
    const ScalarField& terminal() const { return fields.back(); }

    /// Index of a stored time, or CheckpointMissing.
    int index_of(double t, double tol = 1e-9) const {
        for (int k = 0; k < steps(); ++k)
            if (std::abs(times[k] - t) <= tol * std::max(1.0, std::abs(t))) return k;
        throw CheckpointMissing("trajectory has no stored field at t = " + std::to_string(t));
    }

    void validate() const {
        if (times.size() != fields.size())
            throw ValidationError("trajectory: times/fields length mismatch");
        if (!times.empty() && times.front() < 0.0)
            throw ValidationError("trajectory: negative start time");
        for (size_t k = 1; k < times.size(); ++k)
            if (!(times[k] > times[k - 1]))
                throw ValidationError("trajectory: times not strictly increasing");
        for (const auto& f : fields)
            if (f.grid != grid()) throw ValidationError("trajectory: fields on different grids");
    }
};

inline ScalarField quadrature_weights(const GridPtr& g) {
    ScalarField w(g);
    w.values = g->weights();
    return w;
}

/// Trapezoidal approximation of the integral over the box.
inline double integrate(const ScalarField& f) {
    double s = 0.0;
    for (int id = 0; id < f.size(); ++id) s += f.grid->weight(id) * f.values[id];
    return s;
}

/// Quadrature-weighted inner product of two node vectors.
inline double dot_weighted(const GridPtr& g, const std::vector<double>& a,
                           const std::vector<double>& b) {
    double s = 0.0;
    for (int id = 0; id < g->size(); ++id) s += g->weight(id) * a[id] * b[id];
    return s;
}

} // namespace harnack
