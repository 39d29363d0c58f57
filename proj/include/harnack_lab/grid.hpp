#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "harnack_lab/errors.hpp"

namespace harnack {

/// Axis-aligned box domain in dimension 1 or 2. A large box with
/// truncates_full_space=true stands in for the whole space; solvers still
/// impose discrete Neumann conditions on its faces.
struct BoxDomain {
    int dim = 1;
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> upper{1.0, 1.0};
    bool truncates_full_space = false;

    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= upper[a] - lower[a];
        return v;
    }

    void validate() const {
        if (dim != 1 && dim != 2)
            throw UnsupportedDim("BoxDomain: dim must be 1 or 2, got " + std::to_string(dim));
        for (int a = 0; a < dim; ++a)
            if (!(lower[a] < upper[a]))
                throw InvalidBox("BoxDomain: lower >= upper on axis " + std::to_string(a));
    }

    static BoxDomain interval(double lo, double hi, bool truncated = false) {
        return BoxDomain{1, {lo, 0.0}, {hi, 0.0}, truncated};
    }
    static BoxDomain rectangle(double lox, double hix, double loy, double hiy,
                               bool truncated = false) {
        return BoxDomain{2, {lox, loy}, {hix, hiy}, truncated};
    }
};

enum class NodeClass { interior, face, corner };

/// Uniform tensor grid over a BoxDomain with Neumann-aware boundary metadata.
/// Node ordering is lexicographic: index = i + j*(n_cells[0]+1).
/// Immutable after construction; safe to share across concurrent runs.
class Grid {
  public:
    Grid(BoxDomain domain, std::array<int, 2> n_cells) : domain_(domain), n_cells_(n_cells) {
        domain_.validate();
        for (int a = 0; a < domain_.dim; ++a) {
            if (n_cells_[a] < 8)
                throw TooCoarse("build_grid: n_cells[" + std::to_string(a) + "] = " +
                                std::to_string(n_cells_[a]) + " < 8");
            h_[a] = (domain_.upper[a] - domain_.lower[a]) / n_cells_[a];
            n_nodes_[a] = n_cells_[a] + 1;
        }
        if (domain_.dim == 1) {
            n_nodes_[1] = 1;
            n_cells_[1] = 0;
            h_[1] = 1.0;
        }
        const int n = size();
        node_class_.resize(n);
        normal_.assign(n, {0.0, 0.0});
        weights_.resize(n);
        for (int a = 0; a < 2; ++a) {
            w1d_[a].assign(n_nodes_[a], h_[a]);
            if (domain_.dim > a || a == 0) {
                w1d_[a].front() = 0.5 * h_[a];
                w1d_[a].back() = 0.5 * h_[a];
            }
        }
        if (domain_.dim == 1) w1d_[1].assign(1, 1.0);

        for (int j = 0; j < n_nodes_[1]; ++j) {
            for (int i = 0; i < n_nodes_[0]; ++i) {
                const int id = i + j * n_nodes_[0];
                const bool bx = (i == 0 || i == n_cells_[0]);
                const bool by = domain_.dim == 2 && (j == 0 || j == n_cells_[1]);
                std::array<double, 2> nu{0.0, 0.0};
                if (bx) nu[0] = (i == 0) ? -1.0 : 1.0;
                if (by) nu[1] = (j == 0) ? -1.0 : 1.0;
                if (bx && by) {
                    // corner: normalized sum of the adjacent face normals
                    const double s = std::sqrt(2.0);
                    nu[0] /= s;
                    nu[1] /= s;
                    node_class_[id] = NodeClass::corner;
                } else if (bx || by) {
                    node_class_[id] = NodeClass::face;
                } else {
                    node_class_[id] = NodeClass::interior;
                }
                normal_[id] = nu;
                weights_[id] = w1d_[0][i] * w1d_[1][j];
            }
        }
    }

    const BoxDomain& domain() const { return domain_; }
    int dim() const { return domain_.dim; }
    int n_cells(int axis) const { return n_cells_[axis]; }
    int n_nodes(int axis) const { return n_nodes_[axis]; }
    double h(int axis) const { return h_[axis]; }
    int size() const { return n_nodes_[0] * n_nodes_[1]; }

    int index(int i, int j = 0) const { return i + j * n_nodes_[0]; }
    std::array<int, 2> multi_index(int id) const { return {id % n_nodes_[0], id / n_nodes_[0]}; }

    std::array<double, 2> coord(int id) const {
        const auto ij = multi_index(id);
        return {domain_.lower[0] + ij[0] * h_[0],
                domain_.dim == 2 ? domain_.lower[1] + ij[1] * h_[1] : 0.0};
    }

    NodeClass node_class(int id) const { return node_class_[id]; }
    const std::array<double, 2>& normal(int id) const { return normal_[id]; }

    /// Trapezoidal tensor quadrature weight of a node (= dual cell volume).
    double weight(int id) const { return weights_[id]; }
    const std::vector<double>& weights() const { return weights_; }
    /// 1D trapezoid weights along one axis (used as finite-volume face areas).
    const std::vector<double>& weights_1d(int axis) const { return w1d_[axis]; }

    /// Reflected neighbor index along an axis: ghost nodes produced by even
    /// reflection about the boundary, so that the discrete normal derivative
    /// vanishes on faces.
    int reflect(int i, int axis) const {
        if (i < 0) return -i;
        if (i > n_cells_[axis]) return 2 * n_cells_[axis] - i;
        return i;
    }

  private:
    BoxDomain domain_;
    std::array<int, 2> n_cells_{};
    std::array<int, 2> n_nodes_{1, 1};
    std::array<double, 2> h_{1.0, 1.0};
    std::vector<NodeClass> node_class_;
    std::vector<std::array<double, 2>> normal_;
    std::vector<double> weights_;
    std::array<std::vector<double>, 2> w1d_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(const BoxDomain& domain, std::array<int, 2> n_cells) {
    return std::make_shared<const Grid>(domain, n_cells);
}

inline GridPtr build_grid(const BoxDomain& domain, int n_cells) {
    return build_grid(domain, {n_cells, domain.dim == 2 ? n_cells : 0});
}

} // namespace harnack
