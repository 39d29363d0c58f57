#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "harnack_lab/calculus.hpp"
#include "harnack_lab/presets.hpp"

using namespace harnack;
using std::numbers::pi;

namespace {

ScalarField sample(const GridPtr& g, double (*f)(double, double)) {
    ScalarField out(g);
    for (int id = 0; id < g->size(); ++id) {
        const auto x = g->coord(id);
        out.values[id] = f(x[0], x[1]);
    }
    return out;
}

/// Max error over nodes where the stencil never reaches across a face.
double interior_max_err(const GridPtr& g, const std::vector<double>& got,
                        const std::vector<double>& want) {
    double m = 0.0;
    for (int id = 0; id < g->size(); ++id)
        if (g->node_class(id) == NodeClass::interior) m = std::max(m, std::abs(got[id] - want[id]));
    return m;
}

} // namespace

TEST_CASE("gradient and hessian are exact on quadratics away from faces") {
    const GridPtr g = build_grid(BoxDomain::rectangle(-1.0, 1.0, -1.0, 1.0), 16);
    const ScalarField f = sample(g, [](double x, double y) { return 2.0 * x * x - x * y + 3.0 * y; });
    const VectorField df = gradient(f);
    const SymMatrixField d2f = hessian(f);
    for (int id = 0; id < g->size(); ++id) {
        if (g->node_class(id) != NodeClass::interior) continue;
        const auto x = g->coord(id);
        REQUIRE(df.at(id, 0) == Catch::Approx(4.0 * x[0] - x[1]).margin(1e-12));
        REQUIRE(df.at(id, 1) == Catch::Approx(-x[0] + 3.0).margin(1e-12));
        REQUIRE(d2f.at(id, 0) == Catch::Approx(4.0).margin(1e-10));
        REQUIRE(d2f.at(id, 1) == Catch::Approx(-1.0).margin(1e-10));
        REQUIRE(d2f.at(id, 2) == Catch::Approx(0.0).margin(1e-10));
    }
}

TEST_CASE("normal derivative vanishes exactly on faces") {
    const GridPtr g = build_grid(BoxDomain::rectangle(0.0, 1.0, 0.0, 2.0), 12);
    const ScalarField f = presets::neumann_cosine(g, 2.0, 1.0, 2, 1);
    const VectorField df = gradient(f);
    for (int id = 0; id < g->size(); ++id) {
        const auto nu = g->normal(id);
        if (g->node_class(id) == NodeClass::interior) continue;
        const double dn = df.at(id, 0) * nu[0] + df.at(id, 1) * nu[1];
        REQUIRE(dn == Catch::Approx(0.0).margin(1e-14));
    }
}

TEST_CASE("laplacian equals the trace of the hessian") {
    const GridPtr g = build_grid(BoxDomain::rectangle(0.0, 1.0, 0.0, 1.0), 10);
    const ScalarField f = presets::random_smooth(g, 7);
    const ScalarField lap = laplacian(f);
    const SymMatrixField d2f = hessian(f);
    for (int id = 0; id < g->size(); ++id)
        REQUIRE(lap.values[id] == Catch::Approx(d2f.trace(id)).margin(1e-13));
}

TEST_CASE("stencils converge at second order on a Neumann eigenmode") {
    // error(h) / error(h/2) >= 3.5 for a second-order stencil
    auto lap_err = [](int n) {
        const GridPtr g = build_grid(BoxDomain::interval(0.0, 1.0), n);
        const ScalarField f = presets::neumann_cosine(g, 2.0, 1.0, 3);
        const ScalarField lap = laplacian(f);
        ScalarField want(g);
        for (int id = 0; id < g->size(); ++id)
            want.values[id] = -9.0 * pi * pi * (f.values[id] - 2.0);
        double m = 0.0;
        for (int id = 0; id < g->size(); ++id)
            m = std::max(m, std::abs(lap.values[id] - want.values[id]));
        return m;
    };
    REQUIRE(lap_err(32) / lap_err(64) >= 3.5);

    auto grad_err = [](int n) {
        const GridPtr g = build_grid(BoxDomain::interval(0.0, 1.0), n);
        const ScalarField f = presets::neumann_cosine(g, 2.0, 1.0, 3);
        const VectorField df = gradient(f);
        std::vector<double> got(g->size()), want(g->size());
        for (int id = 0; id < g->size(); ++id) {
            got[id] = df.at(id, 0);
            want[id] = -3.0 * pi * std::sin(3.0 * pi * g->coord(id)[0]);
        }
        return interior_max_err(g, got, want);
    };
    REQUIRE(grad_err(32) / grad_err(64) >= 3.5);
}

TEST_CASE("hopf_cole rejects fields not positive after the shift") {
    const GridPtr g = build_grid(BoxDomain::interval(0.0, 1.0), 8);
    ScalarField u(g, -1.0);
    REQUIRE_THROWS_AS(hopf_cole(u, 0.5), NonPositiveShiftedField);
    u = ScalarField(g, 1.0);
    const ScalarField v = hopf_cole(u, 0.0);
    REQUIRE(v.values[0] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("extreme eigenvalues match the closed 2x2 form") {
    const GridPtr g = build_grid(BoxDomain::rectangle(0.0, 1.0, 0.0, 1.0), 8);
    SymMatrixField m(g);
    for (int id = 0; id < g->size(); ++id) {
        m.at(id, 0) = 3.0;
        m.at(id, 1) = 1.0;
        m.at(id, 2) = 1.0;
    }
    const auto [lo, hi] = min_max_eigenvalue(m);
    // eigenvalues of [[3,1],[1,1]]: 2 +- sqrt(2)
    REQUIRE(lo.values[0] == Catch::Approx(2.0 - std::sqrt(2.0)).margin(1e-13));
    REQUIRE(hi.values[0] == Catch::Approx(2.0 + std::sqrt(2.0)).margin(1e-13));
}

TEST_CASE("bochner residual is small for smooth fields and shrinks under refinement") {
    auto resid = [](int n) {
        const GridPtr g = build_grid(BoxDomain::interval(0.0, 1.0), n);
        const ScalarField v = presets::neumann_cosine(g, 0.0, 0.3, 2);
        const ScalarField r = bochner_residual(v);
        double m = 0.0;
        for (int id = 0; id < g->size(); ++id)
            if (g->node_class(id) == NodeClass::interior)
                m = std::max(m, std::abs(r.values[id]));
        return m;
    };
    REQUIRE(resid(64) < 2.0);
    REQUIRE(resid(64) / resid(128) >= 3.0);
}

TEST_CASE("lp norms: weighted integral values and the max norm") {
    const GridPtr g = build_grid(BoxDomain::interval(0.0, 1.0), 128);
    const ScalarField one(g, 2.0);
    REQUIRE(lp_norm(one, 2.0) == Catch::Approx(2.0).epsilon(1e-12));
    REQUIRE(lp_norm(one, kInfExponent) == Catch::Approx(2.0));
    const ScalarField f = presets::neumann_cosine(g, 0.0, 1.0, 1);
    // ||cos(pi x)||_2^2 = 1/2 on [0,1]
    REQUIRE(lp_norm(f, 2.0) == Catch::Approx(std::sqrt(0.5)).epsilon(1e-4));
    REQUIRE_THROWS_AS(lp_norm(f, 0.5), InvalidExponent);
}
