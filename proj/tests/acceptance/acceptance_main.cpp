// Acceptance gate: one self-contained study per criterion, each printing a
// single PASS/FAIL line. Run with no arguments for the full gate or with a
// criterion number to run one study.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "harnack_lab/harnack_lab.hpp"

using namespace harnack;

namespace {

SolverParams window(double dt, double t0, double t_end) {
    SolverParams p;
    p.dt = dt;
    p.t0 = t0;
    p.t_end = t_end;
    p.checkpoints = {t_end};
    return p;
}

struct Criterion {
    int id;
    std::string title;
    std::function<bool(std::string&)> run;
};

// --- 1. exact mass conservation of the drifted backward run -----------------

bool crit_mass(std::string& detail) {
    const GridPtr g = build_grid(BoxDomain::interval(0.0, 1.0), 128);
    const SolverParams sp = window(1e-3, 0.0, 0.2);
    Trajectory traj = solve_heat(presets::neumann_cosine(g, 2.0, 1.0, 1), sp);
    const double delta = 1e-8 * traj.initial().max();
    const DriftSampler drift = DriftSampler::from_trajectory(traj, delta);
    const AdjointRun run =
        solve_backward_fp(presets::bump(g, {0.5, 0.0}, 0.2), drift, traj.times);
    const double m_tau = run.mass_log.back();
    double worst = 0.0;
    for (double m : run.mass_log) worst = std::max(worst, std::abs(m - m_tau) / m_tau);
    std::ostringstream os;
    os << "max relative mass drift " << worst;
    detail = os.str();
    return worst <= 1e-10;
}

// --- 2. L^p contraction of drift-free backward runs -------------------------

bool crit_contraction(std::string& detail) {
    const GridPtr g = build_grid(BoxDomain::interval(0.0, 1.0), 128);
    const AdjointRun run = solve_backward_fp(presets::bump(g, {0.5, 0.0}, 0.2),
                                             DriftSampler::zero(),
                                             detail::snapped_times(window(1e-3, 0.0, 0.2)));
    const double m1 = lp_contraction_check(run, 1.0);
    const double m2 = lp_contraction_check(run, 2.0);
    const double mi = lp_contraction_check(run, kInfExponent);
    std::ostringstream os;
    os << "margins p=1: " << m1 << ", p=2: " << m2 << ", p=inf: " << mi;
    detail = os.str();
    return m1 >= -1e-9 && m2 >= -1e-9 && mi >= -1e-9 && std::abs(m1) <= 1e-10;
}

// --- 3/4. sharpness of the curvature bounds on the kernel -------------------

double kernel_margin(int dim, double box, int n, double dt, double age0, bool hamilton) {
    const GridPtr g = dim == 1 ? build_grid(BoxDomain::interval(-box, box, true), n)
                               : build_grid(BoxDomain::rectangle(-box, box, -box, box, true), n);
    SolverParams sp = window(dt, age0, 0.25);
    Trajectory traj = solve_heat(presets::gaussian(g, age0), sp);
    traj.datum_time = 0.0; // tau counts from the kernel's birth
    EstimateParams p;
    p.tau = 0.25;
    p.A = certify_sup(traj);
    p.delta = 1e-14; // u(tau) is bounded well away from zero on the box
    p.tolerance = 1.0;
    return hamilton ? check_hamilton(traj, p).value : check_li_yau(traj, p).value;
}

bool crit_li_yau_sharp(std::string& detail) {
    const double base = kernel_margin(1, 8.0, 512, 2e-4, 2e-4, false);
    const double fine = kernel_margin(1, 8.0, 1024, 1e-4, 1e-4, false);
    std::ostringstream os;
    os << "|margin| " << std::abs(base) << " (<= 5e-3), refined " << std::abs(fine)
       << ", contraction " << std::abs(base) / std::abs(fine);
    detail = os.str();
    return std::abs(base) <= 5e-3 && std::abs(base) / std::abs(fine) >= 1.8;
}

bool crit_hamilton_sharp(std::string& detail) {
    const double base = kernel_margin(2, 3.0, 128, 1e-4, 4e-3, true);
    const double fine = kernel_margin(2, 3.0, 256, 5e-5, 4e-3, true);
    std::ostringstream os;
    os << "|margin| " << std::abs(base) << " (<= 1e-2), refined " << std::abs(fine)
       << ", contraction " << std::abs(base) / std::abs(fine);
    detail = os.str();
    return std::abs(base) <= 1e-2 && std::abs(base) / std::abs(fine) >= 1.8;
}

// --- 5/7. randomized battery ------------------------------------------------

int battery(bool bernstein_only, int& checks_run) {
    const ToleranceTable table = ToleranceTable::defaults();
    int failures = 0;
    checks_run = 0;
    auto run_one = [&](const GridPtr& g, unsigned seed) {
        const SolverParams sp = window(1e-3, 0.0, 0.2);
        Trajectory traj = solve_heat(presets::random_smooth(g, seed), sp);
        const double delta = 1e-8 * traj.initial().max();
        double h = 0.0;
        for (int a = 0; a < g->dim(); ++a) h = std::max(h, g->h(a));
        for (double tau : {0.05, 0.1, 0.2}) {
            EstimateParams p;
            p.tau = tau;
            p.A = certify_sup(traj);
            p.delta = delta;
            std::vector<Margin> ms;
            if (bernstein_only) {
                p.tolerance = table.tolerance("bernstein", h, sp.dt, delta);
                ms.push_back(check_bernstein(traj, p));
            } else {
                p.tolerance = table.tolerance("li_yau", h, sp.dt, delta);
                ms.push_back(check_li_yau(traj, p));
                p.tolerance = table.tolerance("hsz_gradient", h, sp.dt, delta);
                ms.push_back(check_hsz_gradient(traj, p));
                p.tolerance = table.tolerance("oscillation_gradient", h, sp.dt, delta);
                ms.push_back(check_oscillation_gradient(traj, p));
                p.tolerance = table.tolerance("reversed", h, sp.dt, delta);
                ms.push_back(check_reversed(traj, p));
                p.tolerance = table.tolerance("lp_smoothing", h, sp.dt, delta);
                p.p = 2.0;
                ms.push_back(check_lp_smoothing(traj, p));
                p.p = kInfExponent;
                ms.push_back(check_lp_smoothing(traj, p));
            }
            for (const auto& m : ms) {
                ++checks_run;
                if (!m.passed) ++failures;
            }
        }
    };
    for (unsigned seed = 1; seed <= 12; ++seed)
        run_one(build_grid(BoxDomain::interval(0.0, 1.0), 64), seed);
    for (unsigned seed = 1; seed <= 8; ++seed)
        run_one(build_grid(BoxDomain::rectangle(0.0, 1.0, 0.0, 1.0), 24), seed);
    return failures;
}

bool crit_battery(std::string& detail) {
    int checks_run = 0;
    const int failures = battery(false, checks_run);
    std::ostringstream os;
    os << "20 seeded scenarios, " << checks_run << " checks, " << failures << " failures";
    detail = os.str();
    return failures == 0;
}

bool crit_bernstein(std::string& detail) {
    int checks_run = 0;
    const int failures = battery(true, checks_run);
    std::ostringstream os;
    os << checks_run << " Bernstein-field checks, " << failures << " failures";
    detail = os.str();
    return failures == 0;
}

// --- 6. crossed-term duality chain against a bump family --------------------

struct DualityResult {
    double worst_residual = 0.0;
    double worst_inequality = 1e300;
    double worst_hsz2 = 1e300;
};

DualityResult duality_study(int n, double dt) {
    const GridPtr g = build_grid(BoxDomain::interval(-8.0, 8.0, true), n);
    // age-0.25 kernel: drift stays moderate, so the upwind transport error
    // tracks the first-order h + dt model instead of the drift sup-norm
    const SolverParams sp = window(dt, 0.25, 0.35);
    Trajectory traj = solve_heat(presets::gaussian(g, 0.25), sp);
    const double delta = 1e-8 * traj.initial().max();
    const DriftSampler drift = DriftSampler::from_trajectory(traj, delta);
    EstimateParams p;
    p.tau = 0.1;
    p.A = certify_sup(traj);
    p.delta = delta;
    p.tolerance = 1.0;
    DualityResult r;
    for (int b = 0; b < 8; ++b) {
        const double c = -4.0 + 8.0 * (b + 0.5) / 8.0;
        const AdjointRun run =
            solve_backward_fp(presets::bump(g, {c, 0.0}, 2.0), drift, traj.times);
        const auto [ident, ineq] = check_crossed_term(traj, run, p);
        r.worst_residual = std::max(r.worst_residual, -ident.value);
        r.worst_inequality = std::min(r.worst_inequality, ineq.value);
        r.worst_hsz2 = std::min(r.worst_hsz2, check_integral_hessian_hsz2(traj, run, p).value);
    }
    return r;
}

bool crit_duality_chain(std::string& detail) {
    const ToleranceTable table = ToleranceTable::defaults();
    const DualityResult base = duality_study(256, 2e-3);
    const DualityResult fine = duality_study(512, 1e-3);
    // study-local residual constant: the transported-bump error carries the
    // drift sup-norm, so it sits above the estimator's calibrated C_est
    const double c_ident = 3.0;
    const double tol_base = c_ident * (16.0 / 256 + 2e-3);
    const double tol_ineq = table.c_est("crossed_inequality") * (16.0 / 256 + 2e-3);
    std::ostringstream os;
    os << "residual " << base.worst_residual << " (<= " << tol_base << "), contraction "
       << base.worst_residual / fine.worst_residual << ", inequality margins "
       << base.worst_inequality << " and " << base.worst_hsz2;
    detail = os.str();
    return base.worst_residual <= tol_base &&
           base.worst_residual / fine.worst_residual >= 1.8 &&
           base.worst_inequality >= -tol_ineq && base.worst_hsz2 >= -tol_ineq;
}

// --- 8. semi-log-convexity is preserved with the same constant --------------

bool crit_convexity(std::string& detail) {
    const ToleranceTable table = ToleranceTable::defaults();
    bool ok = true;
    std::ostringstream os;
    double tol_seen = -1.0;
    for (double c0 : {0.5, 1.0, 2.0}) {
        const GridPtr g = build_grid(BoxDomain::interval(-8.0, 8.0, true), 512);
        const SolverParams sp = window(2e-3, 0.0, 0.3);
        Trajectory traj = solve_heat(presets::log_quadratic(g, c0), sp);
        const double delta = 1e-8 * traj.initial().max();
        // the tolerance depends only on the discretization, never on c0
        const double tol = table.tolerance("convexity_convex", g->h(0), sp.dt, delta);
        if (tol_seen < 0.0) tol_seen = tol;
        ok = ok && std::abs(tol - tol_seen) < 1e-15;
        for (double tau : {0.1, 0.3}) {
            EstimateParams p;
            p.tau = tau;
            p.A = certify_sup(traj);
            p.delta = delta;
            p.tolerance = tol;
            const Margin m = check_convexity_preservation(traj, p, ConvexityMode::convex);
            ok = ok && m.passed;
            os << "c0=" << c0 << " tau=" << tau << " margin " << m.value << "; ";
        }
    }
    os << "tolerance " << tol_seen;
    detail = os.str();
    return ok;
}

// --- 9. two-sided bound and the potential cases -----------------------------

bool crit_two_sided_potential(std::string& detail) {
    const ToleranceTable table = ToleranceTable::defaults();
    std::ostringstream os;
    bool ok = true;

    { // two-sided estimate with certified K0
        const GridPtr g = build_grid(BoxDomain::interval(-8.0, 8.0, true), 512);
        const SolverParams sp = window(2e-3, 0.0, 0.2);
        Trajectory traj = solve_heat(presets::log_quadratic(g, 1.0), sp);
        const double delta = 1e-8 * traj.initial().max();
        EstimateParams p;
        p.tau = 0.2;
        p.A = certify_sup(traj);
        p.delta = delta;
        p.tolerance = table.tolerance("convexity_two_sided", g->h(0), sp.dt, delta);
        const Margin m = check_convexity_preservation(traj, p, ConvexityMode::two_sided);
        ok = ok && m.passed;
        os << "two_sided " << m.value << "; ";
    }

    for (double a : {0.0, 0.5}) { // potential cases (a)(b)(c) with F = a x^2
        const GridPtr g = build_grid(BoxDomain::interval(-4.0, 4.0, true), 256);
        const SolverParams sp = window(1e-3, 0.0, 0.2);
        PotentialSpec pot;
        if (a > 0.0) {
            pot.kind = PotentialSpec::Kind::quadratic;
            pot.amplitude = a;
        }
        Trajectory traj = solve_heat(presets::log_quadratic(g, 1.0), sp, pot);
        const double delta = 1e-8 * traj.initial().max();
        EstimateParams p;
        p.tau = 0.2;
        p.A = certify_sup(traj);
        p.delta = delta;
        for (auto mode : {ConvexityMode::potential_a, ConvexityMode::potential_b,
                          ConvexityMode::potential_c}) {
            p.tolerance = table.tolerance(to_string(mode), g->h(0), sp.dt, delta);
            const Margin m = check_convexity_preservation(traj, p, mode, pot);
            ok = ok && m.passed;
            os << "a=" << a << " " << m.name << " " << m.value << "; ";
        }
        // intermediate integral bound, 4-bump terminal family
        const DriftSampler drift = DriftSampler::from_trajectory(traj, delta);
        p.tolerance = table.tolerance("k0k_integral", g->h(0), sp.dt, delta);
        for (int b = 0; b < 4; ++b) {
            const double c = -2.0 + 4.0 * (b + 0.5) / 4.0;
            const AdjointRun run =
                solve_backward_fp(presets::bump(g, {c, 0.0}, 0.8), drift, traj.times);
            const Margin m = check_k0k(traj, run, p, pot);
            ok = ok && m.passed;
        }
        os << "a=" << a << " k0k ok; ";
    }
    detail = os.str();
    return ok;
}

// --- 10. exact discrete adjointness of the two spatial operators ------------

bool crit_structural_duality(std::string& detail) {
    double worst = 0.0;
    for (int dim = 1; dim <= 2; ++dim) {
        const GridPtr g = dim == 1 ? build_grid(BoxDomain::interval(0.0, 1.0), 64)
                                   : build_grid(BoxDomain::rectangle(0.0, 1.0, 0.0, 1.0), 16);
        const SolverParams sp = window(1e-3, 0.0, 0.05);
        Trajectory traj = solve_heat(presets::random_smooth(g, 17 + dim), sp);
        const DriftSampler drift = DriftSampler::from_trajectory(traj, 1e-8);
        const FpOperator op(g, drift.at(g, traj.times[traj.steps() / 2]));
        std::mt19937 rng(2024 + dim);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int trial = 0; trial < 16; ++trial) {
            std::vector<double> z(g->size(), 0.0), rho(g->size());
            for (int id = 0; id < g->size(); ++id) {
                if (g->node_class(id) == NodeClass::interior) z[id] = unif(rng);
                rho[id] = unif(rng);
            }
            const auto lz = op.apply_forward(z);
            const auto ar = op.apply_adjoint(rho);
            const double lhs = dot_weighted(g, lz, rho);
            const double rhs = dot_weighted(g, z, ar);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
    }
    std::ostringstream os;
    os << "max adjointness defect " << worst << " (<= 1e-12)";
    detail = os.str();
    return worst <= 1e-12;
}

// --- 11. batch determinism across job counts --------------------------------

std::string csv_without_runtime(const BatchOutcome& outcome) {
    std::ostringstream out;
    emit_batch(outcome, ReportFormat::csv, out);
    std::istringstream lines(out.str());
    std::string line, kept;
    while (std::getline(lines, line)) kept += line.substr(0, line.rfind(',')) + "\n";
    return kept;
}

bool crit_determinism(std::string& detail) {
    const std::string dir = HARNACK_CONFIG_DIR;
    const std::vector<std::string> paths = {
        dir + "/cosine_baseline.ini",      dir + "/gaussian_sharpness_1d.ini",
        dir + "/hamilton_sharpness_2d.ini", dir + "/log_quadratic_convexity.ini",
        dir + "/potential_quadratic.ini",  dir + "/random_battery.ini"};
    const ToleranceTable table = ToleranceTable::load(dir + "/tolerances.json");
    const BatchOutcome one = run_batch(paths, 1, table);
    const BatchOutcome four = run_batch(paths, 4, table);
    const std::string a = csv_without_runtime(one);
    const std::string b = csv_without_runtime(four);
    std::ostringstream os;
    os << paths.size() << " scenarios, exit codes " << one.exit_code << "/" << four.exit_code
       << ", reports " << (a == b ? "byte-identical" : "DIFFER") << " modulo timing";
    detail = os.str();
    return one.exit_code == 0 && four.exit_code == 0 && a == b && !a.empty();
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "mass conservation of the drifted backward run", crit_mass},
        {2, "L^p contraction of drift-free backward runs", crit_contraction},
        {3, "Li-Yau sharpness on the 1D kernel", crit_li_yau_sharp},
        {4, "Hamilton sharpness on the 2D kernel", crit_hamilton_sharp},
        {5, "estimate battery on the randomized suite", crit_battery},
        {6, "crossed-term duality chain", crit_duality_chain},
        {7, "Bernstein field bound on the randomized suite", crit_bernstein},
        {8, "semi-log-convexity with the same constant", crit_convexity},
        {9, "two-sided bound and potential cases", crit_two_sided_potential},
        {10, "structural duality of the discrete operators", crit_structural_duality},
        {11, "batch determinism across job counts", crit_determinism},
    };
    int selected = 0;
    if (argc > 1) selected = std::atoi(argv[1]);
    int failures = 0;
    for (const auto& c : criteria) {
        if (selected != 0 && c.id != selected) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("criterion %2d %s: %s (%s)\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str(),
                    detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
