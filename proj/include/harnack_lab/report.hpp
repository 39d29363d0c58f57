#pragma once

#include <atomic>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "harnack_lab/calculus.hpp"
#include "harnack_lab/scenario.hpp"

namespace harnack {

namespace detail {

/// Shortest round-trippable decimal; deterministic across runs and thread
/// counts (no locale involvement).
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

} // namespace detail

inline const char* kCsvHeader =
    "scenario_id,check_name,tau,margin,tolerance,passed,worst_node,worst_value,runtime_ms";

inline void emit_csv_rows(const EstimateReport& rep, std::ostream& out) {
    for (const auto& r : rep.records) {
        const Margin& m = r.margin;
        out << rep.scenario_id << ',' << m.name << ',' << detail::fmt(m.tau) << ','
            << detail::fmt(m.value) << ',' << detail::fmt(m.tolerance) << ','
            << (m.passed ? "true" : "false") << ',' << m.worst_node << ','
            << detail::fmt(m.worst_value) << ',' << detail::fmt(r.runtime_ms) << '\n';
    }
}

inline nlohmann::json report_to_json(const EstimateReport& rep) {
    nlohmann::json j;
    j["scenario_id"] = rep.scenario_id;
    j["config_hash"] = rep.config_hash;
    j["tolerance_version"] = rep.tolerance_version;
    j["diagnostics"] = {{"mass_drift", rep.mass_drift},
                        {"min_u", rep.min_u},
                        {"sup_bound", rep.sup_bound},
                        {"wall_ms", rep.wall_ms}};
    if (!rep.delta_stability.empty()) j["delta_stability"] = rep.delta_stability;
    j["checks"] = nlohmann::json::array();
    for (const auto& r : rep.records)
        j["checks"].push_back({{"check_name", r.margin.name},
                               {"tau", r.margin.tau},
                               {"margin", r.margin.value},
                               {"tolerance", r.margin.tolerance},
                               {"passed", r.margin.passed},
                               {"worst_node", r.margin.worst_node},
                               {"worst_value", r.margin.worst_value},
                               {"runtime_ms", r.runtime_ms}});
    return j;
}

enum class ReportFormat { csv, json };

inline void emit_report(const EstimateReport& rep, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::csv) {
        out << kCsvHeader << '\n';
        emit_csv_rows(rep, out);
    } else {
        out << report_to_json(rep).dump(2) << '\n';
    }
    if (!out) throw IoError("report write failed");
}

inline void emit_report(const EstimateReport& rep, ReportFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open report output " + path);
    emit_report(rep, format, out);
}

/// Per-node field dump per checkpoint: x[,y], u, log_u, grad_sq, lap_log_u,
/// lambda_min, lambda_max. One row per node per checkpoint.
inline void emit_plot_data(const ScenarioResult& res, std::ostream& out) {
    const GridPtr g = res.traj.grid();
    out << "scenario_id,tau," << (g->dim() == 2 ? "x,y" : "x")
        << ",u,log_u,grad_sq,lap_log_u,lambda_min,lambda_max\n";
    for (double checkpoint : res.cfg.solver.checkpoints) {
        const double tau = checkpoint - res.traj.datum_time;
        const ScalarField& u = res.traj.fields[res.traj.index_of(checkpoint)];
        const ScalarField v = hopf_cole(u, res.delta);
        const VectorField dv = gradient(v);
        const SymMatrixField d2v = hessian(v);
        const ScalarField lap = laplacian(v);
        const auto [lmin, lmax] = min_max_eigenvalue(d2v);
        for (int id = 0; id < g->size(); ++id) {
            const auto x = g->coord(id);
            out << res.report.scenario_id << ',' << detail::fmt(tau) << ','
                << detail::fmt(x[0]);
            if (g->dim() == 2) out << ',' << detail::fmt(x[1]);
            out << ',' << detail::fmt(u.values[id]) << ',' << detail::fmt(v.values[id]) << ','
                << detail::fmt(dv.norm_sq(id)) << ',' << detail::fmt(lap.values[id]) << ','
                << detail::fmt(lmin.values[id]) << ',' << detail::fmt(lmax.values[id]) << '\n';
        }
    }
    if (!out) throw IoError("plot-data write failed");
}

struct BatchOutcome {
    int exit_code = 0; // 0 all passed, 1 some margin failed, 2 config/runtime error
    std::vector<EstimateReport> reports;       // in path order, failures skipped
    std::vector<std::string> errors;           // "path: what"
};

/// Run many scenario files with scenario-level parallelism. Reports are
/// merged in path order, so the output is independent of the job count.
inline BatchOutcome run_batch(const std::vector<std::string>& paths, int jobs,
                              const ToleranceTable& table = ToleranceTable::defaults()) {
    BatchOutcome out;
    const int n = static_cast<int>(paths.size());
    std::vector<EstimateReport> reports(n);
    std::vector<std::string> errors(n);
    std::vector<char> ok(n, 0);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                const ScenarioConfig cfg = parse_config(paths[i]);
                reports[i] = run_scenario(cfg, table).report;
                ok[i] = 1;
            } catch (const std::exception& e) {
                errors[i] = paths[i] + ": " + e.what();
            }
        }
    };
    jobs = std::max(1, std::min(jobs, n));
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    bool any_fail = false, any_error = false;
    for (int i = 0; i < n; ++i) {
        if (ok[i]) {
            any_fail = any_fail || !reports[i].all_passed();
            out.reports.push_back(std::move(reports[i]));
        } else {
            any_error = true;
            out.errors.push_back(errors[i]);
        }
    }
    out.exit_code = any_error ? 2 : any_fail ? 1 : 0;
    return out;
}

inline void emit_batch(const BatchOutcome& batch, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::csv) {
        out << kCsvHeader << '\n';
        for (const auto& rep : batch.reports) emit_csv_rows(rep, out);
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& rep : batch.reports) j.push_back(report_to_json(rep));
        out << j.dump(2) << '\n';
    }
    if (!out) throw IoError("batch report write failed");
}

} // namespace harnack
