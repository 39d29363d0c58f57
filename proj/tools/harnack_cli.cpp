// Scenario runner: parses structured-text scenario files, runs the heat /
// adjoint solvers and the estimate battery, and emits CSV/JSON reports.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harnack_lab/calibrate.hpp"
#include "harnack_lab/harnack_lab.hpp"

namespace {

int default_jobs() {
    if (const char* env = std::getenv("HARNACK_LAB_JOBS")) {
        const int j = std::atoi(env);
        if (j >= 1) return j;
    }
    return 1;
}

harnack::ReportFormat parse_format(const std::string& f) {
    if (f == "csv") return harnack::ReportFormat::csv;
    if (f == "json") return harnack::ReportFormat::json;
    throw harnack::ValidationError("unknown report format '" + f + "' (csv or json)");
}

harnack::ToleranceTable load_table(const std::string& path) {
    return path.empty() ? harnack::ToleranceTable::defaults()
                        : harnack::ToleranceTable::load(path);
}

void write_stream_or_file(const std::string& path,
                          const std::function<void(std::ostream&)>& writer) {
    if (path.empty()) {
        writer(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw harnack::IoError("cannot open output " + path);
    writer(out);
}

/// Shared by `run` and `report`: execute configs sequentially, emit a merged
/// report, optionally dump per-node plot data.
int run_and_emit(const std::vector<std::string>& paths, const std::string& format,
                 const std::string& output, const std::string& plot_output, bool plot_data,
                 const std::string& tolerance_path) {
    const harnack::ToleranceTable table = load_table(tolerance_path);
    harnack::BatchOutcome batch;
    std::vector<harnack::ScenarioResult> results;
    for (const auto& path : paths) {
        try {
            const harnack::ScenarioConfig cfg = harnack::parse_config(path);
            results.push_back(harnack::run_scenario(cfg, table));
            batch.reports.push_back(results.back().report);
        } catch (const std::exception& e) {
            batch.errors.push_back(path + ": " + e.what());
        }
    }
    bool any_fail = false;
    for (const auto& rep : batch.reports) any_fail = any_fail || !rep.all_passed();
    batch.exit_code = !batch.errors.empty() ? 2 : any_fail ? 1 : 0;

    write_stream_or_file(output,
                         [&](std::ostream& out) { emit_batch(batch, parse_format(format), out); });
    if (plot_data) {
        write_stream_or_file(plot_output, [&](std::ostream& out) {
            for (const auto& res : results) harnack::emit_plot_data(res, out);
        });
    }
    for (const auto& err : batch.errors) std::cerr << "error: " << err << "\n";
    return batch.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heat-flow estimate lab: scenario runner and report generator"};
    app.require_subcommand(1);

    std::vector<std::string> configs;
    std::string format = "csv", output, plot_output, tolerance_path;
    bool plot_data = false;
    int jobs = default_jobs();

    auto add_io = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "report format: csv or json");
        cmd->add_option("--output,-o", output, "report output path (default stdout)");
        cmd->add_option("--tolerances", tolerance_path, "tolerance table JSON");
    };

    CLI::App* run = app.add_subcommand("run", "run scenario files and report margins");
    run->add_option("configs", configs, "scenario files")->required();
    add_io(run);
    run->add_flag("--plot-data", plot_data, "also dump per-node fields per checkpoint");
    run->add_option("--plot-output", plot_output, "plot-data output path (default stdout)");

    CLI::App* rep = app.add_subcommand("report", "alias of run with report emphasis");
    rep->add_option("configs", configs, "scenario files")->required();
    add_io(rep);
    rep->add_flag("--plot-data", plot_data, "also dump per-node fields per checkpoint");
    rep->add_option("--plot-output", plot_output, "plot-data output path (default stdout)");

    CLI::App* batch = app.add_subcommand("batch", "run scenarios concurrently, merged report");
    batch->add_option("configs", configs, "scenario files")->required();
    batch->add_option("--jobs,-j", jobs, "worker threads (default HARNACK_LAB_JOBS or 1)");
    add_io(batch);

    CLI::App* calib = app.add_subcommand("calibrate", "re-derive the tolerance table");
    std::string calib_output = "tolerances.json";
    calib->add_option("--output,-o", calib_output, "tolerance table output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run) || app.got_subcommand(rep))
            return run_and_emit(configs, format, output, plot_output, plot_data, tolerance_path);
        if (app.got_subcommand(batch)) {
            const harnack::BatchOutcome outcome =
                harnack::run_batch(configs, jobs, load_table(tolerance_path));
            write_stream_or_file(output, [&](std::ostream& out) {
                emit_batch(outcome, parse_format(format), out);
            });
            for (const auto& err : outcome.errors) std::cerr << "error: " << err << "\n";
            return outcome.exit_code;
        }
        if (app.got_subcommand(calib)) {
            const harnack::ToleranceTable table = harnack::run_calibration();
            table.save(calib_output);
            std::cout << "wrote " << calib_output << " (version " << table.version() << ")\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
