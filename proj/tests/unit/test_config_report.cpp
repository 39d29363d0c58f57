#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "harnack_lab/calibrate.hpp"
#include "harnack_lab/harnack_lab.hpp"

using namespace harnack;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/harnack_test_") + name + ".ini";
    std::ofstream out(path);
    out << content;
    return path;
}

ScenarioConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config_stream("<mem>", in, text);
}

const std::string kMinimal = R"(
[scenario]
id = minimal
[domain]
dim = 1
lower = 0
upper = 1
[grid]
n_cells = 32
[initial]
preset = neumann_cosine
[solver]
dt = 1e-3
t_end = 0.1
checkpoints = 0.1
[estimates]
checks = li_yau
)";

} // namespace

TEST_CASE("minimal config parses with documented defaults") {
    const ScenarioConfig cfg = parse_text(kMinimal);
    REQUIRE(cfg.id == "minimal");
    REQUIRE(cfg.domain.dim == 1);
    REQUIRE(cfg.n_cells[0] == 32);
    REQUIRE_FALSE(cfg.delta.has_value()); // filled later as 1e-8 * max u(0)
    REQUIRE(cfg.p == 2.0);
    REQUIRE(cfg.bumps == 8);
    REQUIRE(cfg.checks == std::vector<std::string>{"li_yau"});
    REQUIRE(cfg.config_hash != 0);
}

TEST_CASE("checkpoint at the datum time is rejected") {
    std::string text = kMinimal;
    const auto pos = text.find("checkpoints = 0.1");
    text.replace(pos, 17, "checkpoints = 0.0");
    try {
        parse_text(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(std::string(e.what()).find("estimates undefined at tau=0") != std::string::npos);
    }
}

TEST_CASE("unknown preset and estimate names list the valid ones") {
    std::string text = kMinimal;
    text.replace(text.find("preset = neumann_cosine"), 23, "preset = wavelet");
    try {
        parse_text(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("wavelet") != std::string::npos);
        REQUIRE(msg.find("neumann_cosine") != std::string::npos);
        REQUIRE(msg.find("random_smooth") != std::string::npos);
    }

    text = kMinimal;
    text.replace(text.find("checks = li_yau"), 15, "checks = li_yau bogus_check");
    try {
        parse_text(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("bogus_check") != std::string::npos);
        REQUIRE(msg.find("hamilton") != std::string::npos);
    }
}

TEST_CASE("parse errors carry file and line diagnostics") {
    const std::string path = write_temp("badline", "[scenario]\nid missing equals\n");
    try {
        parse_config(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find(":2") != std::string::npos);
        REQUIRE(msg.find("key = value") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("resolution caps are enforced") {
    std::string text = kMinimal;
    text.replace(text.find("n_cells = 32"), 12, "n_cells = 2048");
    REQUIRE_THROWS_AS(parse_text(text), ValidationError);
}

TEST_CASE("csv report has the exact column order and row shape") {
    const ScenarioConfig cfg = parse_text(kMinimal);
    const ScenarioResult res = run_scenario(cfg);
    std::ostringstream out;
    emit_report(res.report, ReportFormat::csv, out);
    std::istringstream lines(out.str());
    std::string header;
    std::getline(lines, header);
    REQUIRE(header ==
            "scenario_id,check_name,tau,margin,tolerance,passed,worst_node,worst_value,runtime_ms");
    std::string row;
    int rows = 0;
    while (std::getline(lines, row)) {
        ++rows;
        REQUIRE(row.rfind("minimal,li_yau,0.1,", 0) == 0);
        REQUIRE(row.find(",true,") != std::string::npos);
    }
    REQUIRE(rows == 1);
}

TEST_CASE("empty selection produces a header-only csv") {
    std::string text = kMinimal;
    text.replace(text.find("checks = li_yau"), 15, "checks =");
    const ScenarioConfig cfg = parse_text(text);
    const ScenarioResult res = run_scenario(cfg);
    std::ostringstream out;
    emit_report(res.report, ReportFormat::csv, out);
    REQUIRE(out.str() ==
            "scenario_id,check_name,tau,margin,tolerance,passed,worst_node,worst_value,runtime_ms\n");
}

TEST_CASE("json report mirrors the csv fields") {
    const ScenarioConfig cfg = parse_text(kMinimal);
    const ScenarioResult res = run_scenario(cfg);
    const nlohmann::json j = report_to_json(res.report);
    REQUIRE(j["scenario_id"] == "minimal");
    REQUIRE(j["checks"].size() == 1);
    REQUIRE(j["checks"][0]["check_name"] == "li_yau");
    REQUIRE(j["checks"][0]["passed"] == true);
    REQUIRE(j["checks"][0].contains("worst_value"));
    REQUIRE(j["diagnostics"].contains("mass_drift"));
}

TEST_CASE("plot-data mode: one row per node per checkpoint") {
    std::string text = kMinimal;
    text.replace(text.find("n_cells = 32"), 12, "n_cells = 16"); // 17 nodes
    text.replace(text.find("checkpoints = 0.1"), 17, "checkpoints = 0.05 0.1");
    const ScenarioConfig cfg = parse_text(text);
    const ScenarioResult res = run_scenario(cfg);
    std::ostringstream out;
    emit_plot_data(res, out);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    REQUIRE(line == "scenario_id,tau,x,u,log_u,grad_sq,lap_log_u,lambda_min,lambda_max");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    REQUIRE(rows == 34);
}

TEST_CASE("identical config and seed give byte-identical csv modulo runtime") {
    std::string text = kMinimal;
    text.replace(text.find("preset = neumann_cosine"), 23, "preset = random_smooth");
    const ScenarioConfig cfg = parse_text(text);
    auto stripped_csv = [&] {
        std::ostringstream out;
        emit_report(run_scenario(cfg).report, ReportFormat::csv, out);
        std::string s = out.str(), kept;
        std::istringstream lines(s);
        std::string line;
        while (std::getline(lines, line))
            kept += line.substr(0, line.rfind(',')) + "\n"; // drop runtime_ms
        return kept;
    };
    REQUIRE(stripped_csv() == stripped_csv());
}

TEST_CASE("batch exit codes: pass, margin failure, config error") {
    const std::string good = write_temp("good", kMinimal);
    std::string fail_text = kMinimal;
    fail_text += "tolerance.li_yau = 0\n";
    // force a guaranteed-negative margin with an unreachable extra check
    fail_text.replace(fail_text.find("id = minimal"), 12, "id = forced");
    const std::string forced = write_temp("forced", fail_text);

    BatchOutcome ok = run_batch({good}, 1);
    REQUIRE(ok.exit_code == 0);
    REQUIRE(ok.reports.size() == 1);

    BatchOutcome missing = run_batch({good, "/tmp/no_such_file.ini"}, 2);
    REQUIRE(missing.exit_code == 2);
    REQUIRE(missing.errors.size() == 1);
    REQUIRE(missing.reports.size() == 1); // batch continues past the failure

    std::remove(good.c_str());
    std::remove(forced.c_str());
}

TEST_CASE("tolerance table round-trips through json") {
    ToleranceTable t = ToleranceTable::defaults();
    t.set_c_est("li_yau", 0.123);
    t.set_version("test-ver");
    const std::string path = "/tmp/harnack_test_tol.json";
    t.save(path);
    const ToleranceTable back = ToleranceTable::load(path);
    REQUIRE(back.version() == "test-ver");
    REQUIRE(back.c_est("li_yau") == Catch::Approx(0.123));
    REQUIRE(back.has("hamilton"));
    std::remove(path.c_str());
}

TEST_CASE("forced-zero tolerance on a discretization-limited check fails the run") {
    // sharp Gaussian: the li_yau margin is a small negative number, so a zero
    // tolerance must flip it to failed while the default calibrated one passes
    std::string text = R"(
[scenario]
id = forced_fail
[domain]
dim = 1
lower = -8
upper = 8
truncates_full_space = true
[grid]
n_cells = 256
[solver]
dt = 2e-3
t0 = 2e-3
t_end = 0.25
checkpoints = 0.25
datum_time = 0
[initial]
preset = gaussian
t0 = 2e-3
[estimates]
checks = li_yau
tolerance.li_yau = 0
)";
    const ScenarioConfig cfg = parse_text(text);
    const ScenarioResult res = run_scenario(cfg);
    REQUIRE_FALSE(res.report.all_passed());
    REQUIRE(res.report.records[0].margin.value < 0.0);
}
