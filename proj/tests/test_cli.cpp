#include <doctest.h>

#include "surge/cli.hpp"
#include "surge/io.hpp"
#include "surge/parallel.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

using namespace surge;
using nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "surge_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("toml and json configs parse to the same settings") {
    const std::string toml = R"(
seed = 11
objective = "quartic"   # comment survives
[analysis]
grid_size = 12
series_order = 5
estimator = "mc"
[train]
eta = 0.125
optimizer = "adam"
)";
    const std::string jsn = R"({
  "seed": 11,
  "objective": "quartic",
  "analysis": {"grid_size": 12, "series_order": 5, "estimator": "mc"},
  "train": {"eta": 0.125, "optimizer": "adam"}
})";
    const cli::ExperimentConfig a = cli::parse_config_text(toml, false);
    const cli::ExperimentConfig b = cli::parse_config_text(jsn, true);
    CHECK(a.seed == 11);
    CHECK(a.objective == "quartic");
    CHECK(a.analysis.grid_size == 12);
    CHECK(a.analysis.series_order == 5);
    CHECK(a.eta == 0.125);
    CHECK(a.optimizer == "adam");
    CHECK(b.seed == a.seed);
    CHECK(b.analysis.grid_size == a.analysis.grid_size);
    CHECK(b.eta == a.eta);
}

TEST_CASE("unknown keys are rejected by name") {
    try {
        cli::parse_config_text("mystery_knob = 3\n", false);
        FAIL("expected config_error");
    } catch (const cli::config_error& e) {
        CHECK(std::string(e.what()).find("mystery_knob") != std::string::npos);
    }
    try {
        cli::parse_config_text(R"({"train": {"etaa": 0.1}})", true);
        FAIL("expected config_error");
    } catch (const cli::config_error& e) {
        CHECK(std::string(e.what()).find("train.etaa") != std::string::npos);
    }
}

TEST_CASE("default dump round-trips through the parser") {
    const cli::ExperimentConfig c = cli::parse_config_text(cli::dump_defaults(), false);
    const cli::ExperimentConfig d;
    CHECK(c.seed == d.seed);
    CHECK(c.objective == d.objective);
    CHECK(c.analysis.grid_size == d.analysis.grid_size);
    CHECK(c.analysis.scan_threshold == d.analysis.scan_threshold);
    CHECK(c.eta == d.eta);
    CHECK(c.steps == d.steps);
    CHECK(c.oracle_g_grid == d.oracle_g_grid);
}

TEST_CASE("analyze command writes a report for the quartic objective") {
    cli::ExperimentConfig config;
    config.objective = "quartic";
    config.seed = 9;
    config.analysis.samples_per_g = 2048;
    config.analysis.proposal_width = 1.0; // cover the basin from theta0 = 1
    config.out_dir = fresh_dir("analyze_quartic").string();
    REQUIRE(cli::cmd_analyze(config) == cli::exit_ok);

    const json report = json::parse(read_text_file(config.out_dir + "/analysis.json"));
    CHECK_FALSE(report.at("samples").empty());
    CHECK_FALSE(report.at("coeffs").empty());
    CHECK(report.at("range").is_object());
}

TEST_CASE("analyze command degrades gracefully on the constant objective") {
    cli::ExperimentConfig config;
    config.objective = "constant";
    config.constant_value = 1.0;
    config.seed = 3;
    config.out_dir = fresh_dir("analyze_constant").string();
    REQUIRE(cli::cmd_analyze(config) == cli::exit_ok);

    const json report = json::parse(read_text_file(config.out_dir + "/analysis.json"));
    CHECK(report.at("targets").empty());
    bool noted = false;
    for (const auto& d : report.at("diagnostics"))
        if (d.at("message").get<std::string>().find("no divergence detected") != std::string::npos)
            noted = true;
    CHECK(noted);
}

TEST_CASE("malformed config files fail with the offending key") {
    const auto dir = fresh_dir("bad_config");
    const auto path = (dir / "bad.toml").string();
    write_text_file(path, "objective = \"quartic\"\nbananas = 7\n");
    try {
        cli::load_config(path);
        FAIL("expected config_error");
    } catch (const cli::config_error& e) {
        CHECK(std::string(e.what()).find("bananas") != std::string::npos);
    }
}

TEST_CASE("train command: lambda zero gives exactly zero improvement") {
    cli::ExperimentConfig config;
    config.objective = "tilted_double_well";
    config.seed = 4;
    config.lambda = 0.0;
    config.steps = 80;
    config.eta = 0.05;
    config.analysis.samples_per_g = 1024;
    config.analysis.proposal_width = 1.0;
    config.out_dir = fresh_dir("train_lambda0").string();
    REQUIRE(cli::cmd_train(config) == cli::exit_ok);

    const json summary = json::parse(read_text_file(config.out_dir + "/summary.json"));
    CHECK(summary.at("improvement_pct").get<double>() == 0.0);
    CHECK(read_text_file(config.out_dir + "/bare.csv") ==
          read_text_file(config.out_dir + "/surge.csv"));
}

TEST_CASE("train command requires the analysis file when asked to") {
    cli::ExperimentConfig config;
    config.objective = "quadratic";
    config.require_analysis = true;
    config.analysis_path = fresh_dir("missing").string() + "/nope.json";
    config.out_dir = fresh_dir("train_require").string();
    CHECK(cli::cmd_train(config) == cli::exit_config);
}

TEST_CASE("train command consumes a pre-computed target file") {
    const auto dir = fresh_dir("train_pretargets");
    const auto targets_path = (dir / "targets.json").string();
    write_text_file(targets_path, targets_to_json(TargetSet{{0.7, 1.29}, 2.0}).dump());

    cli::ExperimentConfig config;
    config.objective = "tilted_double_well";
    config.seed = 12;
    config.lambda = 1.5;
    config.steps = 150;
    config.eta = 0.05;
    config.analysis_path = targets_path;
    config.out_dir = dir.string();
    REQUIRE(cli::cmd_train(config) == cli::exit_ok);
    const json summary = json::parse(read_text_file(config.out_dir + "/summary.json"));
    CHECK(summary.at("targets").size() == 2);
}

TEST_CASE("regression training summary matches the recorded golden run") {
    cli::ExperimentConfig config;
    config.objective = "regression";
    config.seed = 7;
    config.optimizer = "sgd";
    config.eta = 0.05;
    config.lambda = 1.0;
    config.steps = 120;
    config.dataset_points = 32;
    config.analysis.grid_size = 16;
    config.analysis.samples_per_g = 256;
    config.out_dir = fresh_dir("train_golden").string();
    REQUIRE(cli::cmd_train(config) == cli::exit_ok);

    const std::string produced = read_text_file(config.out_dir + "/summary.json");
    const std::string golden_path = std::string(SURGE_TEST_DIR) + "/golden/regression_seed7.json";
    if (!std::filesystem::exists(golden_path)) {
        // first run on a fresh checkout records the golden value
        write_text_file(golden_path, produced);
    }
    CHECK(produced == read_text_file(golden_path));
}

TEST_CASE("analyze output is byte-identical across runs and thread counts") {
    cli::ExperimentConfig config;
    config.objective = "tilted_double_well";
    config.seed = 6;
    config.analysis.samples_per_g = 1024;
    config.analysis.proposal_width = 1.0;

    config.out_dir = fresh_dir("det_a").string();
    REQUIRE(cli::cmd_analyze(config) == cli::exit_ok);
    const std::string first = read_text_file(config.out_dir + "/analysis.json");

    config.out_dir = fresh_dir("det_b").string();
    REQUIRE(cli::cmd_analyze(config) == cli::exit_ok);
    CHECK(first == read_text_file(config.out_dir + "/analysis.json"));

    set_max_threads(3);
    config.out_dir = fresh_dir("det_c").string();
    REQUIRE(cli::cmd_analyze(config) == cli::exit_ok);
    set_max_threads(0);
    CHECK(first == read_text_file(config.out_dir + "/analysis.json"));
}

TEST_CASE("oracle command passes its invariants and survives a corrupt cache") {
    cli::ExperimentConfig config;
    config.out_dir = fresh_dir("oracle").string();
    config.oracle_series_order = 20;
    REQUIRE(cli::cmd_oracle(config) == cli::exit_ok);
    CHECK(std::filesystem::exists(config.out_dir + "/oracle.csv"));
    CHECK(std::filesystem::exists(config.out_dir + "/oracle.json"));

    // corrupt the coefficient cache: the command recomputes and still succeeds
    write_text_file(config.out_dir + "/quartic_coeffs.json", "{ not json !!");
    REQUIRE(cli::cmd_oracle(config) == cli::exit_ok);
    const json cache = json::parse(read_text_file(config.out_dir + "/quartic_coeffs.json"));
    CHECK(cache.at("coeffs")[0].get<double>() == 1.0);

    // rows outside the validated range still get produced
    config.oracle_g_grid.push_back(1.0);
    REQUIRE(cli::cmd_oracle(config) == cli::exit_ok);
    const json report = json::parse(read_text_file(config.out_dir + "/oracle.json"));
    CHECK(report.at("rows").size() == 5);
}
