#pragma once

#include "surge/optimize.hpp"
#include "surge/partition.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace surge::cli {

// exit codes shared by every subcommand
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_io = 3;
inline constexpr int exit_invariant = 4;

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    std::string objective = "tilted_double_well";
    std::vector<double> theta0; // empty: kind-specific default
    double constant_value = 1.0;

    // regression task
    int dataset_points = 64;
    double dataset_x_lo = -3.141592653589793;
    double dataset_x_hi = 3.141592653589793;
    std::vector<int> model_hidden = {12, 10, 8};

    AnalysisConfig analysis;

    // training
    std::string optimizer = "sgd";
    double eta = 0.05;
    double lambda = 1.0;
    double max_norm = 0.0; // <= 0: default 10*eta
    double weight_decay = 0.0;
    int steps = 300;
    std::string analysis_path;
    bool require_analysis = false;
    int refresh_every = 0; // re-run the analysis every R steps (0 = off)

    // oracle
    std::vector<double> oracle_g_grid = {0.1, 0.05, 0.01, 0.005};
    int oracle_series_order = 20;
    int oracle_pade_m = 2;
    int oracle_pade_n = 3;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// TOML subset (key = value, [section] headers, numbers/strings/bools/arrays)
// or JSON; unknown keys are rejected by name.
ExperimentConfig parse_config_text(const std::string& text, bool is_json);
ExperimentConfig load_config(const std::string& path);
std::string dump_defaults();

int cmd_analyze(const ExperimentConfig& config);
int cmd_train(const ExperimentConfig& config);
int cmd_oracle(const ExperimentConfig& config);

// objective + starting point named by the config (shared with the tests)
std::pair<ObjectiveFunction, std::vector<double>> build_objective(const ExperimentConfig& config);

} // namespace surge::cli
