#include "surge/cli.hpp"
#include "surge/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <locale>

int main(int argc, char** argv) {
    std::locale::global(std::locale::classic());

    CLI::App app{"surge: Borel-plane landscape analysis wrapped around gradient optimizers"};
    app.require_subcommand(1);

    std::string config_path;
    bool dump_defaults = false;
    long long seed = -1;
    std::string out_dir, optimizer;
    double lambda = -1.0;
    long long steps = -1;
    bool require_analysis = false;
    std::vector<double> extra_g;

    app.add_flag("--dump-defaults", dump_defaults, "print the default config and exit");
    for (auto* sub : {app.add_subcommand("analyze", "run the Borel target analysis"),
                      app.add_subcommand("train", "matched bare vs guided training runs"),
                      app.add_subcommand("oracle", "quartic-oscillator ground-truth report")}) {
        sub->add_option("--config", config_path, "TOML or JSON config file");
        sub->add_option("--seed", seed, "override config seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--lambda", lambda, "override guidance weight");
        sub->add_option("--optimizer", optimizer, "sgd | adam | adamw");
        sub->add_option("--steps", steps, "override step budget");
        sub->add_flag("--require-analysis", require_analysis,
                      "fail instead of recomputing when the analysis file is missing");
        sub->add_option("--g", extra_g, "extra oracle coupling values");
    }

    CLI11_PARSE(app, argc, argv);

    if (dump_defaults) {
        std::cout << surge::cli::dump_defaults();
        return surge::cli::exit_ok;
    }

    surge::cli::ExperimentConfig config;
    if (!config_path.empty()) {
        try {
            config = surge::cli::load_config(config_path);
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return surge::cli::exit_config;
        }
    }
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (lambda >= 0.0) config.lambda = lambda;
    if (!optimizer.empty()) config.optimizer = optimizer;
    if (steps >= 0) config.steps = static_cast<int>(steps);
    if (require_analysis) config.require_analysis = true;
    for (double g : extra_g) config.oracle_g_grid.push_back(g);

    try {
        if (app.got_subcommand("analyze")) return surge::cli::cmd_analyze(config);
        if (app.got_subcommand("train")) return surge::cli::cmd_train(config);
        if (app.got_subcommand("oracle")) return surge::cli::cmd_oracle(config);
    } catch (const surge::cli::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return surge::cli::exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return surge::cli::exit_io;
    }
    return surge::cli::exit_config;
}
