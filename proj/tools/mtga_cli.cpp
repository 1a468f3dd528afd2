#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mtga/experiment.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 1;
constexpr int exit_runtime_error = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-tasking genetic algorithm experiment runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir, in_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;

    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--seed", seed, "override the base seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--out", out_dir, "override the output directory");
    run->add_option("--threads", threads, "worker threads (0 = all cores)");

    auto* score = app.add_subcommand("score", "recompute the performance score table");
    score->add_option("--in", in_dir, "experiment directory")->required();

    auto* plot = app.add_subcommand("plot", "regenerate plots and plot-data CSVs");
    plot->add_option("--in", in_dir, "experiment directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_config_error;
    }

    try {
        if (run->parsed()) {
            auto cfg = mtga::experiment::ExperimentConfig::load(config_path);
            if (seed_set) cfg.base_seed = seed;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (threads > 0) cfg.threads = threads;
            const auto dir = mtga::experiment::run_experiment(cfg);
            std::cout << "experiment artifacts written to " << dir << "\n";
        } else if (score->parsed()) {
            const auto scores = mtga::experiment::score_directory(in_dir);
            std::cout << "scores.csv updated (" << scores.size() << " solvers)\n";
        } else if (plot->parsed()) {
            mtga::experiment::emit_reports(in_dir);
            std::cout << "plots written to " << in_dir << "\n";
        }
    } catch (const mtga::core::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime_error;
    }
    return exit_ok;
}
