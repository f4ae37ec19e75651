#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qadv/experiment.hpp"

namespace {

qadv::ExperimentConfig make_config(const std::string& config_path, const std::string& out_dir,
                                   long long seed, int threads, const std::string& subset,
                                   const std::string& epsilon_grid) {
    qadv::ExperimentConfig cfg = config_path.empty()
                                     ? qadv::ExperimentConfig::defaults()
                                     : qadv::ExperimentConfig::from_file(config_path);
    if (!out_dir.empty()) cfg.apply_override("out", out_dir);
    if (seed >= 0) cfg.apply_override("seed", std::to_string(seed));
    if (threads > 0) cfg.apply_override("threads", std::to_string(threads));
    if (!subset.empty()) cfg.apply_override("subset", subset);
    if (!epsilon_grid.empty()) cfg.apply_override("epsilon_grid", epsilon_grid);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qadv: train, attack and bound variational quantum classifiers"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir, subset, epsilon_grid;
    long long seed = -1;
    int threads = 0;
    app.add_option("--config", config_path, "experiment config file (key = value sections)");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--seed", seed, "master seed override");
    app.add_option("--threads", threads, "worker threads for per-sample attack crafting");
    app.add_option("--subset", subset, "classifier subset, e.g. \"1,3,6\"");
    app.add_option("--epsilon-grid", epsilon_grid, "attack grid, e.g. \"0:0.02:0.2\"");

    auto* ingest = app.add_subcommand("ingest", "generate and cache the datasets");
    auto* train = app.add_subcommand("train", "train the classifier roster");
    auto* attack = app.add_subcommand("attack", "run an attack campaign");
    std::string attack_kind;
    attack->add_option("kind", attack_kind,
                       "universal-example | universal-perturbation | transfer")
        ->required();
    auto* bounds = app.add_subcommand("bounds", "evaluate a closed-form bound");
    std::vector<std::string> bound_args;
    bounds->add_option("args", bound_args, "evaluator then key=value pairs")->expected(-1);
    auto* report = app.add_subcommand("report", "consolidate a run directory into a report");
    std::string run_dir;
    report->add_option("run_dir", run_dir, "run directory (defaults to --out)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bounds->parsed()) {
            std::cout << qadv::cmd_bounds(bound_args);
            return 0;
        }
        qadv::ExperimentConfig cfg =
            make_config(config_path, out_dir, seed, threads, subset, epsilon_grid);
        if (ingest->parsed()) {
            qadv::cmd_ingest(cfg);
            std::cout << "datasets cached under " << cfg.out().string() << "/data\n";
        } else if (train->parsed()) {
            qadv::cmd_train(cfg);
            std::cout << "checkpoints and summary under " << cfg.out().string() << "\n";
        } else if (attack->parsed()) {
            qadv::cmd_attack(cfg, attack_kind);
            std::cout << "attack artifacts under " << cfg.out().string() << "/attacks\n";
        } else if (report->parsed()) {
            std::cout << qadv::cmd_report(run_dir.empty() ? cfg.out()
                                                          : std::filesystem::path(run_dir));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
