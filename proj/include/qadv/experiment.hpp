#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qadv/attacks.hpp"
#include "qadv/training.hpp"

namespace qadv {

struct RosterEntry {
    std::string architecture;  // "variational", "qcnn-small", "qcnn-large"
    int depth = 0;             // variational only
};

/// One experiment: dataset, classifier roster, training and attack
/// settings. Parsed from a flat [section] key=value file; flags override
/// individual keys. The canonical text (and its hash) is embedded in every
/// emitted artifact so runs stay auditable.
struct ExperimentConfig {
    std::string task = "ising";  // ising | mnist | synthetic
    int ising_length = 8;
    int digit0 = 1, digit1 = 9;
    int n_train = 300, n_test = 100;
    std::string mnist_images = "data/mnist/train-images-idx3-ubyte";
    std::string mnist_labels = "data/mnist/train-labels-idx1-ubyte";

    std::vector<RosterEntry> roster;  // defaults to the 8-member ensemble
    TrainConfig training;
    AttackConfig attack;
    std::vector<double> epsilon_grid;  // defaults to 0:0.02:0.2
    std::vector<int> subset = {1, 3, 6};
    int surrogate = 1;
    int perturb_classifier = 2;

    std::string out_dir = "runs/default";
    std::uint64_t master_seed = 7;
    int threads = 1;

    static ExperimentConfig defaults();
    static ExperimentConfig from_file(const std::filesystem::path& path);
    void apply_override(const std::string& key, const std::string& value);

    std::string canonical_text() const;
    std::string config_hash() const;
    std::vector<std::string> meta_lines() const;

    std::filesystem::path out() const { return out_dir; }
    std::uint64_t roster_seed(int classifier_number) const;
};

/// "0:0.02:0.2" (start:step:stop, inclusive) or a comma list.
std::vector<double> parse_epsilon_grid(const std::string& text);
std::vector<int> parse_subset(const std::string& text);

ClassifierModel build_roster_member(const ExperimentConfig& config, int classifier_number);

/// Generate and cache the datasets; byte-identical for identical configs.
void cmd_ingest(const ExperimentConfig& config);

/// Train every roster member (skipping existing checkpoints), write
/// checkpoints, per-member history CSVs and the summary table.
void cmd_train(const ExperimentConfig& config);

/// subcommand: "universal-example", "universal-perturbation", "transfer".
void cmd_attack(const ExperimentConfig& config, const std::string& subcommand);

/// Key=value bound evaluation, e.g. {"theorem1", "d=256", "k=8", ...};
/// returns the printed text.
std::string cmd_bounds(const std::vector<std::string>& args);

/// Consolidated report joining training summaries, risk curves and the
/// theorem-1 epsilon floor; missing pieces are marked, an empty run
/// directory is an error.
std::string cmd_report(const std::filesystem::path& run_dir);

LabeledDataset load_cached_dataset(const ExperimentConfig& config, const std::string& split);

}  // namespace qadv
