#include "qadv/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qadv/bounds.hpp"
#include "qadv/io_util.hpp"
#include "qadv/rng.hpp"

namespace qadv {

namespace fs = std::filesystem;

namespace {

std::vector<RosterEntry> default_roster() {
    // the paper ensemble: two QCNNs, then variational circuits of depth
    // five through ten
    std::vector<RosterEntry> r;
    r.push_back({"qcnn-small", 0});
    r.push_back({"qcnn-large", 0});
    for (int depth = 5; depth <= 10; ++depth) r.push_back({"variational", depth});
    return r;
}

std::vector<double> default_epsilon_grid() { return parse_epsilon_grid("0:0.02:0.2"); }

std::string gradient_name(GradientMethod m) {
    return m == GradientMethod::Adjoint ? "adjoint" : "parameter-shift";
}

GradientMethod gradient_from_name(const std::string& s) {
    if (s == "adjoint") return GradientMethod::Adjoint;
    if (s == "parameter-shift") return GradientMethod::ParameterShift;
    throw std::runtime_error("config: unknown gradient method '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.roster = default_roster();
    c.epsilon_grid = default_epsilon_grid();
    c.attack.max_iters = 60;
    return c;
}

std::vector<double> parse_epsilon_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) {
            throw std::runtime_error("epsilon grid must be start:step:stop, got '" + text + "'");
        }
        const double start = parse_double(parts[0], "epsilon_grid.start");
        const double step = parse_double(parts[1], "epsilon_grid.step");
        const double stop = parse_double(parts[2], "epsilon_grid.stop");
        if (step <= 0) throw std::runtime_error("epsilon grid step must be > 0");
        for (double e = start; e <= stop + 1e-12; e += step) grid.push_back(e);
    } else {
        for (const std::string& tok : split(text, ',')) {
            grid.push_back(parse_double(tok, "epsilon_grid"));
        }
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] < grid[i - 1]) throw std::runtime_error("epsilon grid must be ascending");
    }
    return grid;
}

std::vector<int> parse_subset(const std::string& text) {
    std::vector<int> subset;
    for (const std::string& tok : split(text, ',')) {
        subset.push_back(static_cast<int>(parse_int(tok, "subset")));
    }
    if (subset.empty()) throw std::runtime_error("subset must be nonempty");
    return subset;
}

void ExperimentConfig::apply_override(const std::string& key, const std::string& value) {
    if (key == "task") {
        if (value != "ising" && value != "mnist" && value != "synthetic") {
            throw std::runtime_error("config: task must be ising|mnist|synthetic, got '" + value +
                                     "'");
        }
        task = value;
    } else if (key == "out") {
        out_dir = value;
    } else if (key == "seed") {
        master_seed = parse_uint64(value, key);
    } else if (key == "threads") {
        threads = static_cast<int>(parse_int(value, key));
        if (threads < 1) throw std::runtime_error("config: threads must be >= 1");
    } else if (key == "length") {
        ising_length = static_cast<int>(parse_int(value, key));
    } else if (key == "n_train") {
        n_train = static_cast<int>(parse_int(value, key));
    } else if (key == "n_test") {
        n_test = static_cast<int>(parse_int(value, key));
    } else if (key == "digits") {
        const auto d = parse_subset(value);
        if (d.size() != 2) throw std::runtime_error("config: digits needs two values");
        digit0 = d[0];
        digit1 = d[1];
    } else if (key == "mnist_images") {
        mnist_images = value;
    } else if (key == "mnist_labels") {
        mnist_labels = value;
    } else if (key == "member") {
        const auto parts = split(value, ':');
        RosterEntry e;
        e.architecture = trim(parts[0]);
        if (e.architecture == "variational") {
            if (parts.size() != 2) {
                throw std::runtime_error("config: variational member needs a depth, e.g. "
                                         "'variational:5'");
            }
            e.depth = static_cast<int>(parse_int(parts[1], "member depth"));
        } else if (e.architecture != "qcnn-small" && e.architecture != "qcnn-large") {
            throw std::runtime_error("config: unknown member architecture '" + e.architecture + "'");
        }
        roster.push_back(e);
    } else if (key == "learning_rate") {
        training.learning_rate = parse_double(value, key);
    } else if (key == "batch_size") {
        training.batch_size = static_cast<int>(parse_int(value, key));
    } else if (key == "epochs") {
        training.epochs = static_cast<int>(parse_int(value, key));
    } else if (key == "prob_floor") {
        training.prob_floor = parse_double(value, key);
    } else if (key == "gradient") {
        training.gradient = gradient_from_name(value);
        attack.gradient = training.gradient;
    } else if (key == "step_alpha") {
        attack.step_alpha = parse_double(value, key);
    } else if (key == "max_iters") {
        attack.max_iters = static_cast<int>(parse_int(value, key));
    } else if (key == "epsilon_budget") {
        attack.epsilon_budget = parse_double(value, key);
    } else if (key == "epsilon_grid") {
        epsilon_grid = parse_epsilon_grid(value);
    } else if (key == "subset") {
        subset = parse_subset(value);
    } else if (key == "surrogate") {
        surrogate = static_cast<int>(parse_int(value, key));
    } else if (key == "perturb_classifier") {
        perturb_classifier = static_cast<int>(parse_int(value, key));
    } else {
        throw std::runtime_error("config: unknown key '" + key + "'");
    }
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
    ExperimentConfig c;
    c.epsilon_grid = default_epsilon_grid();
    c.attack.max_iters = 60;

    std::istringstream in(read_entire_file(path));
    std::string line;
    int line_no = 0;
    bool roster_given = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') continue;  // sections are cosmetic
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: line " + std::to_string(line_no) +
                                     " is not 'key = value': '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "member") roster_given = true;
        c.apply_override(key, value);
    }
    if (!roster_given) c.roster = default_roster();
    return c;
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "task = " << task << "\n";
    out << "out = " << out_dir << "\n";
    out << "seed = " << master_seed << "\n";
    out << "threads = " << threads << "\n";
    out << "[data]\n";
    out << "length = " << ising_length << "\n";
    out << "n_train = " << n_train << "\n";
    out << "n_test = " << n_test << "\n";
    out << "digits = " << digit0 << "," << digit1 << "\n";
    if (task == "mnist") {
        out << "mnist_images = " << mnist_images << "\n";
        out << "mnist_labels = " << mnist_labels << "\n";
    }
    out << "[roster]\n";
    for (const RosterEntry& e : roster) {
        out << "member = " << e.architecture;
        if (e.architecture == "variational") out << ":" << e.depth;
        out << "\n";
    }
    out << "[training]\n";
    out << "learning_rate = " << format_double(training.learning_rate) << "\n";
    out << "batch_size = " << training.batch_size << "\n";
    out << "epochs = " << training.epochs << "\n";
    out << "gradient = " << gradient_name(training.gradient) << "\n";
    out << "prob_floor = " << format_double(training.prob_floor) << "\n";
    out << "[attack]\n";
    out << "step_alpha = " << format_double(attack.step_alpha) << "\n";
    out << "max_iters = " << attack.max_iters << "\n";
    out << "epsilon_grid = ";
    for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
        out << (i ? "," : "") << format_double(epsilon_grid[i]);
    }
    out << "\n";
    out << "subset = ";
    for (std::size_t i = 0; i < subset.size(); ++i) out << (i ? "," : "") << subset[i];
    out << "\n";
    out << "surrogate = " << surrogate << "\n";
    out << "perturb_classifier = " << perturb_classifier << "\n";
    return out.str();
}

std::string ExperimentConfig::config_hash() const { return hex64(fnv1a64(canonical_text())); }

std::vector<std::string> ExperimentConfig::meta_lines() const {
    return {"master_seed = " + std::to_string(master_seed), "config_hash = " + config_hash()};
}

std::uint64_t ExperimentConfig::roster_seed(int classifier_number) const {
    return mix_seed(master_seed, 100 + static_cast<std::uint64_t>(classifier_number));
}

ClassifierModel build_roster_member(const ExperimentConfig& config, int classifier_number) {
    if (classifier_number < 1 || classifier_number > static_cast<int>(config.roster.size())) {
        throw std::runtime_error("classifier number " + std::to_string(classifier_number) +
                                 " outside the roster (1.." + std::to_string(config.roster.size()) +
                                 ")");
    }
    const RosterEntry& e = config.roster[classifier_number - 1];
    const int n_in = config.task == "ising" ? config.ising_length : 8;
    const std::uint64_t seed = config.roster_seed(classifier_number);
    ClassifierModel m;
    if (e.architecture == "variational") {
        m = build_variational_classifier(n_in, e.depth, seed);
    } else if (e.architecture == "qcnn-small") {
        m = build_qcnn(n_in, QcnnVariant::Small, seed);
    } else {
        m = build_qcnn(n_in, QcnnVariant::Large, seed);
    }
    m.name = "classifier-" + std::to_string(classifier_number);
    return m;
}

namespace {

fs::path dataset_path(const ExperimentConfig& c, const std::string& split) {
    return c.out() / "data" / (split + ".qds");
}
fs::path checkpoint_path(const ExperimentConfig& c, int number) {
    return c.out() / "checkpoints" / ("classifier-" + std::to_string(number) + ".ckpt");
}

std::string structure_name(const RosterEntry& e) {
    if (e.architecture == "variational") return "variational-d" + std::to_string(e.depth);
    return e.architecture;
}

}  // namespace

LabeledDataset load_cached_dataset(const ExperimentConfig& config, const std::string& split) {
    const fs::path path = dataset_path(config, split);
    if (!fs::exists(path)) {
        throw std::runtime_error("dataset cache missing: " + path.string() +
                                 " (run `qadv ingest` first)");
    }
    return load_dataset(path);
}

void cmd_ingest(const ExperimentConfig& config) {
    LabeledDataset train, test;
    if (config.task == "ising") {
        std::tie(train, test) = generate_ising_dataset(config.ising_length, config.n_train,
                                                       config.n_test, config.master_seed);
    } else if (config.task == "mnist") {
        if (!fs::exists(config.mnist_images) || !fs::exists(config.mnist_labels)) {
            throw std::runtime_error(
                "mnist task needs the IDX files; expected paths:\n  images: " +
                config.mnist_images + "\n  labels: " + config.mnist_labels +
                "\n(set [data] mnist_images / mnist_labels in the config)");
        }
        const auto pool = load_mnist_idx(config.mnist_images, config.mnist_labels);
        std::tie(train, test) = build_mnist_dataset(config.digit0, config.digit1, config.n_train,
                                                    config.n_test, config.master_seed, pool);
    } else {
        const auto pool =
            generate_synthetic_images(2 * (config.n_train + config.n_test) + 16, config.master_seed);
        std::tie(train, test) =
            build_mnist_dataset(0, 1, config.n_train, config.n_test, config.master_seed, pool);
        train.task = test.task = "synthetic";
    }
    save_dataset(train, dataset_path(config, "train"), config.meta_lines());
    save_dataset(test, dataset_path(config, "test"), config.meta_lines());
}

void cmd_train(const ExperimentConfig& config) {
    const LabeledDataset train_set = load_cached_dataset(config, "train");
    const LabeledDataset test_set = load_cached_dataset(config, "test");

    CsvTable summary;
    summary.meta = {"qadv-csv v1"};
    for (const std::string& m : config.meta_lines()) summary.meta.push_back(m);
    summary.header = {"classifier", "structure", "n_params", "accuracy"};

    for (int number = 1; number <= static_cast<int>(config.roster.size()); ++number) {
        const RosterEntry& entry = config.roster[number - 1];
        const fs::path ckpt = checkpoint_path(config, number);
        ClassifierModel model;
        if (fs::exists(ckpt)) {
            model = load_checkpoint(ckpt);  // resumed run: skip completed members
        } else {
            model = build_roster_member(config, number);
            TrainConfig tc = config.training;
            tc.seed = mix_seed(config.master_seed, 500 + static_cast<std::uint64_t>(number));
            try {
                auto [trained, history] = train(model, train_set, test_set, tc);
                model = std::move(trained);
                save_checkpoint(model, ckpt, config.meta_lines());
                atomic_write_file(config.out() / "history" /
                                      ("classifier-" + std::to_string(number) + ".csv"),
                                  format_history_csv(history, config.meta_lines()));
            } catch (const std::exception& e) {
                // divergence is recorded, the run continues with the rest
                summary.rows.push_back({"classifier-" + std::to_string(number),
                                        structure_name(entry), std::to_string(model.spec.param_count),
                                        std::string("failed: ") + e.what()});
                continue;
            }
        }
        const auto [accuracy, loss] = evaluate(model, test_set);
        (void)loss;
        summary.rows.push_back({"classifier-" + std::to_string(number), structure_name(entry),
                                std::to_string(model.spec.param_count), format_double(accuracy)});
    }
    atomic_write_file(config.out() / "summary.csv", format_csv(summary));
}

namespace {

std::vector<ClassifierModel> load_subset(const ExperimentConfig& config,
                                         std::span<const int> numbers) {
    std::vector<ClassifierModel> models;
    for (int n : numbers) {
        const fs::path ckpt = checkpoint_path(config, n);
        if (!fs::exists(ckpt)) {
            throw std::runtime_error("checkpoint missing for classifier-" + std::to_string(n) +
                                     ": " + ckpt.string() + " (run `qadv train` first)");
        }
        models.push_back(load_checkpoint(ckpt));
    }
    return models;
}

CsvTable curve_table(const ExperimentConfig& config, const RiskCurve& curve,
                     const std::string& mode) {
    CsvTable t;
    t.meta = {"qadv-csv v1"};
    for (const std::string& m : config.meta_lines()) t.meta.push_back(m);
    t.header = {"epsilon", "mode", "risk", "mean_fidelity", "n_samples", "seed"};
    for (std::size_t i = 0; i < curve.epsilon.size(); ++i) {
        t.rows.push_back({format_double(curve.epsilon[i]), mode, format_double(curve.risk[i]),
                          format_double(curve.mean_fidelity[i]), std::to_string(curve.n_samples),
                          std::to_string(curve.seed)});
    }
    return t;
}

}  // namespace

void cmd_attack(const ExperimentConfig& config, const std::string& subcommand) {
    const LabeledDataset test_set = load_cached_dataset(config, "test");
    AttackConfig ac = config.attack;
    ac.seed = config.master_seed;

    if (subcommand == "universal-example") {
        const auto models = load_subset(config, config.subset);
        const RiskCurve curve = risk_curve(models, test_set, config.epsilon_grid, ac);
        atomic_write_file(config.out() / "attacks" / "universal_example.csv",
                          format_csv(curve_table(config, curve, "white_box")));
    } else if (subcommand == "transfer") {
        const auto targets = load_subset(config, config.subset);
        const auto surrogate = load_subset(config, std::vector<int>{config.surrogate});
        const RiskCurve transfer =
            transfer_risk_curve(surrogate[0], targets, test_set, config.epsilon_grid, ac);
        const RiskCurve white = risk_curve(targets, test_set, config.epsilon_grid, ac);
        CsvTable t = curve_table(config, transfer, "transfer");
        const CsvTable w = curve_table(config, white, "white_box");
        t.rows.insert(t.rows.end(), w.rows.begin(), w.rows.end());
        atomic_write_file(config.out() / "attacks" / "transfer.csv", format_csv(t));
    } else if (subcommand == "universal-perturbation") {
        const auto models = load_subset(config, std::vector<int>{config.perturb_classifier});
        if (ac.epsilon_budget == 0.0 && !config.epsilon_grid.empty()) {
            ac.epsilon_budget = config.epsilon_grid.back();
        }
        PerturbationTrace trace;
        universal_perturbation_search(models[0], test_set, ac, &trace);
        CsvTable t;
        t.meta = {"qadv-csv v1"};
        for (const std::string& m : config.meta_lines()) t.meta.push_back(m);
        t.meta.push_back("classifier = classifier-" + std::to_string(config.perturb_classifier));
        t.header = {"step", "epsilon", "loss", "accuracy", "seed"};
        for (std::size_t i = 0; i < trace.eps_proxy.size(); ++i) {
            t.rows.push_back({std::to_string(i), format_double(trace.eps_proxy[i]),
                              format_double(trace.mean_loss[i]), format_double(trace.accuracy[i]),
                              std::to_string(ac.seed)});
        }
        atomic_write_file(config.out() / "attacks" / "universal_perturbation.csv", format_csv(t));
    } else {
        throw std::runtime_error(
            "unknown attack subcommand '" + subcommand +
            "' (expected universal-example | universal-perturbation | transfer)");
    }
}

std::string cmd_bounds(const std::vector<std::string>& args) {
    if (args.empty()) {
        throw std::runtime_error(
            "bounds needs an evaluator: theorem1 | lemma-a1 | levy | union | hoeffding | "
            "qnfl | qnfl-unitary");
    }
    const std::string which = args[0];
    BoundQuery q;
    std::vector<double> risks;
    std::ostringstream echo;
    echo << "evaluator = " << which << "\n";
    for (std::size_t i = 1; i < args.size(); ++i) {
        const auto eq = args[i].find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("bounds arguments are key=value, got '" + args[i] + "'");
        }
        const std::string key = trim(args[i].substr(0, eq));
        const std::string value = trim(args[i].substr(eq + 1));
        echo << key << " = " << value << "\n";
        if (key == "d") q.d = parse_double(value, key);
        else if (key == "k") q.k = static_cast<int>(parse_int(value, key));
        else if (key == "mu") q.mu = parse_double(value, key);
        else if (key == "R0" || key == "R") q.r0 = parse_double(value, key);
        else if (key == "delta") q.delta = parse_double(value, key);
        else if (key == "n") q.n = parse_int(value, key);
        else if (key == "N") q.n_train = parse_double(value, key);
        else if (key == "dprime") q.d_prime = parse_double(value, key);
        else if (key == "alpha") q.alpha = parse_double(value, key);
        else if (key == "beta") q.beta = parse_double(value, key);
        else if (key == "risks") {
            for (const std::string& tok : split(value, ',')) {
                risks.push_back(parse_double(tok, "risks"));
            }
        } else {
            throw std::runtime_error("bounds: unknown key '" + key + "'");
        }
    }

    double result = 0.0;
    std::string label;
    if (which == "theorem1") {
        result = theorem1_min_epsilon(q.d, q.k, q.mu, q.r0);
        label = "min_epsilon";
    } else if (which == "lemma-a1") {
        result = lemma_a1_min_epsilon(q.d, q.mu, q.r0);
        label = "min_epsilon";
    } else if (which == "levy") {
        result = levy_min_epsilon(q.alpha, q.beta, q.d, q.mu, q.r0);
        label = "min_epsilon";
    } else if (which == "union") {
        result = union_risk_lower_bound(risks);
        label = "risk_lower_bound";
    } else if (which == "hoeffding") {
        result = hoeffding_deviation(q.n, q.delta);
        label = "deviation";
    } else if (which == "qnfl") {
        result = qnfl_classifier_bound(q.d, q.d_prime, q.n_train);
        echo << "clamped = " << format_double(qnfl_classifier_bound_clamped(q.d, q.d_prime, q.n_train))
             << "\n";
        label = "risk_lower_bound";
    } else if (which == "qnfl-unitary") {
        result = qnfl_unitary_bound(q.d, q.n_train);
        label = "risk_lower_bound";
    } else {
        throw std::runtime_error("bounds: unknown evaluator '" + which + "'");
    }
    echo << label << " = " << format_double(result) << "\n";
    return echo.str();
}

namespace {

std::string meta_or_missing(const CsvTable& t, const std::string& key) {
    for (const std::string& m : t.meta) {
        const auto eq = m.find('=');
        if (eq != std::string::npos && trim(m.substr(0, eq)) == key) return trim(m.substr(eq + 1));
    }
    return "(missing)";
}

}  // namespace

std::string cmd_report(const fs::path& run_dir) {
    if (!fs::exists(run_dir) || !fs::is_directory(run_dir) || fs::is_empty(run_dir)) {
        throw std::runtime_error("report: run directory is missing or empty: " + run_dir.string());
    }
    std::ostringstream out;
    out << "qadv run report\n";
    out << "run_dir = " << run_dir.string() << "\n";

    double mu_min = -1.0;
    int n_in_qubits = 8;
    const fs::path summary_path = run_dir / "summary.csv";
    if (fs::exists(summary_path)) {
        const CsvTable summary = read_csv(summary_path);
        out << "master_seed = " << meta_or_missing(summary, "master_seed") << "\n";
        out << "config_hash = " << meta_or_missing(summary, "config_hash") << "\n";
        out << "\n[training summary]\n";
        out << "classifier | structure | n_params | accuracy\n";
        for (const auto& row : summary.rows) {
            out << row[0] << " | " << row[1] << " | " << row[2] << " | " << row[3] << "\n";
            try {
                const double acc = parse_double(row[3], "accuracy");
                const double err = 1.0 - acc;
                if (mu_min < 0 || err < mu_min) mu_min = err;
            } catch (const std::exception&) {
                // failed member: leave it out of mu_min
            }
        }
    } else {
        out << "\n[training summary]\n(missing: summary.csv)\n";
    }

    const fs::path test_path = run_dir / "data" / "test.qds";
    int n_test = 0;
    if (fs::exists(test_path)) {
        const LabeledDataset test = load_dataset(test_path);
        n_test = static_cast<int>(test.samples.size());
        n_in_qubits = test.n_qubits;
        out << "\n[dataset]\ntask = " << test.task << ", test samples = " << n_test
            << ", qubits = " << test.n_qubits << "\n";
    } else {
        out << "\n[dataset]\n(missing: data/test.qds)\n";
    }

    const double d = std::pow(2.0, n_in_qubits);
    const fs::path ue_path = run_dir / "attacks" / "universal_example.csv";
    if (fs::exists(ue_path)) {
        const CsvTable ue = read_csv(ue_path);
        out << "\n[universal adversarial risk]\n";
        out << "epsilon | risk | mean_fidelity | theorem1_epsilon_floor\n";
        for (const auto& row : ue.rows) {
            const double risk = parse_double(row[2], "risk");
            std::string floor = "(vacuous)";
            if (mu_min > 0 && risk < 1.0) {
                // measured mu_min and the attacked risk as R0
                const int k = 3;
                floor = format_double(theorem1_min_epsilon(d, k, mu_min, risk));
            } else if (mu_min <= 0) {
                floor = "(mu_min unmeasurable: a member has zero test error)";
            }
            out << row[0] << " | " << row[2] << " | " << row[3] << " | " << floor << "\n";
        }
        out << "measured mu_min = "
            << (mu_min > 0 ? format_double(mu_min) : std::string("(missing)")) << ", d = "
            << format_double(d) << "\n";
    } else {
        out << "\n[universal adversarial risk]\n(missing: attacks/universal_example.csv)\n";
    }

    const fs::path tr_path = run_dir / "attacks" / "transfer.csv";
    if (fs::exists(tr_path)) {
        const CsvTable tr = read_csv(tr_path);
        out << "\n[transfer vs white-box]\n";
        out << "epsilon | mode | risk\n";
        for (const auto& row : tr.rows) {
            out << row[0] << " | " << row[1] << " | " << row[2] << "\n";
        }
    } else {
        out << "\n[transfer vs white-box]\n(missing: attacks/transfer.csv)\n";
    }

    const fs::path up_path = run_dir / "attacks" / "universal_perturbation.csv";
    if (fs::exists(up_path)) {
        const CsvTable up = read_csv(up_path);
        out << "\n[universal perturbation]\n";
        out << "step | epsilon | loss | accuracy\n";
        for (const auto& row : up.rows) {
            out << row[0] << " | " << row[1] << " | " << row[2] << " | " << row[3] << "\n";
        }
    } else {
        out << "\n[universal perturbation]\n(missing: attacks/universal_perturbation.csv)\n";
    }

    const std::string text = out.str();
    atomic_write_file(run_dir / "report.txt", text);
    return text;
}

}  // namespace qadv
