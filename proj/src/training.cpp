#include "qadv/training.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qadv/io_util.hpp"
#include "qadv/rng.hpp"

namespace qadv {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

void check_batch(const ClassifierModel& model, std::span<const LabeledSample> batch) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    for (const LabeledSample& s : batch) {
        if (s.state.n_qubits != model.spec.n_in) {
            throw std::invalid_argument("batch sample qubit count does not match the model");
        }
        if (s.label != 0 && s.label != 1) throw std::invalid_argument("labels must be 0 or 1");
    }
}

double loss_dq_coeff(double q_label, double floor) {
    // d/dq of -log(max(q, floor)): zero in the clamped region
    return q_label > floor ? -1.0 / q_label : 0.0;
}

}  // namespace

void TrainConfig::validate() const {
    if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be > 0");
    if (beta1 <= 0 || beta1 >= 1 || beta2 <= 0 || beta2 >= 1) {
        throw std::invalid_argument("beta1 and beta2 must lie in (0, 1)");
    }
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (prob_floor <= 0) throw std::invalid_argument("prob_floor must be > 0");
}

AdamState AdamState::zeros(std::size_t param_count) {
    AdamState s;
    s.m.assign(param_count, 0.0);
    s.v.assign(param_count, 0.0);
    return s;
}

double cross_entropy(std::span<const double> probs, int label, double floor) {
    if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
        throw std::invalid_argument("cross_entropy: label out of range");
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < -1e-8) {
            throw std::invalid_argument("cross_entropy: malformed probability vector");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-8) {
        throw std::invalid_argument("cross_entropy: probabilities sum to " + format_double(sum));
    }
    return -std::log(std::max(probs[label], floor));
}

std::vector<double> gradient_parameter_shift(const ClassifierModel& model,
                                             std::span<const LabeledSample> batch, double floor) {
    check_batch(model, batch);
    const auto occurrences = model.circuit.parameterized_occurrences();
    std::vector<double> grad(model.spec.param_count, 0.0);
    const int readout[] = {model.spec.readout_qubit};

    for (const LabeledSample& sample : batch) {
        const StateVector total = embed_with_readout(sample.state);
        const auto base = measure_probabilities(model.circuit.apply(total, model.params), readout);
        const double coeff = loss_dq_coeff(base[sample.label], floor);
        if (coeff == 0.0) continue;
        for (std::size_t occ : occurrences) {
            const ParamGate& g = model.circuit.gates[occ];
            const auto plus = measure_probabilities(
                model.circuit.apply_with_occurrence_shift(total, model.params, occ, kHalfPi),
                readout);
            const auto minus = measure_probabilities(
                model.circuit.apply_with_occurrence_shift(total, model.params, occ, -kHalfPi),
                readout);
            const double dq = (plus[sample.label] - minus[sample.label]) / 2.0;
            grad[g.param_index] += g.scale * coeff * dq;
        }
    }
    for (double& g : grad) g /= static_cast<double>(batch.size());
    return grad;
}

std::vector<double> gradient_finite_difference(const ClassifierModel& model,
                                               std::span<const LabeledSample> batch, double h,
                                               double floor) {
    check_batch(model, batch);
    if (h <= 0) throw std::invalid_argument("finite-difference step must be > 0");
    ClassifierModel probe = model;
    std::vector<double> grad(model.spec.param_count, 0.0);
    for (int j = 0; j < model.spec.param_count; ++j) {
        probe.params[j] = model.params[j] + h;
        const double up = batch_loss(probe, batch, floor);
        probe.params[j] = model.params[j] - h;
        const double down = batch_loss(probe, batch, floor);
        probe.params[j] = model.params[j];
        grad[j] = (up - down) / (2.0 * h);
    }
    return grad;
}

std::vector<double> gradient_adjoint(const ClassifierModel& model,
                                     std::span<const LabeledSample> batch, double floor) {
    check_batch(model, batch);
    std::vector<double> grad(model.spec.param_count, 0.0);
    for (const LabeledSample& sample : batch) {
        const StateVector total = embed_with_readout(sample.state);
        const ReadoutGradient rg = readout_probability_gradient(
            model.circuit, model.params, total, model.spec.readout_qubit, sample.label);
        const double coeff = loss_dq_coeff(rg.probability, floor);
        if (coeff == 0.0) continue;
        for (int j = 0; j < model.spec.param_count; ++j) grad[j] += coeff * rg.grad[j];
    }
    for (double& g : grad) g /= static_cast<double>(batch.size());
    return grad;
}

std::vector<double> batch_gradient(const ClassifierModel& model,
                                   std::span<const LabeledSample> batch, GradientMethod method,
                                   double floor) {
    return method == GradientMethod::Adjoint ? gradient_adjoint(model, batch, floor)
                                             : gradient_parameter_shift(model, batch, floor);
}

double batch_loss(const ClassifierModel& model, std::span<const LabeledSample> batch,
                  double floor) {
    check_batch(model, batch);
    double sum = 0.0;
    for (const LabeledSample& s : batch) {
        sum += cross_entropy(forward(model, s.state), s.label, floor);
    }
    return sum / static_cast<double>(batch.size());
}

void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state,
               const TrainConfig& config) {
    if (params.size() != grads.size() || params.size() != state.m.size() ||
        params.size() != state.v.size()) {
        throw std::invalid_argument("adam_step: length mismatch");
    }
    state.step += 1;
    const double b1t = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double b2t = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / b1t;
        const double v_hat = state.v[i] / b2t;
        params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
}

std::pair<ClassifierModel, TrainHistory> train(const ClassifierModel& model,
                                               const LabeledDataset& train_set,
                                               const LabeledDataset& val_set,
                                               const TrainConfig& config) {
    config.validate();
    if (train_set.samples.empty() || val_set.samples.empty()) {
        throw std::invalid_argument("train: datasets must be nonempty");
    }
    check_batch(model, train_set.samples);
    check_batch(model, val_set.samples);

    ClassifierModel current = model;
    TrainHistory history;
    AdamState adam = AdamState::zeros(current.params.size());

    std::vector<double> best_params = current.params;
    double best_val_acc = -1.0;
    int best_epoch = 0;

    std::vector<std::size_t> order(train_set.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<LabeledSample> batch;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            batch.clear();
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back(train_set.samples[order[i]]);
            }
            const auto grads = batch_gradient(current, batch, config.gradient, config.prob_floor);
            adam_step(current.params, grads, adam, config);
        }

        const auto [train_acc, train_loss] = evaluate(current, train_set);
        const auto [val_acc, val_loss] = evaluate(current, val_set);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
            throw std::runtime_error("train: diverged at epoch " + std::to_string(epoch) +
                                     " (non-finite loss)");
        }
        history.train_loss.push_back(train_loss);
        history.train_acc.push_back(train_acc);
        history.val_loss.push_back(val_loss);
        history.val_acc.push_back(val_acc);

        if (val_acc > best_val_acc) {
            best_val_acc = val_acc;
            best_params = current.params;
            best_epoch = epoch + 1;
        }
    }

    if (config.epochs > 0) {
        current.params = std::move(best_params);
        current.trained_epochs = best_epoch;
        current.best_val_accuracy = best_val_acc;
    }
    return {std::move(current), std::move(history)};
}

std::pair<double, double> evaluate(const ClassifierModel& model, const LabeledDataset& dataset) {
    if (dataset.samples.empty()) throw std::invalid_argument("evaluate: empty dataset");
    double correct = 0.0, loss = 0.0;
    for (const LabeledSample& s : dataset.samples) {
        const auto probs = forward(model, s.state);
        if (label_from_probs(probs) == s.label) correct += 1.0;
        loss += cross_entropy(probs, s.label);
    }
    const double n = static_cast<double>(dataset.samples.size());
    return {correct / n, loss / n};
}

std::string format_history_csv(const TrainHistory& history,
                               std::span<const std::string> meta_lines) {
    CsvTable t;
    for (const std::string& m : meta_lines) t.meta.push_back(m);
    t.header = {"epoch", "train_loss", "train_acc", "val_loss", "val_acc"};
    for (std::size_t e = 0; e < history.epochs(); ++e) {
        t.rows.push_back({std::to_string(e + 1), format_double(history.train_loss[e]),
                          format_double(history.train_acc[e]), format_double(history.val_loss[e]),
                          format_double(history.val_acc[e])});
    }
    return format_csv(t);
}

}  // namespace qadv
