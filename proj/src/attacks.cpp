#include "qadv/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qadv/rng.hpp"

namespace qadv {

namespace {

// per-model true-label probability below which a model counts as fooled
// with margin and drops out of the qBIM gradient
constexpr double kLossSaturation = 0.4;

void check_models(std::span<const ClassifierModel> models, const LabeledSample& sample) {
    if (models.empty()) throw std::invalid_argument("attack needs at least one model");
    for (const ClassifierModel& m : models) {
        if (m.spec.n_in != sample.state.n_qubits) {
            throw std::invalid_argument("attack: model input size does not match the sample");
        }
    }
}

// M psi with M = E^dag U^dag P_label U E: the gradient of the readout
// probability with respect to the conjugated amplitudes.
StateVector probability_backprop(const ClassifierModel& model, const StateVector& input,
                                 int label, double* q_out) {
    StateVector total = embed_with_readout(input);
    total = model.circuit.apply(total, model.params);
    StateVector projected = project_readout(total, model.spec.readout_qubit, label);
    if (q_out) {
        double q = 0.0;
        for (const cxd& a : projected.amps) q += std::norm(a);
        *q_out = q;
    }
    projected = model.circuit.apply_inverse(projected, model.params);
    StateVector out;
    out.n_qubits = input.n_qubits;
    out.amps.resize(input.dim());
    for (std::size_t i = 0; i < out.dim(); ++i) out.amps[i] = projected.amps[2 * i + 1];
    return out;
}

double summed_loss(std::span<const ClassifierModel> models, const StateVector& state, int label,
                   double floor, std::vector<double>* per_model = nullptr) {
    double total = 0.0;
    if (per_model) per_model->clear();
    for (const ClassifierModel& m : models) {
        const double l = cross_entropy(forward(m, state), label, floor);
        total += l;
        if (per_model) per_model->push_back(l);
    }
    return total;
}

bool all_misclassify(std::span<const ClassifierModel> models, const StateVector& state,
                     int label, std::vector<std::uint8_t>* mask = nullptr) {
    bool all = true;
    if (mask) mask->clear();
    for (const ClassifierModel& m : models) {
        const bool fooled = predict(m, state) != label;
        all = all && fooled;
        if (mask) mask->push_back(fooled ? 1 : 0);
    }
    return all;
}

// Pull `state` back along the Fubini-Study geodesic toward `clean` until
// the trace distance equals the budget.
void project_to_budget(const StateVector& clean, StateVector& state, double budget) {
    const cxd c = inner_product(clean, state);
    const double dist = std::sqrt(std::max(0.0, 1.0 - std::min(1.0, std::norm(c))));
    if (dist <= budget + 1e-12) return;

    StateVector ortho = state;
    for (std::size_t i = 0; i < ortho.dim(); ++i) ortho.amps[i] -= c * clean.amps[i];
    double onorm = std::sqrt(ortho.norm_sq());
    if (onorm == 0.0) return;  // state is parallel to clean, nothing to pull
    const cxd phase = std::abs(c) > 0 ? c / std::abs(c) : cxd{1.0, 0.0};
    const double keep = std::sqrt(std::max(0.0, 1.0 - budget * budget));
    for (std::size_t i = 0; i < state.dim(); ++i) {
        state.amps[i] = phase * keep * clean.amps[i] + budget / onorm * ortho.amps[i];
    }
    state.normalize();
}

struct QbimOutcome {
    StateVector state;
    SampleAttackRecord record;
};

// one gradient-ascent run from a given starting state
QbimOutcome qbim_single_run(std::span<const ClassifierModel> models, const LabeledSample& sample,
                            const AttackConfig& config, const StateVector& start,
                            bool stop_on_success) {
    QbimOutcome out;
    out.state = start;
    // stop rule: budget-saturated misclassification of every model (a
    // fooled state strictly inside the ball keeps ascending the loss)
    auto should_stop = [&]() {
        if (!stop_on_success) return false;
        if (trace_distance_pure(sample.state, out.state) <
            config.epsilon_budget * (1.0 - 1e-9)) {
            return false;
        }
        return all_misclassify(models, out.state, sample.label);
    };

    double best_loss = -1.0;
    int stalled = 0;

    for (int it = 0; it < config.max_iters; ++it) {
        if (should_stop()) break;

        // ascent direction dL/d(conj psi) = sum_m -(1/q_m) M_m psi; each
        // model's term saturates once it is fooled with margin
        // (q_m < kLossSaturation), otherwise the exploding -log q of an
        // already-deceived classifier starves the remaining ones
        StateVector grad;
        grad.n_qubits = out.state.n_qubits;
        grad.amps.assign(out.state.dim(), cxd{0.0, 0.0});
        double loss = 0.0;
        for (const ClassifierModel& m : models) {
            double q = 0.0;
            StateVector mpsi = probability_backprop(m, out.state, sample.label, &q);
            loss += -std::log(std::max(q, config.prob_floor));
            // saturation only matters when several models compete; a lone
            // surrogate is pushed to maximum confidence, which is what
            // makes its examples transfer
            if (models.size() > 1 && q < kLossSaturation) continue;
            const double coeff = -1.0 / std::max(q, config.prob_floor);
            for (std::size_t i = 0; i < grad.dim(); ++i) grad.amps[i] += coeff * mpsi.amps[i];
        }
        double gnorm = std::sqrt(grad.norm_sq());
        if (!std::isfinite(gnorm)) {
            throw std::runtime_error("qbim_state_attack: non-finite gradient");
        }
        if (gnorm < 1e-14) break;  // stationary

        // the constrained ascent has converged when the objective stops
        // moving; without this, unfooled samples burn max_iters in place
        if (loss > best_loss + 1e-7) {
            best_loss = loss;
            stalled = 0;
        } else if (++stalled >= 12) {
            break;
        }

        for (std::size_t i = 0; i < out.state.dim(); ++i) {
            out.state.amps[i] += config.step_alpha / gnorm * grad.amps[i];
        }
        out.state.normalize();
        project_to_budget(sample.state, out.state, config.epsilon_budget);
        out.record.iterations += 1;
    }

    all_misclassify(models, out.state, sample.label, &out.record.fooled);
    summed_loss(models, out.state, sample.label, config.prob_floor, &out.record.final_loss);
    out.record.fidelity = fidelity_squared(sample.state, out.state);
    return out;
}

bool fully_fooled(const SampleAttackRecord& rec) {
    return !rec.fooled.empty() &&
           std::all_of(rec.fooled.begin(), rec.fooled.end(), [](std::uint8_t f) { return f != 0; });
}

// a point on the budget sphere at 0.9 * budget from the clean state, in a
// seeded Haar-random direction
StateVector sphere_start(const StateVector& clean, double budget, std::uint64_t seed) {
    StateVector w = haar_random_state(clean.n_qubits, seed);
    const cxd c = inner_product(clean, w);
    for (std::size_t i = 0; i < w.dim(); ++i) w.amps[i] -= c * clean.amps[i];
    const double wn = std::sqrt(w.norm_sq());
    if (wn < 1e-9) return clean;
    const double s = 0.9 * budget;
    StateVector out = clean;
    for (std::size_t i = 0; i < out.dim(); ++i) {
        out.amps[i] = std::sqrt(1.0 - s * s) * clean.amps[i] + s / wn * w.amps[i];
    }
    out.normalize();
    return out;
}

QbimOutcome qbim_iterate(std::span<const ClassifierModel> models, const LabeledSample& sample,
                         const AttackConfig& config, const StateVector* warm_start,
                         std::uint64_t stream = 0, bool stop_on_success = true) {
    check_models(models, sample);
    config.validate();

    std::vector<double> initial_loss;
    summed_loss(models, sample.state, sample.label, config.prob_floor, &initial_loss);

    if (config.epsilon_budget <= 0.0 || config.max_iters == 0) {
        QbimOutcome out;
        out.state = (warm_start && config.epsilon_budget > 0.0) ? *warm_start : sample.state;
        out.record.initial_loss = initial_loss;
        all_misclassify(models, out.state, sample.label, &out.record.fooled);
        summed_loss(models, out.state, sample.label, config.prob_floor, &out.record.final_loss);
        out.record.fidelity = fidelity_squared(sample.state, out.state);
        return out;
    }

    QbimOutcome best = qbim_single_run(models, sample, config,
                                       warm_start ? *warm_start : sample.state, stop_on_success);
    best.record.initial_loss = initial_loss;
    for (int r = 0; r < config.restarts && !fully_fooled(best.record); ++r) {
        const std::uint64_t s = mix_seed(config.seed, 0x5ee0u + 1024 * stream + r);
        QbimOutcome probe = qbim_single_run(models, sample, config,
                                            sphere_start(sample.state, config.epsilon_budget, s),
                                            stop_on_success);
        probe.record.initial_loss = initial_loss;
        double best_sum = 0.0, probe_sum = 0.0;
        for (double l : best.record.final_loss) best_sum += l;
        for (double l : probe.record.final_loss) probe_sum += l;
        if (fully_fooled(probe.record) || probe_sum > best_sum) best = std::move(probe);
    }
    return best;
}

AttackReport summarize(std::vector<SampleAttackRecord> records, double epsilon,
                       std::uint64_t seed) {
    AttackReport report;
    report.records = std::move(records);
    report.epsilon = epsilon;
    report.seed = seed;
    double fooled_count = 0.0, fid_all = 0.0, fid_fooled = 0.0;
    for (const SampleAttackRecord& r : report.records) {
        const bool universal =
            !r.fooled.empty() && std::all_of(r.fooled.begin(), r.fooled.end(),
                                             [](std::uint8_t f) { return f != 0; });
        fid_all += r.fidelity;
        if (universal) {
            fooled_count += 1.0;
            fid_fooled += r.fidelity;
        }
    }
    const double n = static_cast<double>(report.records.size());
    report.universal_risk = n > 0 ? fooled_count / n : 0.0;
    report.mean_fidelity = n > 0 ? fid_all / n : 1.0;
    report.mean_fidelity_fooled = fooled_count > 0 ? fid_fooled / fooled_count : 1.0;
    return report;
}

}  // namespace

void AttackConfig::validate() const {
    if (step_alpha <= 0) throw std::invalid_argument("step_alpha must be > 0");
    if (epsilon_budget < 0) throw std::invalid_argument("epsilon_budget must be >= 0");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
    if (restarts < 0) throw std::invalid_argument("restarts must be >= 0");
    if (prob_floor <= 0) throw std::invalid_argument("prob_floor must be > 0");
}

PerturbationLayer PerturbationLayer::identity(int n_qubits) {
    PerturbationLayer l;
    l.n_qubits = n_qubits;
    l.angles.assign(3 * static_cast<std::size_t>(n_qubits), 0.0);
    return l;
}

bool PerturbationLayer::is_identity() const {
    return std::all_of(angles.begin(), angles.end(), [](double a) { return a == 0.0; });
}

std::vector<GateOp> PerturbationLayer::gates() const {
    std::vector<GateOp> out;
    out.reserve(angles.size());
    for (int q = 0; q < n_qubits; ++q) {
        out.push_back(GateOp::rz(q, angles[3 * q + 0]));
        out.push_back(GateOp::rx(q, angles[3 * q + 1]));
        out.push_back(GateOp::rz(q, angles[3 * q + 2]));
    }
    return out;
}

StateVector PerturbationLayer::apply(const StateVector& state) const {
    if (state.n_qubits != n_qubits) {
        throw std::invalid_argument("PerturbationLayer: qubit count mismatch");
    }
    const auto g = gates();
    return apply_circuit(state, g);
}

StateVector PerturbationLayer::apply_inverse(const StateVector& state) const {
    if (state.n_qubits != n_qubits) {
        throw std::invalid_argument("PerturbationLayer: qubit count mismatch");
    }
    const auto g = gates();
    return apply_circuit_inverse(state, g);
}

std::pair<StateVector, SampleAttackRecord> qbim_state_attack(
    std::span<const ClassifierModel> models, const LabeledSample& sample,
    const AttackConfig& config, const StateVector* warm_start) {
    QbimOutcome out = qbim_iterate(models, sample, config, warm_start);
    return {std::move(out.state), std::move(out.record)};
}

AttackReport universal_example_search(std::span<const ClassifierModel> models,
                                      const LabeledDataset& test_set, const AttackConfig& config) {
    std::vector<SampleAttackRecord> records;
    records.reserve(test_set.samples.size());
    for (std::size_t i = 0; i < test_set.samples.size(); ++i) {
        records.push_back(qbim_iterate(models, test_set.samples[i], config, nullptr, i).record);
    }
    return summarize(std::move(records), config.epsilon_budget, config.seed);
}

AttackReport transfer_attack_eval(const ClassifierModel& surrogate,
                                  std::span<const ClassifierModel> targets,
                                  const LabeledDataset& test_set, const AttackConfig& config) {
    if (targets.empty()) throw std::invalid_argument("transfer: target ensemble is empty");
    std::vector<SampleAttackRecord> records;
    records.reserve(test_set.samples.size());
    const std::span<const ClassifierModel> attack_set{&surrogate, 1};
    for (std::size_t i = 0; i < test_set.samples.size(); ++i) {
        const LabeledSample& s = test_set.samples[i];
        // crafting maximizes the surrogate loss fully; stopping at the
        // surrogate's first misclassification leaves no margin to carry
        // over to the unseen targets
        QbimOutcome out = qbim_iterate(attack_set, s, config, nullptr, i, false);
        all_misclassify(targets, out.state, s.label, &out.record.fooled);
        records.push_back(std::move(out.record));
    }
    return summarize(std::move(records), config.epsilon_budget, config.seed);
}

namespace {

RiskCurve curve_impl(std::span<const ClassifierModel> attack_set,
                     std::span<const ClassifierModel> eval_set, const LabeledDataset& test_set,
                     std::span<const double> epsilon_grid, const AttackConfig& config,
                     bool stop_on_success) {
    for (std::size_t i = 1; i < epsilon_grid.size(); ++i) {
        if (epsilon_grid[i] < epsilon_grid[i - 1]) {
            throw std::invalid_argument("risk_curve: epsilon grid must be ascending");
        }
    }
    RiskCurve curve;
    curve.n_samples = static_cast<int>(test_set.samples.size());
    curve.seed = config.seed;

    std::vector<StateVector> adv;
    adv.reserve(test_set.samples.size());
    for (const LabeledSample& s : test_set.samples) adv.push_back(s.state);
    std::vector<bool> done(test_set.samples.size(), false);

    for (double eps : epsilon_grid) {
        AttackConfig step = config;
        step.epsilon_budget = eps;
        std::vector<SampleAttackRecord> records(test_set.samples.size());
        for (std::size_t i = 0; i < test_set.samples.size(); ++i) {
            const LabeledSample& s = test_set.samples[i];
            if (!done[i] && eps > 0.0) {
                QbimOutcome out = qbim_iterate(attack_set, s, step, &adv[i], i, stop_on_success);
                adv[i] = std::move(out.state);
            }
            SampleAttackRecord rec;
            const StateVector& state = eps > 0.0 ? adv[i] : s.state;
            const bool fooled = all_misclassify(eval_set, state, s.label, &rec.fooled);
            rec.fidelity = fidelity_squared(s.state, state);
            records[i] = std::move(rec);
            // a fooled sample keeps its state at larger budgets, so the
            // curve is monotone by nesting, not just statistically
            if (fooled) done[i] = true;
        }
        AttackReport report = summarize(std::move(records), eps, config.seed);
        curve.epsilon.push_back(eps);
        curve.risk.push_back(report.universal_risk);
        curve.mean_fidelity.push_back(report.mean_fidelity);
    }
    return curve;
}

}  // namespace

RiskCurve risk_curve(std::span<const ClassifierModel> models, const LabeledDataset& test_set,
                     std::span<const double> epsilon_grid, const AttackConfig& config) {
    return curve_impl(models, models, test_set, epsilon_grid, config, true);
}

RiskCurve transfer_risk_curve(const ClassifierModel& surrogate,
                              std::span<const ClassifierModel> targets,
                              const LabeledDataset& test_set, std::span<const double> epsilon_grid,
                              const AttackConfig& config) {
    const std::span<const ClassifierModel> attack_set{&surrogate, 1};
    return curve_impl(attack_set, targets, test_set, epsilon_grid, config, false);
}

std::pair<PerturbationLayer, AttackReport> universal_perturbation_search(
    const ClassifierModel& model, const LabeledDataset& test_set, const AttackConfig& config,
    PerturbationTrace* trace) {
    config.validate();
    if (test_set.samples.empty()) {
        throw std::invalid_argument("universal_perturbation_search: empty test set");
    }
    const int n_in = model.spec.n_in;
    for (const LabeledSample& s : test_set.samples) {
        if (s.state.n_qubits != n_in) {
            throw std::invalid_argument("universal_perturbation_search: sample size mismatch");
        }
    }

    // Combined circuit: trainable Euler layer on the input register, then
    // the classifier with its parameters frozen in as constants.
    ParameterizedCircuit combined;
    combined.n_qubits = model.circuit.n_qubits;
    combined.param_count = 3 * n_in;
    for (int q = 0; q < n_in; ++q) {
        combined.gates.push_back({GateKind::RZ, q, -1, 3 * q + 0, 1.0, 0.0});
        combined.gates.push_back({GateKind::RX, q, -1, 3 * q + 1, 1.0, 0.0});
        combined.gates.push_back({GateKind::RZ, q, -1, 3 * q + 2, 1.0, 0.0});
    }
    for (const ParamGate& g : model.circuit.gates) {
        combined.gates.push_back(
            {g.kind, g.target, g.control, -1, 1.0, model.circuit.angle_of(g, model.params)});
    }

    PerturbationLayer layer = PerturbationLayer::identity(n_in);
    const auto occurrences = combined.parameterized_occurrences();
    const int readout[] = {model.spec.readout_qubit};

    auto mean_loss_and_accuracy = [&](std::span<const double> angles) {
        double loss = 0.0, correct = 0.0;
        for (const LabeledSample& s : test_set.samples) {
            const StateVector total = embed_with_readout(s.state);
            const auto probs = measure_probabilities(combined.apply(total, angles), readout);
            loss += cross_entropy(probs, s.label, config.prob_floor);
            if (label_from_probs(probs) == s.label) correct += 1.0;
        }
        const double n = static_cast<double>(test_set.samples.size());
        return std::pair{loss / n, correct / n};
    };
    auto mean_eps_proxy = [&](const PerturbationLayer& l) {
        double d = 0.0;
        for (const LabeledSample& s : test_set.samples) {
            d += trace_distance_pure(s.state, l.apply(s.state));
        }
        return d / static_cast<double>(test_set.samples.size());
    };
    auto mean_gradient = [&](std::span<const double> angles) {
        std::vector<double> grad(combined.param_count, 0.0);
        for (const LabeledSample& s : test_set.samples) {
            const StateVector total = embed_with_readout(s.state);
            if (config.gradient == GradientMethod::Adjoint) {
                const ReadoutGradient rg = readout_probability_gradient(
                    combined, angles, total, model.spec.readout_qubit, s.label);
                const double coeff = rg.probability > config.prob_floor ? -1.0 / rg.probability : 0.0;
                for (int j = 0; j < combined.param_count; ++j) grad[j] += coeff * rg.grad[j];
            } else {
                const auto base = measure_probabilities(combined.apply(total, angles), readout);
                const double coeff =
                    base[s.label] > config.prob_floor ? -1.0 / base[s.label] : 0.0;
                if (coeff == 0.0) continue;
                for (std::size_t occ : occurrences) {
                    const ParamGate& g = combined.gates[occ];
                    const auto up = measure_probabilities(
                        combined.apply_with_occurrence_shift(total, angles, occ, M_PI / 2), readout);
                    const auto down = measure_probabilities(
                        combined.apply_with_occurrence_shift(total, angles, occ, -M_PI / 2), readout);
                    grad[g.param_index] += g.scale * coeff * (up[s.label] - down[s.label]) / 2.0;
                }
            }
        }
        for (double& g : grad) g /= static_cast<double>(test_set.samples.size());
        return grad;
    };

    auto [loss, accuracy] = mean_loss_and_accuracy(layer.angles);
    if (trace) {
        trace->eps_proxy.push_back(0.0);
        trace->mean_loss.push_back(loss);
        trace->accuracy.push_back(accuracy);
    }

    double step = config.step_alpha;
    int accepted = 0;
    while (accepted < config.max_iters && step > 1e-12) {
        const auto grad = mean_gradient(layer.angles);
        double gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        gnorm = std::sqrt(gnorm);
        if (!std::isfinite(gnorm)) {
            throw std::runtime_error("universal_perturbation_search: non-finite gradient");
        }
        if (gnorm < 1e-14) break;

        bool moved = false;
        std::vector<double> trial(layer.angles.size());
        while (step > 1e-12) {
            for (std::size_t j = 0; j < trial.size(); ++j) {
                trial[j] = layer.angles[j] + step / gnorm * grad[j];
            }
            const auto [trial_loss, trial_acc] = mean_loss_and_accuracy(trial);
            if (trial_loss >= loss) {
                layer.angles = trial;
                loss = trial_loss;
                accuracy = trial_acc;
                moved = true;
                break;
            }
            step /= 2.0;  // reject and halve
        }
        if (!moved) break;

        accepted += 1;
        const double eps = mean_eps_proxy(layer);
        if (trace) {
            trace->eps_proxy.push_back(eps);
            trace->mean_loss.push_back(loss);
            trace->accuracy.push_back(accuracy);
        }
        if (config.epsilon_budget > 0.0 && eps >= config.epsilon_budget) break;
    }

    // final per-sample records against the single attacked classifier
    std::vector<SampleAttackRecord> records;
    records.reserve(test_set.samples.size());
    const std::span<const ClassifierModel> one{&model, 1};
    for (const LabeledSample& s : test_set.samples) {
        SampleAttackRecord rec;
        summed_loss(one, s.state, s.label, config.prob_floor, &rec.initial_loss);
        const StateVector perturbed = layer.apply(s.state);
        summed_loss(one, perturbed, s.label, config.prob_floor, &rec.final_loss);
        all_misclassify(one, perturbed, s.label, &rec.fooled);
        rec.fidelity = fidelity_squared(s.state, perturbed);
        rec.iterations = accepted;
        records.push_back(std::move(rec));
    }
    return {std::move(layer), summarize(std::move(records), config.epsilon_budget, config.seed)};
}

double empirical_error_rate(const ClassifierModel& model, const PerturbationLayer& layer,
                            std::span<const LabeledSample> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical_error_rate: empty sample list");
    double wrong = 0.0;
    for (const LabeledSample& s : samples) {
        const StateVector& input = s.state;
        const int pred =
            layer.is_identity() ? predict(model, input) : predict(model, layer.apply(input));
        if (pred != s.label) wrong += 1.0;
    }
    return wrong / static_cast<double>(samples.size());
}

double haar_risk_estimate(const ClassifierModel& model, const ClassifierModel& truth,
                          const PerturbationLayer* layer, int n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("haar_risk_estimate: n_samples must be >= 1");
    if (model.spec.n_in != truth.spec.n_in) {
        throw std::invalid_argument("haar_risk_estimate: model and truth sizes differ");
    }
    double wrong = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        StateVector psi = haar_random_state(model.spec.n_in, mix_seed(seed, i));
        if (layer) psi = layer->apply(psi);
        if (predict(model, psi) != predict(truth, psi)) wrong += 1.0;
    }
    return wrong / static_cast<double>(n_samples);
}

}  // namespace qadv
