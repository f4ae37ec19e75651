#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qadv/data.hpp"
#include "qadv/model.hpp"
#include "qadv/training.hpp"

namespace qadv {

struct AttackConfig {
    double step_alpha = 0.02;
    double epsilon_budget = 0.0;  // trace-distance units
    int max_iters = 100;
    int restarts = 0;  // extra seeded starts on the budget sphere per sample
    enum class Mode { WhiteBox, Transfer } mode = Mode::WhiteBox;
    std::uint64_t seed = 0;
    double prob_floor = 1e-12;
    GradientMethod gradient = GradientMethod::Adjoint;  // perturbation search only

    void validate() const;
};

/// One fixed unitary perturbation: a per-qubit Euler triple, applied as
/// RZ(angles[3q]) then RX(angles[3q+1]) then RZ(angles[3q+2]) on each
/// qubit (the operator Z(c)X(b)Z(a)). All-zero angles is the identity.
struct PerturbationLayer {
    int n_qubits = 0;
    std::vector<double> angles;

    static PerturbationLayer identity(int n_qubits);
    bool is_identity() const;
    std::vector<GateOp> gates() const;
    StateVector apply(const StateVector& state) const;
    StateVector apply_inverse(const StateVector& state) const;
};

struct SampleAttackRecord {
    std::vector<double> initial_loss, final_loss;  // per attacked classifier
    std::vector<std::uint8_t> fooled;              // per evaluated classifier
    double fidelity = 1.0;                         // squared overlap with the clean state
    int iterations = 0;
};

struct AttackReport {
    std::vector<SampleAttackRecord> records;
    double universal_risk = 0.0;       // fooled-by-all fraction
    double mean_fidelity = 1.0;        // over all attacked samples
    double mean_fidelity_fooled = 1.0; // over fooled-by-all samples (1 when none)
    double epsilon = 0.0;
    std::uint64_t seed = 0;

    std::size_t n_samples() const { return records.size(); }
};

/// Iterative ascent on the summed cross-entropy of all listed models:
/// move the amplitudes by step_alpha along the normalized loss gradient,
/// renormalize, pull back to the trace-distance budget sphere, stop once
/// every model misclassifies or max_iters is reached. An optional warm
/// start continues from a previous adversarial state.
std::pair<StateVector, SampleAttackRecord> qbim_state_attack(
    std::span<const ClassifierModel> models, const LabeledSample& sample,
    const AttackConfig& config, const StateVector* warm_start = nullptr);

/// Per-sample qBIM with the summed-loss objective; a sample is universal
/// iff every model misclassifies its perturbed state.
AttackReport universal_example_search(std::span<const ClassifierModel> models,
                                      const LabeledDataset& test_set, const AttackConfig& config);

/// Adversarial states crafted against the surrogate only, then evaluated
/// on every target; reports the joint-fool fraction.
AttackReport transfer_attack_eval(const ClassifierModel& surrogate,
                                  std::span<const ClassifierModel> targets,
                                  const LabeledDataset& test_set, const AttackConfig& config);

struct RiskCurve {
    std::vector<double> epsilon, risk, mean_fidelity;
    int n_samples = 0;
    std::uint64_t seed = 0;
};

/// One universal_example_search per epsilon, warm-started from the
/// previous grid point, so the curve is non-decreasing by construction.
RiskCurve risk_curve(std::span<const ClassifierModel> models, const LabeledDataset& test_set,
                     std::span<const double> epsilon_grid, const AttackConfig& config);

/// Warm-started transfer variant of risk_curve.
RiskCurve transfer_risk_curve(const ClassifierModel& surrogate,
                              std::span<const ClassifierModel> targets,
                              const LabeledDataset& test_set, std::span<const double> epsilon_grid,
                              const AttackConfig& config);

struct PerturbationTrace {
    std::vector<double> eps_proxy;  // mean trace distance induced by the layer
    std::vector<double> mean_loss;
    std::vector<double> accuracy;
};

/// Fixed-classifier ascent on the mean loss over the test set w.r.t. the
/// layer angles. A step is accepted only if the loss does not decrease;
/// otherwise it is halved and retried, so the accepted-loss trajectory is
/// monotone. Stops at max_iters accepted steps, at the epsilon budget, or
/// when the step underflows.
std::pair<PerturbationLayer, AttackReport> universal_perturbation_search(
    const ClassifierModel& model, const LabeledDataset& test_set, const AttackConfig& config,
    PerturbationTrace* trace = nullptr);

/// Fraction of samples misclassified after applying the layer.
double empirical_error_rate(const ClassifierModel& model, const PerturbationLayer& layer,
                            std::span<const LabeledSample> samples);

/// Monte-Carlo risk over Haar inputs: the truth model labels the same
/// (optionally layer-transformed) state the classifier sees, which is the
/// setting in which a fixed unitary layer leaves the risk invariant.
double haar_risk_estimate(const ClassifierModel& model, const ClassifierModel& truth,
                          const PerturbationLayer* layer, int n_samples, std::uint64_t seed);

}  // namespace qadv
