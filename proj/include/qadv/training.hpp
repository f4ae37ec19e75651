#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qadv/data.hpp"
#include "qadv/model.hpp"

namespace qadv {

enum class GradientMethod {
    Adjoint,        // analytic back-propagation; equals the shift values exactly
    ParameterShift  // literal two-evaluation rule per gate occurrence
};

struct TrainConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int batch_size = 30;
    int epochs = 40;
    std::uint64_t seed = 0;
    double prob_floor = 1e-12;  // clamp inside the log
    GradientMethod gradient = GradientMethod::Adjoint;

    void validate() const;
};

struct AdamState {
    std::vector<double> m, v;
    long step = 0;

    static AdamState zeros(std::size_t param_count);
};

struct TrainHistory {
    std::vector<double> train_loss, train_acc, val_loss, val_acc;

    std::size_t epochs() const { return train_loss.size(); }
};

/// -log(max(probs[label], floor)), natural log; p is one-hot at `label`.
double cross_entropy(std::span<const double> probs, int label, double floor = 1e-12);

/// Batch-mean gradient of the empirical loss via the parameter-shift rule:
/// every parameterized occurrence is evaluated at +-pi/2, chained through
/// dL/dq = -1/q. Shared parameters sum their occurrences' contributions.
std::vector<double> gradient_parameter_shift(const ClassifierModel& model,
                                             std::span<const LabeledSample> batch,
                                             double floor = 1e-12);

/// Central-difference oracle, [L(t+h) - L(t-h)] / 2h per component.
std::vector<double> gradient_finite_difference(const ClassifierModel& model,
                                               std::span<const LabeledSample> batch, double h,
                                               double floor = 1e-12);

/// Adjoint-mode gradient; bit-stable ordered reduction over the batch.
std::vector<double> gradient_adjoint(const ClassifierModel& model,
                                     std::span<const LabeledSample> batch, double floor = 1e-12);

std::vector<double> batch_gradient(const ClassifierModel& model,
                                   std::span<const LabeledSample> batch, GradientMethod method,
                                   double floor = 1e-12);

/// Mean empirical loss over the batch.
double batch_loss(const ClassifierModel& model, std::span<const LabeledSample> batch,
                  double floor = 1e-12);

/// Standard bias-corrected Adam update (minimization); deterministic.
void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state,
               const TrainConfig& config);

/// Mini-batch Adam loop: shuffle per epoch by seed, history per epoch,
/// returns the parameters with the best validation accuracy.
std::pair<ClassifierModel, TrainHistory> train(const ClassifierModel& model,
                                               const LabeledDataset& train_set,
                                               const LabeledDataset& val_set,
                                               const TrainConfig& config);

/// (accuracy, mean cross-entropy).
std::pair<double, double> evaluate(const ClassifierModel& model, const LabeledDataset& dataset);

/// History CSV: epoch, train_loss, train_acc, val_loss, val_acc.
std::string format_history_csv(const TrainHistory& history,
                               std::span<const std::string> meta_lines);

}  // namespace qadv
