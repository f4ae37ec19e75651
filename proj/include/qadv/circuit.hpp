#pragma once

#include <span>
#include <vector>

#include "qadv/state.hpp"

namespace qadv {

/// Gate slot in a parameterized circuit. The effective angle is
/// scale * params[param_index] + offset; param_index = -1 marks a fixed
/// gate (entangler CNOTs, basis-change rotations). Several slots may share
/// one param_index (QCNN weight sharing), and scale != 1 appears in the
/// controlled-rotation decomposition used by pooling layers.
struct ParamGate {
    GateKind kind;
    int target = 0;
    int control = -1;
    int param_index = -1;
    double scale = 1.0;
    double offset = 0.0;
};

struct ParameterizedCircuit {
    int n_qubits = 0;
    int param_count = 0;
    std::vector<ParamGate> gates;

    double angle_of(const ParamGate& g, std::span<const double> params) const;

    /// Materialize with concrete parameter values.
    std::vector<GateOp> instantiate(std::span<const double> params) const;

    StateVector apply(const StateVector& input, std::span<const double> params) const;
    StateVector apply_inverse(const StateVector& input, std::span<const double> params) const;

    /// Apply with a single gate occurrence's angle shifted by delta
    /// (parameter-shift evaluations act on occurrences, not parameters,
    /// so shared parameters differentiate correctly).
    StateVector apply_with_occurrence_shift(const StateVector& input,
                                            std::span<const double> params,
                                            std::size_t occurrence, double delta) const;

    /// Indices into `gates` of the parameterized slots, in circuit order.
    std::vector<std::size_t> parameterized_occurrences() const;

    void check_params(std::span<const double> params) const;
};

/// Zero out amplitudes whose readout-qubit bit differs from `label`.
/// This is the projector P_label; the result is unnormalized.
StateVector project_readout(const StateVector& state, int readout_qubit, int label);

/// Probability of measuring `label` on `readout_qubit` after the circuit,
/// together with its exact gradient with respect to every parameter,
/// computed by one forward and one adjoint sweep. Identical (to float
/// noise) to the parameter-shift values, since every parameterized gate
/// is a Pauli rotation with generator eigenvalues +-1/2.
struct ReadoutGradient {
    double probability = 0.0;
    std::vector<double> grad;
};
ReadoutGradient readout_probability_gradient(const ParameterizedCircuit& circuit,
                                             std::span<const double> params,
                                             const StateVector& input, int readout_qubit,
                                             int label);

}  // namespace qadv
