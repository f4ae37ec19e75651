#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qadv {

using cxd = std::complex<double>;

/// Pure state on n qubits as a dense amplitude vector.
/// Qubit 0 is the most significant bit of the basis-state index, so on two
/// qubits |10> means qubit 0 = 1, qubit 1 = 0 and lives at index 2.
struct StateVector {
    int n_qubits = 0;
    std::vector<cxd> amps;

    StateVector() = default;
    StateVector(int n, std::vector<cxd> a);

    std::size_t dim() const { return amps.size(); }

    double norm_sq() const;
    void normalize();  // throws on the zero vector

    /// |00...0> with the given basis index set to amplitude 1.
    static StateVector basis(int n_qubits, std::size_t index);

    /// Throws std::invalid_argument unless length is 2^n and norm is 1
    /// within 1e-10.
    void validate() const;
};

enum class GateKind { RX, RZ, CNOT };

/// One circuit element. Rotation convention (fixed here, the source papers
/// leave it open): RX(t) = exp(-i t X / 2), RZ(t) = exp(-i t Z / 2).
struct GateOp {
    GateKind kind;
    int target = 0;
    int control = -1;  // CNOT only
    double angle = 0.0;

    static GateOp rx(int target, double angle) { return {GateKind::RX, target, -1, angle}; }
    static GateOp rz(int target, double angle) { return {GateKind::RZ, target, -1, angle}; }
    static GateOp cnot(int control, int target) { return {GateKind::CNOT, target, control, 0.0}; }

    GateOp inverse() const;
    std::string describe() const;
};

void apply_gate_inplace(StateVector& state, const GateOp& gate);
StateVector apply_gate(const StateVector& state, const GateOp& gate);
StateVector apply_circuit(const StateVector& state, std::span<const GateOp> gates);
StateVector apply_circuit_inverse(const StateVector& state, std::span<const GateOp> gates);

/// Marginal probabilities of the computational outcomes on the listed
/// qubits (diagonal of the reduced density matrix). The first listed qubit
/// is the most significant bit of the outcome index.
std::vector<double> measure_probabilities(const StateVector& state, std::span<const int> qubits);

cxd inner_product(const StateVector& a, const StateVector& b);  // <a|b>

/// |<a|b>| (square-root fidelity).
double overlap_fidelity(const StateVector& a, const StateVector& b);
/// |<a|b>|^2 — the convention reported in experiment summaries.
double fidelity_squared(const StateVector& a, const StateVector& b);
/// sqrt(1 - |<a|b>|^2); for pure states this saturates D^2 <= 1 - F^2.
double trace_distance_pure(const StateVector& a, const StateVector& b);
/// sqrt(Tr[(rho-sigma)^2]) = sqrt(2) * trace_distance_pure for pure states.
double hs_distance_pure(const StateVector& a, const StateVector& b);

/// Normalized vector of 2^n independent standard complex Gaussians;
/// deterministic for a fixed seed.
StateVector haar_random_state(int n_qubits, std::uint64_t seed);

}  // namespace qadv
