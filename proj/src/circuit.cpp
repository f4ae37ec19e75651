#include "qadv/circuit.hpp"

#include <stdexcept>
#include <string>

namespace qadv {

double ParameterizedCircuit::angle_of(const ParamGate& g, std::span<const double> params) const {
    if (g.param_index < 0) return g.offset;
    return g.scale * params[g.param_index] + g.offset;
}

void ParameterizedCircuit::check_params(std::span<const double> params) const {
    if (static_cast<int>(params.size()) != param_count) {
        throw std::invalid_argument("circuit expects " + std::to_string(param_count) +
                                    " parameters, got " + std::to_string(params.size()));
    }
}

std::vector<GateOp> ParameterizedCircuit::instantiate(std::span<const double> params) const {
    check_params(params);
    std::vector<GateOp> out;
    out.reserve(gates.size());
    for (const ParamGate& g : gates) {
        if (g.kind == GateKind::CNOT) {
            out.push_back(GateOp::cnot(g.control, g.target));
        } else {
            out.push_back({g.kind, g.target, -1, angle_of(g, params)});
        }
    }
    return out;
}

StateVector ParameterizedCircuit::apply(const StateVector& input,
                                        std::span<const double> params) const {
    check_params(params);
    StateVector s = input;
    for (const ParamGate& g : gates) {
        apply_gate_inplace(s, {g.kind, g.target, g.control, angle_of(g, params)});
    }
    return s;
}

StateVector ParameterizedCircuit::apply_inverse(const StateVector& input,
                                                std::span<const double> params) const {
    check_params(params);
    StateVector s = input;
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        apply_gate_inplace(s, {it->kind, it->target, it->control, -angle_of(*it, params)});
    }
    return s;
}

StateVector ParameterizedCircuit::apply_with_occurrence_shift(const StateVector& input,
                                                              std::span<const double> params,
                                                              std::size_t occurrence,
                                                              double delta) const {
    check_params(params);
    if (occurrence >= gates.size() || gates[occurrence].param_index < 0) {
        throw std::invalid_argument("apply_with_occurrence_shift: not a parameterized slot");
    }
    StateVector s = input;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const ParamGate& g = gates[i];
        double a = angle_of(g, params);
        if (i == occurrence) a += delta;
        apply_gate_inplace(s, {g.kind, g.target, g.control, a});
    }
    return s;
}

std::vector<std::size_t> ParameterizedCircuit::parameterized_occurrences() const {
    std::vector<std::size_t> occ;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        if (gates[i].param_index >= 0) occ.push_back(i);
    }
    return occ;
}

StateVector project_readout(const StateVector& state, int readout_qubit, int label) {
    if (readout_qubit < 0 || readout_qubit >= state.n_qubits) {
        throw std::invalid_argument("project_readout: qubit out of range");
    }
    const std::size_t mask = std::size_t{1} << (state.n_qubits - 1 - readout_qubit);
    StateVector out = state;
    for (std::size_t i = 0; i < out.dim(); ++i) {
        const int bit = (i & mask) ? 1 : 0;
        if (bit != label) out.amps[i] = cxd{0.0, 0.0};
    }
    return out;
}

ReadoutGradient readout_probability_gradient(const ParameterizedCircuit& circuit,
                                             std::span<const double> params,
                                             const StateVector& input, int readout_qubit,
                                             int label) {
    circuit.check_params(params);
    ReadoutGradient out;
    out.grad.assign(circuit.param_count, 0.0);

    StateVector ket = circuit.apply(input, params);
    StateVector bra = project_readout(ket, readout_qubit, label);
    for (const cxd& a : bra.amps) out.probability += std::norm(a);

    // Adjoint sweep: before handling gate j, ket = G_j ... G_1 |in> and
    // bra = (G_n ... G_{j+1})^dag P |phi>. For G = exp(-i a P_pauli / 2),
    // dq/da = Im <bra| P_pauli |ket>.
    const int n = ket.n_qubits;
    for (std::size_t idx = circuit.gates.size(); idx-- > 0;) {
        const ParamGate& g = circuit.gates[idx];
        if (g.param_index >= 0) {
            const std::size_t tmask = std::size_t{1} << (n - 1 - g.target);
            double dq = 0.0;
            if (g.kind == GateKind::RX) {
                for (std::size_t i = 0; i < ket.dim(); ++i) {
                    dq += std::imag(std::conj(bra.amps[i]) * ket.amps[i ^ tmask]);
                }
            } else {  // RZ
                for (std::size_t i = 0; i < ket.dim(); ++i) {
                    const double sign = (i & tmask) ? -1.0 : 1.0;
                    dq += sign * std::imag(std::conj(bra.amps[i]) * ket.amps[i]);
                }
            }
            out.grad[g.param_index] += g.scale * dq;
        }
        const GateOp undo{g.kind, g.target, g.control, -circuit.angle_of(g, params)};
        apply_gate_inplace(ket, undo);
        apply_gate_inplace(bra, undo);
    }
    return out;
}

}  // namespace qadv
