#include "qadv/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qadv/rng.hpp"

namespace qadv {

namespace {

std::size_t checked_dim(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 30) {
        throw std::invalid_argument("StateVector: n_qubits must be in [1, 30], got " +
                                    std::to_string(n_qubits));
    }
    return std::size_t{1} << n_qubits;
}

void check_qubit(const StateVector& state, int q, const char* what) {
    if (q < 0 || q >= state.n_qubits) {
        throw std::invalid_argument(std::string("invalid gate: ") + what + " qubit " +
                                    std::to_string(q) + " out of range for " +
                                    std::to_string(state.n_qubits) + " qubits");
    }
}

}  // namespace

StateVector::StateVector(int n, std::vector<cxd> a) : n_qubits(n), amps(std::move(a)) {
    if (amps.size() != checked_dim(n)) {
        throw std::invalid_argument("StateVector: amplitude count " + std::to_string(amps.size()) +
                                    " does not equal 2^" + std::to_string(n));
    }
}

double StateVector::norm_sq() const {
    double s = 0.0;
    for (const cxd& a : amps) s += std::norm(a);
    return s;
}

void StateVector::normalize() {
    double n = std::sqrt(norm_sq());
    if (n == 0.0) throw std::invalid_argument("StateVector: cannot normalize the zero vector");
    for (cxd& a : amps) a /= n;
}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
    std::size_t d = checked_dim(n_qubits);
    if (index >= d) throw std::invalid_argument("StateVector::basis: index out of range");
    StateVector s;
    s.n_qubits = n_qubits;
    s.amps.assign(d, cxd{0.0, 0.0});
    s.amps[index] = 1.0;
    return s;
}

void StateVector::validate() const {
    checked_dim(n_qubits);
    if (amps.size() != (std::size_t{1} << n_qubits)) {
        throw std::invalid_argument("StateVector: length is not 2^n_qubits");
    }
    if (std::abs(norm_sq() - 1.0) > 1e-10) {
        throw std::invalid_argument("StateVector: norm differs from 1 by more than 1e-10");
    }
}

GateOp GateOp::inverse() const {
    GateOp g = *this;
    g.angle = -g.angle;  // CNOT is self-inverse, angle unused
    return g;
}

std::string GateOp::describe() const {
    switch (kind) {
        case GateKind::RX: return "RX(" + std::to_string(angle) + ") q" + std::to_string(target);
        case GateKind::RZ: return "RZ(" + std::to_string(angle) + ") q" + std::to_string(target);
        case GateKind::CNOT:
            return "CNOT q" + std::to_string(control) + "->q" + std::to_string(target);
    }
    return "?";
}

void apply_gate_inplace(StateVector& state, const GateOp& gate) {
    check_qubit(state, gate.target, "target");
    const int n = state.n_qubits;
    const std::size_t dim = state.dim();
    const std::size_t tmask = std::size_t{1} << (n - 1 - gate.target);
    cxd* a = state.amps.data();

    switch (gate.kind) {
        case GateKind::RX: {
            const double c = std::cos(gate.angle / 2.0);
            const cxd mis{0.0, -std::sin(gate.angle / 2.0)};
            for (std::size_t i = 0; i < dim; ++i) {
                if (i & tmask) continue;
                const std::size_t j = i | tmask;
                const cxd a0 = a[i], a1 = a[j];
                a[i] = c * a0 + mis * a1;
                a[j] = mis * a0 + c * a1;
            }
            break;
        }
        case GateKind::RZ: {
            const cxd p0 = std::polar(1.0, -gate.angle / 2.0);
            const cxd p1 = std::polar(1.0, gate.angle / 2.0);
            for (std::size_t i = 0; i < dim; ++i) {
                a[i] *= (i & tmask) ? p1 : p0;
            }
            break;
        }
        case GateKind::CNOT: {
            check_qubit(state, gate.control, "control");
            if (gate.control == gate.target) {
                throw std::invalid_argument("invalid gate: CNOT control equals target");
            }
            const std::size_t cmask = std::size_t{1} << (n - 1 - gate.control);
            for (std::size_t i = 0; i < dim; ++i) {
                if ((i & cmask) && !(i & tmask)) std::swap(a[i], a[i | tmask]);
            }
            break;
        }
    }
}

StateVector apply_gate(const StateVector& state, const GateOp& gate) {
    StateVector out = state;
    apply_gate_inplace(out, gate);
    return out;
}

StateVector apply_circuit(const StateVector& state, std::span<const GateOp> gates) {
    StateVector out = state;
    for (const GateOp& g : gates) apply_gate_inplace(out, g);
    return out;
}

StateVector apply_circuit_inverse(const StateVector& state, std::span<const GateOp> gates) {
    StateVector out = state;
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        apply_gate_inplace(out, it->inverse());
    }
    return out;
}

std::vector<double> measure_probabilities(const StateVector& state, std::span<const int> qubits) {
    if (qubits.empty()) throw std::invalid_argument("measure_probabilities: empty qubit list");
    if (qubits.size() > 30) throw std::invalid_argument("measure_probabilities: too many qubits");
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        check_qubit(state, qubits[i], "measured");
        for (std::size_t j = i + 1; j < qubits.size(); ++j) {
            if (qubits[i] == qubits[j]) {
                throw std::invalid_argument("measure_probabilities: duplicate qubit " +
                                            std::to_string(qubits[i]));
            }
        }
    }
    const int n = state.n_qubits;
    std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
    for (std::size_t i = 0; i < state.dim(); ++i) {
        std::size_t outcome = 0;
        for (int q : qubits) {
            outcome = (outcome << 1) | ((i >> (n - 1 - q)) & 1);
        }
        probs[outcome] += std::norm(state.amps[i]);
    }
    return probs;
}

namespace {
void check_same_dims(const StateVector& a, const StateVector& b, const char* op) {
    if (a.n_qubits != b.n_qubits) {
        throw std::invalid_argument(std::string(op) + ": qubit counts differ (" +
                                    std::to_string(a.n_qubits) + " vs " +
                                    std::to_string(b.n_qubits) + ")");
    }
}
}  // namespace

cxd inner_product(const StateVector& a, const StateVector& b) {
    check_same_dims(a, b, "inner_product");
    cxd s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
    return s;
}

double overlap_fidelity(const StateVector& a, const StateVector& b) {
    return std::min(1.0, std::abs(inner_product(a, b)));
}

double fidelity_squared(const StateVector& a, const StateVector& b) {
    double f = overlap_fidelity(a, b);
    return f * f;
}

double trace_distance_pure(const StateVector& a, const StateVector& b) {
    return std::sqrt(std::max(0.0, 1.0 - fidelity_squared(a, b)));
}

double hs_distance_pure(const StateVector& a, const StateVector& b) {
    return std::sqrt(2.0) * trace_distance_pure(a, b);
}

StateVector haar_random_state(int n_qubits, std::uint64_t seed) {
    std::size_t d = checked_dim(n_qubits);
    Rng rng(seed);
    StateVector s;
    s.n_qubits = n_qubits;
    s.amps.resize(d);
    for (cxd& a : s.amps) {
        double re = rng.gaussian();
        double im = rng.gaussian();
        a = cxd{re, im};
    }
    s.normalize();
    return s;
}

}  // namespace qadv
