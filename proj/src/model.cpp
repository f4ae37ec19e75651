#include "qadv/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qadv/io_util.hpp"
#include "qadv/rng.hpp"

namespace qadv {

namespace {

constexpr double kPi = 3.14159265358979323846;

void push_rotation_pair(ParameterizedCircuit& c, int qubit, int param_x, int param_z) {
    c.gates.push_back({GateKind::RX, qubit, -1, param_x, 1.0, 0.0});
    c.gates.push_back({GateKind::RZ, qubit, -1, param_z, 1.0, 0.0});
}

// Conv unit on (a, b): per-qubit X,Z rotations, CNOT a->b, per-qubit X,Z
// rotations. Consumes 8 parameter slots starting at `base`.
void push_conv_unit(ParameterizedCircuit& c, int a, int b, int base) {
    push_rotation_pair(c, a, base + 0, base + 1);
    push_rotation_pair(c, b, base + 2, base + 3);
    c.gates.push_back({GateKind::CNOT, b, a, -1, 1.0, 0.0});
    push_rotation_pair(c, a, base + 4, base + 5);
    push_rotation_pair(c, b, base + 6, base + 7);
}

void push_fixed_hadamard(ParameterizedCircuit& c, int qubit) {
    // RZ(pi/2) RX(pi/2) RZ(pi/2) = H up to a global phase
    c.gates.push_back({GateKind::RZ, qubit, -1, -1, 1.0, kPi / 2});
    c.gates.push_back({GateKind::RX, qubit, -1, -1, 1.0, kPi / 2});
    c.gates.push_back({GateKind::RZ, qubit, -1, -1, 1.0, kPi / 2});
}

// Controlled-X rotation CRX(theta), control = discard, target = keep,
// as H . (RZ(theta/2) CNOT RZ(-theta/2) CNOT) . H on the target. Only the
// two RZ(+-theta/2) slots are parameterized, so the parameter-shift rule
// stays exact.
void push_pool_unit(ParameterizedCircuit& c, int discard, int keep, int param) {
    push_fixed_hadamard(c, keep);
    c.gates.push_back({GateKind::CNOT, keep, discard, -1, 1.0, 0.0});
    c.gates.push_back({GateKind::RZ, keep, -1, param, -0.5, 0.0});
    c.gates.push_back({GateKind::CNOT, keep, discard, -1, 1.0, 0.0});
    c.gates.push_back({GateKind::RZ, keep, -1, param, 0.5, 0.0});
    push_fixed_hadamard(c, keep);
}

std::vector<double> random_angles(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> a(count);
    for (double& v : a) v = rng.uniform(0.0, 2.0 * kPi);
    return a;
}

}  // namespace

std::string architecture_name(Architecture a) {
    switch (a) {
        case Architecture::Variational: return "variational";
        case Architecture::QcnnSmall: return "qcnn-small";
        case Architecture::QcnnLarge: return "qcnn-large";
    }
    return "?";
}

Architecture architecture_from_name(const std::string& name) {
    if (name == "variational") return Architecture::Variational;
    if (name == "qcnn-small") return Architecture::QcnnSmall;
    if (name == "qcnn-large") return Architecture::QcnnLarge;
    throw std::runtime_error("unknown architecture: '" + name + "'");
}

ClassifierModel build_variational_classifier(int n_in, int depth, std::uint64_t seed) {
    if (n_in < 1) throw std::invalid_argument("build_variational_classifier: n_in must be >= 1");
    if (depth < 1) throw std::invalid_argument("build_variational_classifier: depth must be >= 1");

    const int n = n_in + 1;
    ClassifierModel m;
    m.spec.architecture = Architecture::Variational;
    m.spec.n_in = n_in;
    m.spec.depth = depth;
    m.spec.readout_qubit = n_in;  // appended readout register
    m.circuit.n_qubits = n;

    int p = 0;
    for (int layer = 0; layer < depth; ++layer) {
        LayerDesc desc;
        desc.kind = LayerKind::RotationEntangler;
        desc.label = "L" + std::to_string(layer + 1);
        desc.param_count = 4 * n;
        for (int k = 0; k < n; ++k) desc.qubits.push_back(k);
        for (int k = 0; k + 1 < n; ++k) desc.pairs.emplace_back(k, k + 1);

        for (int k = 0; k < n; ++k) push_rotation_pair(m.circuit, k, p + 2 * k, p + 2 * k + 1);
        p += 2 * n;
        for (auto [a, b] : desc.pairs) m.circuit.gates.push_back({GateKind::CNOT, b, a, -1, 1.0, 0.0});
        for (int k = 0; k < n; ++k) push_rotation_pair(m.circuit, k, p + 2 * k, p + 2 * k + 1);
        p += 2 * n;

        m.spec.layers.push_back(std::move(desc));
    }
    m.circuit.param_count = p;
    m.spec.param_count = p;
    m.params = random_angles(p, seed);
    m.seed = seed;
    m.name = "variational-d" + std::to_string(depth);
    return m;
}

ClassifierModel build_qcnn(int n_in, QcnnVariant variant, std::uint64_t seed) {
    const int n = n_in + 1;
    if (n < 4) {
        throw std::invalid_argument("build_qcnn: needs n_in + 1 >= 4 qubits, got " +
                                    std::to_string(n));
    }

    ClassifierModel m;
    m.spec.architecture =
        variant == QcnnVariant::Small ? Architecture::QcnnSmall : Architecture::QcnnLarge;
    m.spec.n_in = n_in;
    m.spec.depth = 0;
    m.circuit.n_qubits = n;

    std::vector<int> active(n);
    for (int i = 0; i < n; ++i) active[i] = i;
    int p = 0;
    int conv_label = 0;
    int pool_label = 0;

    auto add_conv = [&]() {
        LayerDesc desc;
        desc.kind = LayerKind::Conv;
        desc.label = "C" + std::to_string(++conv_label);
        desc.qubits = active;
        desc.shared = true;
        if (active.size() < 2) {
            m.spec.layers.push_back(std::move(desc));
            return;
        }
        if (variant == QcnnVariant::Small) {
            // one unit shared across every neighboring pair
            const int base = p;
            p += 8;
            desc.param_count = 8;
            for (std::size_t i = 0; i + 1 < active.size(); ++i) {
                desc.pairs.emplace_back(active[i], active[i + 1]);
                push_conv_unit(m.circuit, active[i], active[i + 1], base);
            }
        } else {
            // brick pattern: even-start and odd-start rows, one shared
            // unit each
            for (int row = 0; row < 2; ++row) {
                bool any = false;
                int base = p;
                for (std::size_t i = row; i + 1 < active.size(); i += 2) {
                    if (!any) {
                        any = true;
                        p += 8;
                        desc.param_count += 8;
                    }
                    desc.pairs.emplace_back(active[i], active[i + 1]);
                    push_conv_unit(m.circuit, active[i], active[i + 1], base);
                }
            }
        }
        m.spec.layers.push_back(std::move(desc));
    };

    auto add_pool = [&]() {
        LayerDesc desc;
        desc.kind = LayerKind::Pool;
        desc.label = "P" + std::to_string(++pool_label);
        desc.qubits = active;
        desc.shared = variant == QcnnVariant::Small;
        std::vector<int> survivors;
        int shared_param = -1;
        for (std::size_t pos = 0; pos < active.size(); ++pos) {
            if (pos % 2 == 0) {
                survivors.push_back(active[pos]);
                continue;
            }
            const int discard = active[pos];
            const int keep = pos + 1 < active.size() ? active[pos + 1] : active[pos - 1];
            int param;
            if (variant == QcnnVariant::Small) {
                if (shared_param < 0) {
                    shared_param = p++;
                    desc.param_count += 1;
                }
                param = shared_param;
            } else {
                param = p++;
                desc.param_count += 1;
            }
            desc.pairs.emplace_back(discard, keep);
            push_pool_unit(m.circuit, discard, keep, param);
        }
        active = std::move(survivors);
        m.spec.layers.push_back(std::move(desc));
    };

    add_conv();  // C1
    add_conv();  // C2
    add_conv();  // C3
    add_pool();  // P1
    add_conv();  // C4
    add_conv();  // C5
    add_pool();  // P2
    add_conv();  // C6

    {
        LayerDesc desc;
        desc.kind = LayerKind::FullyConnected;
        desc.label = "FC";
        desc.qubits = active;
        for (int q : active) {
            push_rotation_pair(m.circuit, q, p, p + 1);
            desc.param_count += 2;
            p += 2;
        }
        for (std::size_t i = 0; i + 1 < active.size(); ++i) {
            desc.pairs.emplace_back(active[i], active[i + 1]);
            m.circuit.gates.push_back({GateKind::CNOT, active[i + 1], active[i], -1, 1.0, 0.0});
        }
        m.spec.layers.push_back(std::move(desc));
    }

    m.spec.readout_qubit = active.back();
    m.circuit.param_count = p;
    m.spec.param_count = p;
    m.params = random_angles(p, seed);
    m.seed = seed;
    m.name = variant == QcnnVariant::Small ? "qcnn-small" : "qcnn-large";
    return m;
}

StateVector embed_with_readout(const StateVector& input) {
    StateVector out;
    out.n_qubits = input.n_qubits + 1;
    out.amps.assign(input.dim() * 2, cxd{0.0, 0.0});
    for (std::size_t i = 0; i < input.dim(); ++i) {
        out.amps[2 * i + 1] = input.amps[i];  // appended readout qubit in |1>
    }
    return out;
}

std::vector<double> forward(const ClassifierModel& model, const StateVector& input) {
    if (input.n_qubits != model.spec.n_in) {
        throw std::invalid_argument("forward: input has " + std::to_string(input.n_qubits) +
                                    " qubits, model expects " + std::to_string(model.spec.n_in));
    }
    StateVector total = embed_with_readout(input);
    total = model.circuit.apply(total, model.params);
    const int readout[] = {model.spec.readout_qubit};
    return measure_probabilities(total, readout);
}

int label_from_probs(std::span<const double> probs) {
    // binary readout; assign y=1 on ties
    return probs[1] >= probs[0] ? 1 : 0;
}

int predict(const ClassifierModel& model, const StateVector& input) {
    return label_from_probs(forward(model, input));
}

void save_checkpoint(const ClassifierModel& model, const std::filesystem::path& path,
                     std::span<const std::string> comments) {
    std::ostringstream out;
    out << "qadv-checkpoint v1\n";
    for (const std::string& c : comments) out << "# " << c << "\n";
    out << "name = " << model.name << "\n";
    out << "architecture = " << architecture_name(model.spec.architecture) << "\n";
    out << "n_in = " << model.spec.n_in << "\n";
    out << "depth = " << model.spec.depth << "\n";
    out << "seed = " << model.seed << "\n";
    out << "trained_epochs = " << model.trained_epochs << "\n";
    out << "best_val_accuracy = " << format_double(model.best_val_accuracy) << "\n";
    out << "param_count = " << model.spec.param_count << "\n";
    out << "params =";
    for (double v : model.params) out << " " << format_double(v);
    out << "\n";
    atomic_write_file(path, out.str());
}

ClassifierModel load_checkpoint(const std::filesystem::path& path) {
    std::istringstream in(read_entire_file(path));
    const std::string ctx = "checkpoint " + path.string();
    std::string line;
    auto next_line = [&](const char* field) -> std::string {
        while (std::getline(in, line)) {
            if (trim(line).rfind('#', 0) != 0) return line;
        }
        throw std::runtime_error("parse error in " + ctx + ": file truncated before field '" +
                                 std::string(field) + "'");
    };

    if (trim(next_line("magic")) != "qadv-checkpoint v1") {
        throw std::runtime_error("parse error in " + ctx + ": bad magic line");
    }
    const std::string name = expect_kv(next_line("name"), "name", ctx);
    const Architecture arch =
        architecture_from_name(expect_kv(next_line("architecture"), "architecture", ctx));
    const int n_in = static_cast<int>(parse_int(expect_kv(next_line("n_in"), "n_in", ctx), "n_in"));
    const int depth =
        static_cast<int>(parse_int(expect_kv(next_line("depth"), "depth", ctx), "depth"));
    const std::uint64_t seed = parse_uint64(expect_kv(next_line("seed"), "seed", ctx), "seed");
    const int epochs = static_cast<int>(
        parse_int(expect_kv(next_line("trained_epochs"), "trained_epochs", ctx), "trained_epochs"));
    const double best_acc = parse_double(
        expect_kv(next_line("best_val_accuracy"), "best_val_accuracy", ctx), "best_val_accuracy");
    const int param_count = static_cast<int>(
        parse_int(expect_kv(next_line("param_count"), "param_count", ctx), "param_count"));

    ClassifierModel m;
    switch (arch) {
        case Architecture::Variational: m = build_variational_classifier(n_in, depth, seed); break;
        case Architecture::QcnnSmall: m = build_qcnn(n_in, QcnnVariant::Small, seed); break;
        case Architecture::QcnnLarge: m = build_qcnn(n_in, QcnnVariant::Large, seed); break;
    }
    if (m.spec.param_count != param_count) {
        throw std::runtime_error("parse error in " + ctx + ": field 'param_count' is " +
                                 std::to_string(param_count) + " but the architecture implies " +
                                 std::to_string(m.spec.param_count));
    }

    const std::string params_line = expect_kv(next_line("params"), "params", ctx);
    std::istringstream ps(params_line);
    std::vector<double> params;
    std::string tok;
    while (ps >> tok) params.push_back(parse_double(tok, "params[" + std::to_string(params.size()) + "]"));
    if (static_cast<int>(params.size()) != param_count) {
        throw std::runtime_error("parse error in " + ctx + ": field 'params' has " +
                                 std::to_string(params.size()) + " values, expected " +
                                 std::to_string(param_count));
    }

    m.name = name;
    m.params = std::move(params);
    m.trained_epochs = epochs;
    m.best_val_accuracy = best_acc;
    return m;
}

}  // namespace qadv
