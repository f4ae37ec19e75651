#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "qadv/io_util.hpp"
#include "qadv/model.hpp"
#include "qadv/rng.hpp"

using namespace qadv;

namespace {

std::vector<double> zeros(int n) { return std::vector<double>(n, 0.0); }

// the entangler/pooling skeleton left over at zero angles, reconstructed
// from the layer descriptors: conv CNOTs and the FC chain survive, pool
// blocks cancel to a global phase, rotations vanish
std::vector<GateOp> zero_angle_skeleton(const CircuitSpec& spec) {
    std::vector<GateOp> gates;
    for (const LayerDesc& layer : spec.layers) {
        if (layer.kind == LayerKind::Pool) continue;
        for (auto [a, b] : layer.pairs) gates.push_back(GateOp::cnot(a, b));
    }
    return gates;
}

}  // namespace

TEST_CASE("variational builder bookkeeping") {
    const ClassifierModel m = build_variational_classifier(8, 5, 7);
    CHECK(m.spec.param_count == 180);  // 4 * (8+1) * 5
    CHECK(m.params.size() == 180);
    CHECK(m.spec.readout_qubit == 8);
    CHECK(m.spec.layers.size() == 5);
    for (int depth = 5; depth <= 10; ++depth) {
        CHECK(build_variational_classifier(8, depth, 7).spec.param_count == 36 * depth);
    }
    CHECK_THROWS_AS(build_variational_classifier(0, 1, 7), std::invalid_argument);
    CHECK_THROWS_AS(build_variational_classifier(2, 0, 7), std::invalid_argument);
}

TEST_CASE("zero-angle variational circuit reduces to its entangler skeleton") {
    ClassifierModel m = build_variational_classifier(3, 2, 19);
    m.params = zeros(m.spec.param_count);
    const StateVector input = haar_random_state(3, 77);

    const auto probs = forward(m, input);
    const StateVector skeleton =
        apply_circuit(embed_with_readout(input), zero_angle_skeleton(m.spec));
    const int readout[] = {m.spec.readout_qubit};
    const auto expected = measure_probabilities(skeleton, readout);
    CHECK(probs[0] == doctest::Approx(expected[0]).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(expected[1]).epsilon(1e-12));
}

TEST_CASE("zero-angle variational model on |0...0> answers y=1") {
    ClassifierModel m = build_variational_classifier(4, 3, 5);
    m.params = zeros(m.spec.param_count);
    const auto probs = forward(m, StateVector::basis(4, 0));
    CHECK(probs[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(predict(m, StateVector::basis(4, 0)) == 1);
}

TEST_CASE("qcnn builder structure") {
    const ClassifierModel small = build_qcnn(8, QcnnVariant::Small, 3);
    const ClassifierModel large = build_qcnn(8, QcnnVariant::Large, 3);
    // formula-derived sizes for the 9-qubit circuit (6 conv layers of 8
    // shared angles / two 8-angle brick rows, pooling, 3-qubit FC)
    CHECK(small.spec.param_count == 56);
    CHECK(large.spec.param_count == 108);
    CHECK(small.spec.layers.size() == 9);  // C1..C6, P1, P2, FC

    SUBCASE("layer labels") {
        std::vector<std::string> labels;
        for (const auto& l : small.spec.layers) labels.push_back(l.label);
        CHECK(labels == std::vector<std::string>{"C1", "C2", "C3", "P1", "C4", "C5", "P2", "C6",
                                                 "FC"});
    }

    SUBCASE("weight sharing: every C1 parameter drives one slot per pair") {
        std::map<int, int> occurrences;
        for (const ParamGate& g : small.circuit.gates) {
            if (g.param_index >= 0 && g.param_index < 8) occurrences[g.param_index]++;
        }
        CHECK(occurrences.size() == 8);
        for (const auto& [param, count] : occurrences) {
            (void)param;
            CHECK(count == 8);  // eight neighboring pairs on nine qubits
        }
    }

    SUBCASE("readout survives pooling") {
        CHECK(small.spec.readout_qubit == 8);
        CHECK(large.spec.readout_qubit == 8);
    }

    CHECK_THROWS_AS(build_qcnn(2, QcnnVariant::Small, 3), std::invalid_argument);
}

TEST_CASE("zero-angle qcnn equals the skeleton marginal on the readout qubit") {
    for (QcnnVariant variant : {QcnnVariant::Small, QcnnVariant::Large}) {
        ClassifierModel m = build_qcnn(5, variant, 11);
        m.params = zeros(m.spec.param_count);
        const StateVector input = haar_random_state(5, 23);
        const auto probs = forward(m, input);

        const StateVector skeleton =
            apply_circuit(embed_with_readout(input), zero_angle_skeleton(m.spec));
        const int readout[] = {m.spec.readout_qubit};
        const auto expected = measure_probabilities(skeleton, readout);
        CHECK(probs[0] == doctest::Approx(expected[0]).epsilon(1e-10));
        CHECK(probs[1] == doctest::Approx(expected[1]).epsilon(1e-10));
    }
}

TEST_CASE("forward probabilities sum to one across random models and inputs") {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n_in = 3 + static_cast<int>(rng.integer(2));
        ClassifierModel m;
        switch (trial % 3) {
            case 0: m = build_variational_classifier(n_in, 1 + trial % 2, trial); break;
            case 1: m = build_qcnn(n_in, QcnnVariant::Small, trial); break;
            default: m = build_qcnn(n_in, QcnnVariant::Large, trial); break;
        }
        const auto probs = forward(m, haar_random_state(n_in, 4000 + trial));
        CHECK(std::abs(probs[0] + probs[1] - 1.0) < 1e-10);
        CHECK(probs[0] >= -1e-12);
        CHECK(probs[1] >= -1e-12);
    }
}

TEST_CASE("prediction rule") {
    CHECK(label_from_probs(std::vector<double>{0.5, 0.5}) == 1);  // ties resolve to 1
    CHECK(label_from_probs(std::vector<double>{0.9, 0.1}) == 0);
    CHECK(label_from_probs(std::vector<double>{0.1, 0.9}) == 1);

    // argmax is invariant under strictly monotone rescaling of both entries
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const double p1 = rng.uniform();
        const std::vector<double> p{1.0 - p1, p1};
        const std::vector<double> cubed{std::pow(p[0], 3) + p[0], std::pow(p[1], 3) + p[1]};
        const std::vector<double> exped{std::exp(p[0]), std::exp(p[1])};
        CHECK(label_from_probs(p) == label_from_probs(cubed));
        CHECK(label_from_probs(p) == label_from_probs(exped));
    }
}

TEST_CASE("forward rejects mismatched input sizes") {
    const ClassifierModel m = build_variational_classifier(3, 1, 2);
    CHECK_THROWS_AS(forward(m, StateVector::basis(4, 0)), std::invalid_argument);
}

TEST_CASE("checkpoint round trip is forward-bit-identical") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qadv_test_ckpt";
    fs::create_directories(dir);

    for (int variant = 0; variant < 3; ++variant) {
        ClassifierModel m = variant == 0   ? build_variational_classifier(4, 2, 9)
                            : variant == 1 ? build_qcnn(4, QcnnVariant::Small, 9)
                                           : build_qcnn(4, QcnnVariant::Large, 9);
        m.trained_epochs = 12;
        m.best_val_accuracy = 0.875;
        const fs::path path = dir / ("model" + std::to_string(variant) + ".ckpt");
        save_checkpoint(m, path);
        const ClassifierModel back = load_checkpoint(path);

        CHECK(back.name == m.name);
        CHECK(back.trained_epochs == 12);
        CHECK(back.spec.param_count == m.spec.param_count);
        const StateVector input = haar_random_state(4, 1234);
        const auto p0 = forward(m, input);
        const auto p1 = forward(back, input);
        CHECK(p0[0] == p1[0]);  // bit-identical
        CHECK(p0[1] == p1[1]);
    }

    SUBCASE("truncated checkpoint names the missing field") {
        const fs::path path = dir / "model0.ckpt";
        const std::string full = read_entire_file(path);
        const fs::path cut = dir / "truncated.ckpt";
        atomic_write_file(cut, full.substr(0, full.size() / 3));
        CHECK_THROWS_WITH_AS(load_checkpoint(cut),
                             doctest::Contains("parse error"), std::runtime_error);
    }
    SUBCASE("corrupt field is named") {
        const fs::path bad = dir / "bad.ckpt";
        atomic_write_file(bad, "qadv-checkpoint v1\nname = x\nwrong = variational\n");
        try {
            load_checkpoint(bad);
            CHECK(false);
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("architecture") != std::string::npos);
        }
    }
}
