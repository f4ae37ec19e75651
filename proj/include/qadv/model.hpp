#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qadv/circuit.hpp"
#include "qadv/state.hpp"

namespace qadv {

enum class Architecture { Variational, QcnnSmall, QcnnLarge };

std::string architecture_name(Architecture a);
Architecture architecture_from_name(const std::string& name);

enum class LayerKind { RotationEntangler, Conv, Pool, FullyConnected };

/// Bookkeeping descriptor for one layer; the compiled gate list is derived
/// from these by the builders.
struct LayerDesc {
    LayerKind kind;
    std::string label;                       // "L1".."Lp", "C1".."C6", "P1", "P2", "FC"
    std::vector<int> qubits;                 // qubits still active in this layer
    std::vector<std::pair<int, int>> pairs;  // entangler/conv (a,b); pool (discard, keep)
    int param_count = 0;
    bool shared = false;
};

struct CircuitSpec {
    Architecture architecture = Architecture::Variational;
    int n_in = 0;        // input qubits
    int m_readout = 1;   // readout register size (binary task: 1)
    int depth = 1;       // variational only
    std::vector<LayerDesc> layers;
    int param_count = 0;
    int readout_qubit = 0;

    int total_qubits() const { return n_in + m_readout; }
};

struct ClassifierModel {
    CircuitSpec spec;
    ParameterizedCircuit circuit;
    std::vector<double> params;  // radians
    int label_count = 2;
    std::string name;
    std::uint64_t seed = 0;
    // training metadata, carried through checkpoints
    int trained_epochs = 0;
    double best_val_accuracy = -1.0;
};

/// Multi-layer variational classifier on n_in + 1 qubits. Each layer, per
/// qubit: X(a) then Z(b), a CNOT chain k -> k+1, then X(c) then Z(d);
/// 4*(n_in+1)*depth parameters, initialized uniformly in [0, 2pi).
ClassifierModel build_variational_classifier(int n_in, int depth, std::uint64_t seed);

enum class QcnnVariant { Small, Large };

/// QCNN on n_in + 1 qubits: conv layers C1..C6 of weight-shared two-qubit
/// units on neighboring pairs, pooling layers P1, P2 (controlled-X rotation
/// from the discarded qubit onto its kept neighbor), and a fully connected
/// layer on the survivors. Small shares one unit per conv layer; Large uses
/// a two-row brick pattern with an independently shared unit per row.
ClassifierModel build_qcnn(int n_in, QcnnVariant variant, std::uint64_t seed);

/// |psi_in> (x) |1> with the readout register appended as the last qubit.
StateVector embed_with_readout(const StateVector& input);

/// (P(y=0), P(y=1)) on the readout qubit; entries sum to 1 within 1e-10.
std::vector<double> forward(const ClassifierModel& model, const StateVector& input);

int label_from_probs(std::span<const double> probs);  // argmax, ties to 1
int predict(const ClassifierModel& model, const StateVector& input);

/// Text checkpoint: key/value header + flat angle array at 17 significant
/// digits; round trips reproduce forward probabilities bit-identically.
/// Comments ('#' lines after the magic, e.g. run provenance) are ignored
/// by the loader.
void save_checkpoint(const ClassifierModel& model, const std::filesystem::path& path,
                     std::span<const std::string> comments = {});
ClassifierModel load_checkpoint(const std::filesystem::path& path);

}  // namespace qadv
