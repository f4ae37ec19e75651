#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qadv/state.hpp"

namespace qadv {

struct RawImage {
    int rows = 28, cols = 28;
    std::vector<std::uint8_t> pixels;  // row-major
    int label = 0;
};

/// MNIST IDX readers, big-endian, magic 0x00000803 / 0x00000801.
std::vector<RawImage> load_mnist_idx(const std::filesystem::path& images_path,
                                     const std::filesystem::path& labels_path);
/// IDX writers (round-trip tests, synthetic corpora on disk).
void write_idx_images(const std::filesystem::path& path, std::span<const RawImage> images);
void write_idx_labels(const std::filesystem::path& path, std::span<const RawImage> images);

/// 28x28 bytes -> 16x16 reals in [0,1] by area-weighted averaging (each
/// output pixel averages the overlapping 1.75x1.75 input region).
std::vector<double> resize_16(const RawImage& image);

/// Pad with zeros to the next power of two, normalize, read as amplitudes.
StateVector amplitude_encode(std::span<const double> v);

/// H = -sum_{i=1}^{L-1} Z_i Z_{i+1} - J_x sum_{i=1}^{L} X_i, open chain,
/// real symmetric in the computational basis.
Eigen::MatrixXd build_ising_hamiltonian(int length, double jx);

/// Ground state by dense symmetric eigendecomposition; global phase fixed
/// by making the largest-magnitude amplitude real positive. J_x = 0 is
/// rejected (degenerate).
std::pair<double, StateVector> ising_ground_state(int length, double jx);

/// Independent oracle: ground energy of the Jordan-Wigner free-fermion
/// form, from the 2L x 2L Bogoliubov-de Gennes matrix (half the sum of its
/// negative eigenvalues).
double free_fermion_ground_energy(int length, double jx);

struct LabeledSample {
    StateVector state;
    int label = 0;
    std::string meta;  // "jx=..." or "digit=.. idx=.."
};

struct LabeledDataset {
    std::vector<LabeledSample> samples;
    std::string split;  // "train" or "test"
    std::uint64_t seed = 0;
    int n_qubits = 0;
    std::string task;  // "ising", "mnist", "synthetic"
};

/// J_x uniform on (0,2) excluding the near-critical window (0.95, 1.05);
/// label 0 for J_x < 1, 1 for J_x > 1; deterministic per seed.
std::pair<LabeledDataset, LabeledDataset> generate_ising_dataset(int length, int n_train,
                                                                 int n_test, std::uint64_t seed);

/// Balanced two-digit dataset from a raw image pool: resize_16, then
/// amplitude encoding (256 values -> 8 qubits); label 0 = first digit.
std::pair<LabeledDataset, LabeledDataset> build_mnist_dataset(int digit0, int digit1, int n_train,
                                                              int n_test, std::uint64_t seed,
                                                              std::span<const RawImage> pool);

/// Two-class 28x28 Gaussian-blob images so the image pipeline runs without
/// MNIST files; labels 0/1 alternate.
std::vector<RawImage> generate_synthetic_images(int count, std::uint64_t seed);

/// Structured-text cache, amplitudes at 17 significant digits; '#' comment
/// lines after the magic (run provenance) are ignored by the loader.
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path,
                  std::span<const std::string> comments = {});
LabeledDataset load_dataset(const std::filesystem::path& path);

}  // namespace qadv
