#include "qadv/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qadv/io_util.hpp"
#include "qadv/rng.hpp"

namespace qadv {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& field) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw std::runtime_error("parse error: truncated file while reading field '" + field + "'");
    }
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
           std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<char*>(b), 4);
}

void check_range(int length) {
    if (length < 2 || length > 14) {
        throw std::invalid_argument("Ising chain length must be in [2, 14], got " +
                                    std::to_string(length));
    }
}

}  // namespace

std::vector<RawImage> load_mnist_idx(const std::filesystem::path& images_path,
                                     const std::filesystem::path& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("cannot open images file: " + images_path.string());
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("cannot open labels file: " + labels_path.string());

    const std::uint32_t img_magic = read_be32(img, "images magic");
    if (img_magic != kImagesMagic) {
        throw std::runtime_error("parse error: field 'images magic' is 0x" + hex64(img_magic) +
                                 ", expected 0x00000803");
    }
    const std::uint32_t lab_magic = read_be32(lab, "labels magic");
    if (lab_magic != kLabelsMagic) {
        throw std::runtime_error("parse error: field 'labels magic' is 0x" + hex64(lab_magic) +
                                 ", expected 0x00000801");
    }
    const std::uint32_t n_images = read_be32(img, "image count");
    const std::uint32_t n_labels = read_be32(lab, "label count");
    if (n_images != n_labels) {
        throw std::runtime_error("parse error: field 'count' mismatch: " + std::to_string(n_images) +
                                 " images vs " + std::to_string(n_labels) + " labels");
    }
    const std::uint32_t rows = read_be32(img, "rows");
    const std::uint32_t cols = read_be32(img, "cols");
    if (rows == 0 || cols == 0 || rows > 256 || cols > 256) {
        throw std::runtime_error("parse error: field 'rows/cols' out of range");
    }

    std::vector<RawImage> out(n_images);
    for (std::uint32_t i = 0; i < n_images; ++i) {
        RawImage& im = out[i];
        im.rows = static_cast<int>(rows);
        im.cols = static_cast<int>(cols);
        im.pixels.resize(rows * cols);
        if (!img.read(reinterpret_cast<char*>(im.pixels.data()), rows * cols)) {
            throw std::runtime_error("parse error: truncated file while reading field 'image " +
                                     std::to_string(i) + "'");
        }
        char c;
        if (!lab.get(c)) {
            throw std::runtime_error("parse error: truncated file while reading field 'label " +
                                     std::to_string(i) + "'");
        }
        im.label = static_cast<unsigned char>(c);
    }
    return out;
}

void write_idx_images(const std::filesystem::path& path, std::span<const RawImage> images) {
    std::ostringstream out;
    write_be32(out, kImagesMagic);
    write_be32(out, static_cast<std::uint32_t>(images.size()));
    const int rows = images.empty() ? 28 : images[0].rows;
    const int cols = images.empty() ? 28 : images[0].cols;
    write_be32(out, static_cast<std::uint32_t>(rows));
    write_be32(out, static_cast<std::uint32_t>(cols));
    for (const RawImage& im : images) {
        out.write(reinterpret_cast<const char*>(im.pixels.data()),
                  static_cast<std::streamsize>(im.pixels.size()));
    }
    atomic_write_file(path, out.str());
}

void write_idx_labels(const std::filesystem::path& path, std::span<const RawImage> images) {
    std::ostringstream out;
    write_be32(out, kLabelsMagic);
    write_be32(out, static_cast<std::uint32_t>(images.size()));
    for (const RawImage& im : images) out.put(static_cast<char>(im.label));
    atomic_write_file(path, out.str());
}

std::vector<double> resize_16(const RawImage& image) {
    if (image.rows != 28 || image.cols != 28) {
        throw std::invalid_argument("resize_16 expects a 28x28 image");
    }
    constexpr int kOut = 16;
    constexpr double kScale = 28.0 / 16.0;  // 1.75, exact in binary
    std::vector<double> out(kOut * kOut, 0.0);
    for (int r = 0; r < kOut; ++r) {
        const double y0 = r * kScale, y1 = y0 + kScale;
        for (int c = 0; c < kOut; ++c) {
            const double x0 = c * kScale, x1 = x0 + kScale;
            double acc = 0.0;
            for (int y = static_cast<int>(y0); y < 28 && y < y1; ++y) {
                const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
                if (wy <= 0) continue;
                for (int x = static_cast<int>(x0); x < 28 && x < x1; ++x) {
                    const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
                    if (wx <= 0) continue;
                    acc += wy * wx * image.pixels[y * 28 + x];
                }
            }
            out[r * kOut + c] = acc / (kScale * kScale) / 255.0;
        }
    }
    return out;
}

StateVector amplitude_encode(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("amplitude_encode: empty vector");
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq == 0.0) throw std::invalid_argument("amplitude_encode: all-zero vector");

    int n = 1;
    while ((std::size_t{1} << n) < v.size()) ++n;
    const double norm = std::sqrt(norm_sq);
    StateVector s;
    s.n_qubits = n;
    s.amps.assign(std::size_t{1} << n, cxd{0.0, 0.0});
    for (std::size_t i = 0; i < v.size(); ++i) s.amps[i] = cxd{v[i] / norm, 0.0};
    return s;
}

Eigen::MatrixXd build_ising_hamiltonian(int length, double jx) {
    check_range(length);
    if (jx < 0) throw std::invalid_argument("J_x must be >= 0");
    const std::size_t dim = std::size_t{1} << length;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        double zz = 0.0;
        for (int i = 0; i + 1 < length; ++i) {
            const int zi = (idx >> (length - 1 - i)) & 1 ? -1 : 1;
            const int zj = (idx >> (length - 2 - i)) & 1 ? -1 : 1;
            zz += zi * zj;
        }
        h(idx, idx) = -zz;
        for (int i = 0; i < length; ++i) {
            h(idx ^ (std::size_t{1} << (length - 1 - i)), idx) += -jx;
        }
    }
    return h;
}

std::pair<double, StateVector> ising_ground_state(int length, double jx) {
    check_range(length);
    if (jx == 0.0) {
        throw std::invalid_argument("ising_ground_state: J_x = 0 has a degenerate ground space");
    }
    const Eigen::MatrixXd h = build_ising_hamiltonian(length, jx);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("ising_ground_state: eigendecomposition failed");
    }
    const double energy = solver.eigenvalues()(0);
    Eigen::VectorXd vec = solver.eigenvectors().col(0);

    int peak = 0;
    for (int i = 1; i < vec.size(); ++i) {
        if (std::abs(vec(i)) > std::abs(vec(peak))) peak = i;
    }
    if (vec(peak) < 0) vec = -vec;

    StateVector s;
    s.n_qubits = length;
    s.amps.resize(vec.size());
    for (int i = 0; i < vec.size(); ++i) s.amps[i] = cxd{vec(i), 0.0};
    s.normalize();
    return {energy, std::move(s)};
}

double free_fermion_ground_energy(int length, double jx) {
    check_range(length);
    if (jx < 0) throw std::invalid_argument("J_x must be >= 0");
    // Rotated basis (Z<->X) gives H = -sum X_i X_{i+1} - jx sum Z_i, whose
    // Jordan-Wigner image is quadratic: A_ii = 2 jx, A_{i,i+1} = -1
    // (hopping), B_{i,i+1} = -1 (pairing, antisymmetric).
    const int n = length;
    Eigen::MatrixXd bdg = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        bdg(i, i) = 2.0 * jx;
        bdg(n + i, n + i) = -2.0 * jx;
    }
    for (int i = 0; i + 1 < n; ++i) {
        bdg(i, i + 1) = bdg(i + 1, i) = -1.0;                  // A
        bdg(n + i, n + i + 1) = bdg(n + i + 1, n + i) = 1.0;   // -A
        bdg(i, n + i + 1) = -1.0;                              // B
        bdg(i + 1, n + i) = 1.0;
        bdg(n + i, i + 1) = 1.0;                               // -B
        bdg(n + i + 1, i) = -1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(bdg);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("free_fermion_ground_energy: eigendecomposition failed");
    }
    double e0 = 0.0;
    for (int i = 0; i < 2 * n; ++i) {
        if (solver.eigenvalues()(i) < 0) e0 += solver.eigenvalues()(i);
    }
    return 0.5 * e0;
}

std::pair<LabeledDataset, LabeledDataset> generate_ising_dataset(int length, int n_train,
                                                                 int n_test, std::uint64_t seed) {
    check_range(length);
    if (n_train < 1 || n_test < 1) throw std::invalid_argument("dataset sizes must be >= 1");

    // Draw the whole J_x sequence up front, single-threaded, so sample
    // evaluation order can never change the data.
    Rng rng(seed);
    const int total = n_train + n_test;
    std::vector<double> jxs;
    jxs.reserve(total);
    while (static_cast<int>(jxs.size()) < total) {
        const double jx = rng.uniform(0.0, 2.0);
        if (jx <= 0.0 || (jx > 0.95 && jx < 1.05)) continue;  // degenerate / near-critical
        jxs.push_back(jx);
    }

    auto make = [&](int begin, int count, const char* split) {
        LabeledDataset ds;
        ds.split = split;
        ds.seed = seed;
        ds.n_qubits = length;
        ds.task = "ising";
        ds.samples.reserve(count);
        for (int i = 0; i < count; ++i) {
            const double jx = jxs[begin + i];
            auto [energy, state] = ising_ground_state(length, jx);
            (void)energy;
            LabeledSample s;
            s.state = std::move(state);
            s.label = jx < 1.0 ? 0 : 1;
            s.meta = "jx=" + format_double(jx);
            ds.samples.push_back(std::move(s));
        }
        return ds;
    };
    return {make(0, n_train, "train"), make(n_train, n_test, "test")};
}

std::pair<LabeledDataset, LabeledDataset> build_mnist_dataset(int digit0, int digit1, int n_train,
                                                              int n_test, std::uint64_t seed,
                                                              std::span<const RawImage> pool) {
    if (digit0 == digit1) throw std::invalid_argument("build_mnist_dataset: digits must differ");
    if (n_train < 1 || n_test < 1) throw std::invalid_argument("dataset sizes must be >= 1");

    std::vector<std::size_t> idx0, idx1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].label == digit0) idx0.push_back(i);
        if (pool[i].label == digit1) idx1.push_back(i);
    }
    const int want0 = (n_train + n_test + 1) / 2;
    const int want1 = (n_train + n_test) / 2;
    if (static_cast<int>(idx0.size()) < want0 || static_cast<int>(idx1.size()) < want1) {
        throw std::invalid_argument("build_mnist_dataset: insufficient source images for digits " +
                                    std::to_string(digit0) + "/" + std::to_string(digit1));
    }
    Rng rng(seed);
    rng.shuffle(idx0);
    rng.shuffle(idx1);

    auto encode_at = [&](std::size_t i, int label) {
        LabeledSample s;
        s.state = amplitude_encode(resize_16(pool[i]));
        s.label = label;
        s.meta = "digit=" + std::to_string(label == 0 ? digit0 : digit1) + " idx=" + std::to_string(i);
        return s;
    };

    LabeledDataset train, test;
    for (auto* ds : {&train, &test}) {
        ds->seed = seed;
        ds->n_qubits = 8;
        ds->task = "mnist";
    }
    train.split = "train";
    test.split = "test";
    std::size_t u0 = 0, u1 = 0;
    for (int i = 0; i < n_train; ++i) {
        if (i % 2 == 0) train.samples.push_back(encode_at(idx0[u0++], 0));
        else train.samples.push_back(encode_at(idx1[u1++], 1));
    }
    for (int i = 0; i < n_test; ++i) {
        if (i % 2 == 0) test.samples.push_back(encode_at(idx0[u0++], 0));
        else test.samples.push_back(encode_at(idx1[u1++], 1));
    }
    return {std::move(train), std::move(test)};
}

std::vector<RawImage> generate_synthetic_images(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<RawImage> out(count);
    for (int i = 0; i < count; ++i) {
        RawImage& im = out[i];
        im.pixels.assign(28 * 28, 0);
        im.label = i % 2;
        const double cx = (im.label == 0 ? 9.0 : 18.0) + rng.uniform(-2.0, 2.0);
        const double cy = (im.label == 0 ? 9.0 : 18.0) + rng.uniform(-2.0, 2.0);
        const double sx = 3.0 + rng.uniform(0.0, 1.5);
        const double sy = 3.0 + rng.uniform(0.0, 1.5);
        const double amp = 200.0 + rng.uniform(0.0, 55.0);
        for (int y = 0; y < 28; ++y) {
            for (int x = 0; x < 28; ++x) {
                const double dx = (x - cx) / sx, dy = (y - cy) / sy;
                const double v = amp * std::exp(-0.5 * (dx * dx + dy * dy));
                im.pixels[y * 28 + x] = static_cast<std::uint8_t>(std::min(255.0, v));
            }
        }
    }
    return out;
}

void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path,
                  std::span<const std::string> comments) {
    std::ostringstream out;
    out << "qadv-dataset v1\n";
    for (const std::string& c : comments) out << "# " << c << "\n";
    out << "task = " << ds.task << "\n";
    out << "split = " << ds.split << "\n";
    out << "seed = " << ds.seed << "\n";
    out << "n_qubits = " << ds.n_qubits << "\n";
    out << "count = " << ds.samples.size() << "\n";
    for (const LabeledSample& s : ds.samples) {
        out << "label = " << s.label << "\n";
        out << "meta = " << s.meta << "\n";
        out << "amps =";
        for (const cxd& a : s.state.amps) {
            out << " " << format_double(a.real()) << " " << format_double(a.imag());
        }
        out << "\n";
    }
    atomic_write_file(path, out.str());
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
    std::istringstream in(read_entire_file(path));
    const std::string ctx = "dataset " + path.string();
    std::string line;
    auto next_line = [&](const char* field) -> std::string {
        while (std::getline(in, line)) {
            if (trim(line).rfind('#', 0) != 0) return line;
        }
        throw std::runtime_error("parse error in " + ctx + ": file truncated before field '" +
                                 std::string(field) + "'");
    };
    if (trim(next_line("magic")) != "qadv-dataset v1") {
        throw std::runtime_error("parse error in " + ctx + ": bad magic line");
    }
    LabeledDataset ds;
    ds.task = expect_kv(next_line("task"), "task", ctx);
    ds.split = expect_kv(next_line("split"), "split", ctx);
    ds.seed = parse_uint64(expect_kv(next_line("seed"), "seed", ctx), "seed");
    ds.n_qubits =
        static_cast<int>(parse_int(expect_kv(next_line("n_qubits"), "n_qubits", ctx), "n_qubits"));
    const long long count = parse_int(expect_kv(next_line("count"), "count", ctx), "count");
    const std::size_t dim = std::size_t{1} << ds.n_qubits;
    for (long long i = 0; i < count; ++i) {
        LabeledSample s;
        s.label = static_cast<int>(parse_int(expect_kv(next_line("label"), "label", ctx), "label"));
        s.meta = expect_kv(next_line("meta"), "meta", ctx);
        std::istringstream as(expect_kv(next_line("amps"), "amps", ctx));
        s.state.n_qubits = ds.n_qubits;
        s.state.amps.reserve(dim);
        std::string re, im;
        while (as >> re >> im) {
            s.state.amps.emplace_back(parse_double(re, "amps.re"), parse_double(im, "amps.im"));
        }
        if (s.state.amps.size() != dim) {
            throw std::runtime_error("parse error in " + ctx + ": field 'amps' of sample " +
                                     std::to_string(i) + " has " +
                                     std::to_string(s.state.amps.size()) + " values, expected " +
                                     std::to_string(2 * dim) + "/2");
        }
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

}  // namespace qadv
