#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qadv/rng.hpp"
#include "qadv/training.hpp"

using namespace qadv;

namespace {

std::vector<LabeledSample> random_batch(int n_qubits, int count, std::uint64_t seed) {
    std::vector<LabeledSample> batch;
    for (int i = 0; i < count; ++i) {
        LabeledSample s;
        s.state = haar_random_state(n_qubits, mix_seed(seed, i));
        s.label = static_cast<int>(mix_seed(seed, 1000 + i) % 2);
        batch.push_back(std::move(s));
    }
    return batch;
}

ClassifierModel random_model(int index) {
    switch (index % 3) {
        case 0: return build_variational_classifier(3, 1 + index % 2, 70 + index);
        case 1: return build_qcnn(3, QcnnVariant::Small, 70 + index);
        default: return build_qcnn(4, QcnnVariant::Large, 70 + index);
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

LabeledDataset tiny_dataset(int n_qubits, int count, std::uint64_t seed) {
    LabeledDataset ds;
    ds.n_qubits = n_qubits;
    ds.seed = seed;
    ds.samples = random_batch(n_qubits, count, seed);
    return ds;
}

}  // namespace

TEST_CASE("cross entropy values") {
    CHECK(cross_entropy(std::vector<double>{0.0, 1.0}, 1) == 0.0);
    CHECK(cross_entropy(std::vector<double>{0.5, 0.5}, 0) ==
          doctest::Approx(0.6931471805599453).epsilon(1e-12));
    CHECK(cross_entropy(std::vector<double>{0.9, 0.1}, 1) ==
          doctest::Approx(2.302585092994046).epsilon(1e-12));
    // the floor keeps -log(0) finite
    CHECK(cross_entropy(std::vector<double>{1.0, 0.0}, 1) ==
          doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
    CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.2}, 0), std::invalid_argument);
    CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.5}, 2), std::invalid_argument);
}

TEST_CASE("parameter shift matches central finite differences") {
    for (int trial = 0; trial < 4; ++trial) {
        const ClassifierModel m = random_model(trial);
        const auto batch = random_batch(m.spec.n_in, 3, 40 + trial);
        const auto shift = gradient_parameter_shift(m, batch);
        const auto fd = gradient_finite_difference(m, batch, 1e-5);
        CHECK(max_abs_diff(shift, fd) < 1e-6);
    }
}

TEST_CASE("adjoint gradient equals the parameter-shift values") {
    // both are exact for Pauli-generated rotations, so they agree to
    // floating-point noise even with shared and scaled parameters
    for (int trial = 0; trial < 6; ++trial) {
        const ClassifierModel m = random_model(trial);
        const auto batch = random_batch(m.spec.n_in, 2, 90 + trial);
        const auto shift = gradient_parameter_shift(m, batch);
        const auto adj = gradient_adjoint(m, batch);
        CHECK(max_abs_diff(shift, adj) < 1e-10);
    }
}

TEST_CASE("gradient at a perfect prediction is zero") {
    // the zero-angle variational model classifies |0...0> as y=1 with
    // probability one, the maximum of q, so the gradient vanishes
    ClassifierModel m = build_variational_classifier(3, 2, 1);
    std::fill(m.params.begin(), m.params.end(), 0.0);
    LabeledSample s;
    s.state = StateVector::basis(3, 0);
    s.label = 1;
    const auto grad = gradient_parameter_shift(m, std::vector<LabeledSample>{s});
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    CHECK(std::sqrt(norm) < 1e-8);
}

TEST_CASE("batch-mean invariances") {
    const ClassifierModel m = random_model(1);
    const auto batch = random_batch(m.spec.n_in, 4, 7);

    SUBCASE("duplicating the batch leaves the gradient unchanged") {
        std::vector<LabeledSample> doubled = batch;
        doubled.insert(doubled.end(), batch.begin(), batch.end());
        CHECK(max_abs_diff(gradient_adjoint(m, batch), gradient_adjoint(m, doubled)) < 1e-12);
    }
    SUBCASE("permutation leaves loss and gradient unchanged") {
        std::vector<LabeledSample> shuffled{batch[2], batch[0], batch[3], batch[1]};
        CHECK(std::abs(batch_loss(m, batch) - batch_loss(m, shuffled)) < 1e-12);
        CHECK(max_abs_diff(gradient_adjoint(m, batch), gradient_adjoint(m, shuffled)) < 1e-12);
    }
}

TEST_CASE("finite differences sharpen like h^2 against the exact gradient") {
    const ClassifierModel m = random_model(0);
    const auto batch = random_batch(m.spec.n_in, 2, 3);
    const auto exact = gradient_parameter_shift(m, batch);

    auto err = [&](double h) {
        const auto fd = gradient_finite_difference(m, batch, h);
        return max_abs_diff(exact, fd);
    };
    const double e1 = err(2e-3);
    const double e2 = err(1e-3);
    CHECK(e1 / e2 > 2.5);  // central differences gain ~4x per halving
    CHECK(e1 / e2 < 6.0);
}

TEST_CASE("adam update") {
    TrainConfig cfg;
    cfg.learning_rate = 0.01;

    SUBCASE("zero gradient is a fixed point") {
        std::vector<double> params{0.3, -0.7};
        AdamState st = AdamState::zeros(2);
        adam_step(params, std::vector<double>{0.0, 0.0}, st, cfg);
        CHECK(params[0] == 0.3);
        CHECK(params[1] == -0.7);
    }
    SUBCASE("first unit-gradient step moves by about -lr") {
        std::vector<double> params{1.0};
        AdamState st = AdamState::zeros(1);
        adam_step(params, std::vector<double>{1.0}, st, cfg);
        // bias correction makes the first step lr * g / (|g| + eps)
        CHECK(params[0] == doctest::Approx(1.0 - 0.01 / (1.0 + 1e-8)).epsilon(1e-12));
    }
    SUBCASE("deterministic") {
        std::vector<double> p1{0.5}, p2{0.5};
        AdamState s1 = AdamState::zeros(1), s2 = AdamState::zeros(1);
        adam_step(p1, std::vector<double>{0.25}, s1, cfg);
        adam_step(p2, std::vector<double>{0.25}, s2, cfg);
        CHECK(p1[0] == p2[0]);
        CHECK(s1.m[0] == s2.m[0]);
        CHECK(s1.v[0] == s2.v[0]);
    }
    SUBCASE("length mismatch") {
        std::vector<double> params{1.0};
        AdamState st = AdamState::zeros(2);
        CHECK_THROWS_AS(adam_step(params, std::vector<double>{1.0, 2.0}, st, cfg),
                        std::invalid_argument);
    }
}

TEST_CASE("training loop") {
    const LabeledDataset train_set = tiny_dataset(3, 8, 21);
    const LabeledDataset val_set = tiny_dataset(3, 4, 22);
    const ClassifierModel m = build_variational_classifier(3, 1, 77);

    SUBCASE("zero epochs returns the model unchanged") {
        TrainConfig cfg;
        cfg.epochs = 0;
        const auto [out, history] = train(m, train_set, val_set, cfg);
        CHECK(out.params == m.params);
        CHECK(history.epochs() == 0);
    }
    SUBCASE("identical runs give identical histories") {
        TrainConfig cfg;
        cfg.epochs = 3;
        cfg.batch_size = 4;
        cfg.seed = 5;
        const auto [m1, h1] = train(m, train_set, val_set, cfg);
        const auto [m2, h2] = train(m, train_set, val_set, cfg);
        CHECK(m1.params == m2.params);
        CHECK(h1.train_loss == h2.train_loss);
        CHECK(h1.val_acc == h2.val_acc);
    }
    SUBCASE("overfitting a single repeated sample drives the loss down") {
        LabeledDataset one;
        one.n_qubits = 3;
        one.samples.assign(4, train_set.samples[0]);
        TrainConfig cfg;
        cfg.epochs = 50;
        cfg.batch_size = 4;
        const auto [out, history] = train(m, one, one, cfg);
        (void)out;
        int upticks = 0;
        for (std::size_t e = 1; e < history.epochs(); ++e) {
            if (history.train_loss[e] > history.train_loss[e - 1] + 1e-12) ++upticks;
        }
        CHECK(upticks <= 5);  // Adam transients allowed
        CHECK(history.train_loss.back() < history.train_loss.front());
    }
    SUBCASE("best-validation parameters are returned") {
        TrainConfig cfg;
        cfg.epochs = 4;
        cfg.batch_size = 4;
        const auto [out, history] = train(m, train_set, val_set, cfg);
        const double best = *std::max_element(history.val_acc.begin(), history.val_acc.end());
        CHECK(out.best_val_accuracy == doctest::Approx(best));
        const auto [acc, loss] = evaluate(out, val_set);
        (void)loss;
        CHECK(acc == doctest::Approx(best));
    }
}

TEST_CASE("evaluation") {
    // a model against its own predictions is perfect by construction
    const ClassifierModel m = random_model(2);
    LabeledDataset ds = tiny_dataset(m.spec.n_in, 10, 9);
    for (auto& s : ds.samples) s.label = predict(m, s.state);
    const auto [acc, loss] = evaluate(m, ds);
    CHECK(acc == 1.0);
    CHECK(loss >= 0.0);

    LabeledDataset flipped = ds;
    for (auto& s : flipped.samples) s.label = 1 - s.label;
    const auto [acc_f, loss_f] = evaluate(m, flipped);
    (void)loss_f;
    CHECK(acc_f == doctest::Approx(1.0 - acc));
}

TEST_CASE("history csv has the documented schema") {
    TrainHistory h;
    h.train_loss = {0.5, 0.4};
    h.train_acc = {0.6, 0.7};
    h.val_loss = {0.55, 0.45};
    h.val_acc = {0.5, 0.75};
    const std::string csv = format_history_csv(h, std::vector<std::string>{"master_seed = 7"});
    CHECK(csv.find("epoch,train_loss,train_acc,val_loss,val_acc") != std::string::npos);
    CHECK(csv.find("# master_seed = 7") != std::string::npos);
    CHECK(csv.find("2,0.4") != std::string::npos);
}
