#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qadv/attacks.hpp"
#include "qadv/rng.hpp"

using namespace qadv;

namespace {

LabeledSample labeled_by(const ClassifierModel& truth, const StateVector& state) {
    LabeledSample s;
    s.state = state;
    s.label = predict(truth, state);
    return s;
}

LabeledDataset haar_dataset(const ClassifierModel& truth, int count, std::uint64_t seed) {
    LabeledDataset ds;
    ds.n_qubits = truth.spec.n_in;
    ds.seed = seed;
    for (int i = 0; i < count; ++i) {
        ds.samples.push_back(labeled_by(truth, haar_random_state(truth.spec.n_in, mix_seed(seed, i))));
    }
    return ds;
}

double summed_loss_on(std::span<const ClassifierModel> models, const StateVector& s, int label) {
    double total = 0.0;
    for (const ClassifierModel& m : models) total += cross_entropy(forward(m, s), label);
    return total;
}

PerturbationLayer random_layer(int n_qubits, double magnitude, std::uint64_t seed) {
    PerturbationLayer l = PerturbationLayer::identity(n_qubits);
    Rng rng(seed);
    for (double& a : l.angles) a = rng.uniform(-magnitude, magnitude);
    return l;
}

}  // namespace

TEST_CASE("qbim degenerate configurations return the input exactly") {
    const ClassifierModel m = build_variational_classifier(3, 1, 4);
    LabeledSample s = labeled_by(m, haar_random_state(3, 50));
    const std::vector<ClassifierModel> models{m};

    SUBCASE("max_iters = 0") {
        AttackConfig cfg;
        cfg.epsilon_budget = 0.2;
        cfg.max_iters = 0;
        const auto [adv, rec] = qbim_state_attack(models, s, cfg);
        CHECK(adv.amps == s.state.amps);
        CHECK(rec.fidelity == 1.0);
    }
    SUBCASE("epsilon budget = 0") {
        AttackConfig cfg;
        cfg.epsilon_budget = 0.0;
        cfg.max_iters = 50;
        const auto [adv, rec] = qbim_state_attack(models, s, cfg);
        CHECK(adv.amps == s.state.amps);
        CHECK(rec.fidelity == 1.0);
    }
}

TEST_CASE("qbim respects the budget and keeps states normalized") {
    Rng rng(8);
    for (int trial = 0; trial < 6; ++trial) {
        const ClassifierModel m1 = build_variational_classifier(3, 2, 60 + trial);
        const ClassifierModel m2 = build_qcnn(3, QcnnVariant::Small, 80 + trial);
        const std::vector<ClassifierModel> models{m1, m2};
        LabeledSample s = labeled_by(m1, haar_random_state(3, 700 + trial));

        AttackConfig cfg;
        cfg.epsilon_budget = 0.05 + 0.1 * rng.uniform();
        cfg.max_iters = 30;
        const auto [adv, rec] = qbim_state_attack(models, s, cfg);
        (void)rec;
        CHECK(std::abs(adv.norm_sq() - 1.0) < 1e-10);
        CHECK(trace_distance_pure(s.state, adv) <= cfg.epsilon_budget + 1e-9);
    }
}

TEST_CASE("qbim beats a 10^4-point grid search on the budget sphere") {
    // single 2-qubit toy classifier, mirrored by an independent random
    // search over states at the exact budget distance
    const ClassifierModel m = build_variational_classifier(2, 1, 12);
    const std::vector<ClassifierModel> models{m};
    LabeledSample s = labeled_by(m, haar_random_state(2, 99));

    AttackConfig cfg;
    cfg.epsilon_budget = 0.3;
    cfg.max_iters = 200;
    cfg.step_alpha = 0.02;
    const auto [adv, rec] = qbim_state_attack(models, s, cfg);
    (void)rec;
    const double qbim_loss = summed_loss_on(models, adv, s.label);

    const double eps = cfg.epsilon_budget;
    double best = 0.0;
    for (int i = 0; i < 10000; ++i) {
        StateVector w = haar_random_state(2, mix_seed(4242, i));
        const cxd c = inner_product(s.state, w);
        for (std::size_t j = 0; j < w.dim(); ++j) w.amps[j] -= c * s.state.amps[j];
        const double wn = std::sqrt(w.norm_sq());
        if (wn < 1e-9) continue;
        StateVector probe = s.state;
        for (std::size_t j = 0; j < w.dim(); ++j) {
            probe.amps[j] = std::sqrt(1.0 - eps * eps) * s.state.amps[j] + eps / wn * w.amps[j];
        }
        best = std::max(best, summed_loss_on(models, probe, s.label));
    }
    CHECK(qbim_loss >= 0.95 * best);
}

TEST_CASE("perturbation layer is unitary and identity at zero angles") {
    const PerturbationLayer id = PerturbationLayer::identity(3);
    CHECK(id.is_identity());
    const StateVector psi = haar_random_state(3, 5);
    CHECK(id.apply(psi).amps == psi.amps);

    const PerturbationLayer l = random_layer(3, 1.5, 31);
    const StateVector forth = l.apply(psi);
    CHECK(std::abs(forth.norm_sq() - 1.0) < 1e-10);
    const StateVector back = l.apply_inverse(forth);
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        CHECK(std::abs(back.amps[i] - psi.amps[i]) < 1e-10);
    }
}

TEST_CASE("universal perturbation search") {
    const ClassifierModel truth = build_variational_classifier(3, 1, 123);
    const ClassifierModel m = build_variational_classifier(3, 2, 124);
    const LabeledDataset ds = haar_dataset(truth, 12, 9);

    SUBCASE("zero iterations keep the identity layer and the accuracy") {
        AttackConfig cfg;
        cfg.max_iters = 0;
        const auto [layer, report] = universal_perturbation_search(m, ds, cfg);
        CHECK(layer.is_identity());
        CHECK(report.universal_risk ==
              doctest::Approx(empirical_error_rate(m, layer, ds.samples)));
    }
    SUBCASE("accepted losses are monotone and the layer hurts the model") {
        AttackConfig cfg;
        cfg.max_iters = 25;
        cfg.step_alpha = 0.1;
        PerturbationTrace trace;
        const auto [layer, report] = universal_perturbation_search(m, ds, cfg, &trace);
        (void)report;
        REQUIRE(trace.mean_loss.size() >= 2);
        for (std::size_t i = 1; i < trace.mean_loss.size(); ++i) {
            CHECK(trace.mean_loss[i] >= trace.mean_loss[i - 1] - 1e-12);
        }
        CHECK(trace.mean_loss.back() > trace.mean_loss.front());
        CHECK_FALSE(layer.is_identity());
        // eps proxy grows from zero as the layer departs from identity
        CHECK(trace.eps_proxy.front() == 0.0);
        CHECK(trace.eps_proxy.back() > 0.0);
    }
    SUBCASE("budget stops the search") {
        AttackConfig cfg;
        cfg.max_iters = 200;
        cfg.step_alpha = 0.2;
        cfg.epsilon_budget = 0.05;
        PerturbationTrace trace;
        universal_perturbation_search(m, ds, cfg, &trace);
        // once the proxy passes the budget no further step is accepted
        for (std::size_t i = 0; i + 1 < trace.eps_proxy.size(); ++i) {
            CHECK(trace.eps_proxy[i] < cfg.epsilon_budget);
        }
    }
}

TEST_CASE("risk curve baseline and monotonicity") {
    const ClassifierModel truth = build_variational_classifier(3, 1, 55);
    const std::vector<ClassifierModel> models{build_variational_classifier(3, 1, 56),
                                              build_qcnn(3, QcnnVariant::Small, 57)};
    const LabeledDataset ds = haar_dataset(truth, 16, 77);

    AttackConfig cfg;
    cfg.max_iters = 25;

    SUBCASE("grid [0] reproduces the joint clean misclassification exactly") {
        const std::vector<double> grid{0.0};
        const RiskCurve curve = risk_curve(models, ds, grid, cfg);
        double joint = 0.0;
        for (const auto& s : ds.samples) {
            bool all = true;
            for (const auto& m : models) all = all && predict(m, s.state) != s.label;
            if (all) joint += 1.0;
        }
        joint /= static_cast<double>(ds.samples.size());
        CHECK(curve.risk[0] == joint);
    }
    SUBCASE("warm-started curve never decreases") {
        const std::vector<double> grid{0.0, 0.08, 0.16, 0.24, 0.32};
        const RiskCurve curve = risk_curve(models, ds, grid, cfg);
        for (std::size_t i = 1; i < curve.risk.size(); ++i) {
            CHECK(curve.risk[i] >= curve.risk[i - 1]);
        }
    }
    SUBCASE("descending grids are rejected") {
        const std::vector<double> grid{0.2, 0.1};
        CHECK_THROWS_AS(risk_curve(models, ds, grid, cfg), std::invalid_argument);
    }
}

TEST_CASE("transfer evaluation") {
    const ClassifierModel truth = build_variational_classifier(3, 1, 61);
    const ClassifierModel surrogate = build_variational_classifier(3, 2, 62);
    const std::vector<ClassifierModel> targets{surrogate};
    const LabeledDataset ds = haar_dataset(truth, 12, 13);

    AttackConfig cfg;
    cfg.epsilon_budget = 0.2;
    cfg.max_iters = 25;

    SUBCASE("degenerate target set reduces to the white-box attack") {
        const AttackReport transfer = transfer_attack_eval(surrogate, targets, ds, cfg);
        const AttackReport white = universal_example_search(targets, ds, cfg);
        CHECK(transfer.universal_risk == white.universal_risk);
        CHECK(transfer.mean_fidelity == doctest::Approx(white.mean_fidelity));
    }
    SUBCASE("epsilon 0 gives the clean joint baseline") {
        AttackConfig zero = cfg;
        zero.epsilon_budget = 0.0;
        const AttackReport report = transfer_attack_eval(surrogate, targets, ds, zero);
        CHECK(report.universal_risk ==
              doctest::Approx(empirical_error_rate(surrogate, PerturbationLayer::identity(3),
                                                   ds.samples)));
    }
}

TEST_CASE("empirical error rate") {
    const ClassifierModel m = build_variational_classifier(3, 1, 91);
    LabeledDataset ds = haar_dataset(m, 10, 17);  // labeled by the model itself
    const PerturbationLayer id = PerturbationLayer::identity(3);
    CHECK(empirical_error_rate(m, id, ds.samples) == 0.0);  // all correct + identity

    const auto [acc, loss] = evaluate(m, ds);
    (void)loss;
    CHECK(empirical_error_rate(m, id, ds.samples) == doctest::Approx(1.0 - acc));
}

TEST_CASE("haar risk is invariant under a fixed unitary layer (small n)") {
    const ClassifierModel truth = build_variational_classifier(2, 1, 301);
    const ClassifierModel m = build_variational_classifier(2, 2, 302);
    const PerturbationLayer layer = random_layer(2, 1.0, 303);

    const int n = 4000;
    const double base = haar_risk_estimate(m, truth, nullptr, n, 11);
    const double layered = haar_risk_estimate(m, truth, &layer, n, 12);
    const double pooled = 0.5 * (base + layered);
    const double sigma = std::sqrt(2.0 * std::max(pooled * (1.0 - pooled), 1e-6) / n);
    CHECK(std::abs(base - layered) <= 3.0 * sigma);
}
