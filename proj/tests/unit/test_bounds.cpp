#include <doctest.h>

#include <cmath>
#include <vector>

#include "qadv/bounds.hpp"
#include "qadv/rng.hpp"

using namespace qadv;

namespace {

// independent high-precision route: the same formulas in long double
long double thm1_ref(long double d, long double k, long double mu, long double r0) {
    return sqrtl(4.0L / d * logl(2.0L * k / (mu * (1.0L - r0))));
}
long double levy_ref(long double a, long double b, long double d, long double mu, long double r) {
    return sqrtl(logl(a * a / (mu * (1.0L - r))) / (b * d));
}
long double hoeffding_ref(long double n, long double delta) {
    return sqrtl(logl(2.0L / delta) / (2.0L * n));
}
long double qnfl_ref(long double d, long double dp, long double n) {
    return 1.0L - dp * (n * n + d + 1.0L) / (d * (d + 1.0L));
}

double rel_err(double value, long double reference) {
    if (reference == 0.0L) return std::abs(value);
    return static_cast<double>(fabsl(value - reference) / fabsl(reference));
}

}  // namespace

TEST_CASE("closed forms reproduce frozen oracle values") {
    // computed independently at 30 digits (mpmath)
    CHECK(theorem1_min_epsilon(4, 1, 1.0, 0.0) ==
          doctest::Approx(0.8325546111576977).epsilon(1e-12));
    CHECK(theorem1_min_epsilon(256, 8, 0.05, 0.5) ==
          doctest::Approx(0.3177427265186834).epsilon(1e-12));
    CHECK(lemma_a1_min_epsilon(256, 0.05, 0.5) ==
          doctest::Approx(0.2616661349253651).epsilon(1e-12));
    CHECK(levy_min_epsilon(2, 0.5, 64, 0.1, 0.2) ==
          doctest::Approx(0.3496437028170671).epsilon(1e-12));
    CHECK(hoeffding_deviation(100, 0.05) == doctest::Approx(0.1358101515740619).epsilon(1e-12));
    CHECK(qnfl_classifier_bound(256, 2, 10) ==
          doctest::Approx(0.9891476167315175).epsilon(1e-12));
    CHECK(qnfl_unitary_bound(2, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("exact special points") {
    CHECK(hoeffding_deviation(1, 2.0 / (M_E * M_E)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(qnfl_classifier_bound(2, 2, 0) == 0.0);
    CHECK(union_risk_lower_bound(std::vector<double>{1.0, 1.0, 1.0}) == doctest::Approx(1.0));
    CHECK(union_risk_lower_bound(std::vector<double>{0.9, 0.9, 0.9}) ==
          doctest::Approx(0.7).epsilon(1e-12));
    CHECK(union_risk_lower_bound(std::vector<double>{0.1, 0.1}) == 0.0);  // clamped from -0.8
    CHECK(levy_min_epsilon(1, 1, 100, 1.0, 0.0) == 0.0);                  // ln 1
}

TEST_CASE("theorem1 = lemmaA1 = levy(sqrt2, 1/4) at k = 1") {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const double d = 2 + rng.integer(1 << 12);
        const double mu = 0.01 + 0.99 * rng.uniform();
        const double r = 0.99 * rng.uniform();
        const double a = theorem1_min_epsilon(d, 1, mu, r);
        const double b = lemma_a1_min_epsilon(d, mu, r);
        const double c = levy_min_epsilon(std::sqrt(2.0), 0.25, d, mu, r);
        CHECK(a == b);  // identical formula at k = 1
        CHECK(std::abs(a - c) <= 1e-14 * std::abs(a));
    }
}

TEST_CASE("closed forms match the long-double route on a random grid") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const double d = 2 + rng.integer(100000);
        const int k = 1 + static_cast<int>(rng.integer(16));
        const double mu = 0.001 + 0.999 * rng.uniform();
        const double r = 0.999 * rng.uniform();
        const double delta = 0.001 + 0.99 * rng.uniform();
        const long n = 1 + static_cast<long>(rng.integer(100000));
        const double dp = 1 + rng.integer(8);
        const double nt = rng.integer(50);

        CHECK(rel_err(theorem1_min_epsilon(d, k, mu, r), thm1_ref(d, k, mu, r)) < 1e-12);
        CHECK(rel_err(lemma_a1_min_epsilon(d, mu, r), thm1_ref(d, 1, mu, r)) < 1e-12);
        CHECK(rel_err(hoeffding_deviation(n, delta), hoeffding_ref(n, delta)) < 1e-12);
        CHECK(rel_err(qnfl_classifier_bound(d, dp, nt), qnfl_ref(d, dp, nt)) < 1e-12);
        CHECK(rel_err(qnfl_unitary_bound(d, nt), qnfl_ref(d, 1, nt)) < 1e-12);
        const double alpha = 0.5 + 3 * rng.uniform();
        const double beta = 0.05 + rng.uniform();
        if (alpha * alpha < mu * 1.01) continue;  // keep the bound real
        CHECK(rel_err(levy_min_epsilon(alpha, beta, d, mu, 0.0),
                      levy_ref(alpha, beta, d, mu, 0.0)) < 1e-12);
    }
}

TEST_CASE("monotonicities follow the formulas") {
    Rng rng(4);
    for (int i = 0; i < 40; ++i) {
        const double d = 4 + rng.integer(4000);
        const double mu = 0.05 + 0.9 * rng.uniform();
        const double r = 0.9 * rng.uniform();

        CHECK(theorem1_min_epsilon(2 * d, 2, mu, r) < theorem1_min_epsilon(d, 2, mu, r));
        CHECK(theorem1_min_epsilon(d, 3, mu, r) > theorem1_min_epsilon(d, 2, mu, r));
        CHECK(theorem1_min_epsilon(d, 2, std::min(1.0, mu * 1.5), r) <
              theorem1_min_epsilon(d, 2, mu, r));
        CHECK(theorem1_min_epsilon(d, 2, mu, 0.5 + r / 2) > theorem1_min_epsilon(d, 2, mu, r));

        const long n = 10 + static_cast<long>(rng.integer(1000));
        CHECK(hoeffding_deviation(2 * n, 0.05) < hoeffding_deviation(n, 0.05));
        CHECK(hoeffding_deviation(n, 0.2) < hoeffding_deviation(n, 0.05));
        // exact halving when n quadruples
        CHECK(hoeffding_deviation(4 * n, 0.05) ==
              doctest::Approx(hoeffding_deviation(n, 0.05) / 2).epsilon(1e-15));

        CHECK(qnfl_classifier_bound(d, 2, 10) < qnfl_classifier_bound(d, 2, 5));
        CHECK(qnfl_classifier_bound(d, 4, 5) < qnfl_classifier_bound(d, 2, 5));
    }

    SUBCASE("doubling d shrinks the theorem-1 bound by exactly sqrt(2)") {
        const double e1 = theorem1_min_epsilon(128, 4, 0.1, 0.3);
        const double e2 = theorem1_min_epsilon(256, 4, 0.1, 0.3);
        CHECK(e1 / e2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("lemma A1 diverges as R approaches 1") {
        double prev = 0.0;
        for (double r : {0.9, 0.99, 0.999, 0.9999}) {
            const double e = lemma_a1_min_epsilon(64, 0.5, r);
            CHECK(e > prev);
            prev = e;
        }
        CHECK(prev > lemma_a1_min_epsilon(64, 0.5, 0.0) * 2);
    }
    SUBCASE("qnfl identity between the classifier and unitary forms") {
        for (double d : {2.0, 16.0, 256.0}) {
            for (double n : {0.0, 3.0, 10.0}) {
                CHECK(qnfl_classifier_bound(d, 1, n) == qnfl_unitary_bound(d, n));
            }
        }
    }
    SUBCASE("raw qnfl goes negative and the clamp floors it") {
        const double raw = qnfl_classifier_bound(4, 2, 10);
        CHECK(raw < 0.0);
        CHECK(qnfl_classifier_bound_clamped(4, 2, 10) == 0.0);
    }
}

TEST_CASE("domain errors carry the violated constraint") {
    CHECK_THROWS_AS(theorem1_min_epsilon(1, 1, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(theorem1_min_epsilon(4, 0, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(theorem1_min_epsilon(4, 1, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(theorem1_min_epsilon(4, 1, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(lemma_a1_min_epsilon(4, 1.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(levy_min_epsilon(0.0, 0.25, 4, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(levy_min_epsilon(0.5, 0.25, 4, 1.0, 0.0), std::domain_error);  // ln < 0
    CHECK_THROWS_AS(hoeffding_deviation(0, 0.05), std::domain_error);
    CHECK_THROWS_AS(hoeffding_deviation(10, 1.0), std::domain_error);
    CHECK_THROWS_AS(qnfl_classifier_bound(1, 2, 0), std::domain_error);
    CHECK_THROWS_AS(union_risk_lower_bound(std::vector<double>{1.5}), std::domain_error);
}

TEST_CASE("quantum risk estimator") {
    SUBCASE("identical channels give exactly zero") {
        const std::vector<GateOp> circuit{GateOp::rx(0, 0.4), GateOp::rz(1, -0.9),
                                          GateOp::cnot(0, 1)};
        const auto est = estimate_quantum_risk(circuit, circuit, 2, 200, 5);
        CHECK(est.mean == 0.0);
        CHECK(est.std_error == 0.0);
    }
    SUBCASE("a global phase is invisible") {
        const std::vector<GateOp> identity;
        const std::vector<GateOp> phase{GateOp::rz(0, 2 * M_PI)};  // -I on that qubit
        const auto est = estimate_quantum_risk(identity, phase, 1, 500, 6);
        CHECK(std::abs(est.mean) < 1e-12);
    }
    SUBCASE("X against identity matches the analytic Haar value 8/3") {
        const std::vector<GateOp> identity;
        const std::vector<GateOp> x{GateOp::rx(0, M_PI)};  // -iX, phase drops out
        const auto est = estimate_quantum_risk(identity, x, 1, 100000, 7);
        CHECK(std::abs(est.mean - 8.0 / 3.0) < 3.0 * est.std_error);
        CHECK(est.std_error < 0.02);
    }
    SUBCASE("estimates stay inside [0, 4]") {
        Rng rng(8);
        for (int i = 0; i < 5; ++i) {
            std::vector<GateOp> a{GateOp::rx(0, rng.uniform(-3, 3)), GateOp::rz(1, rng.uniform(-3, 3))};
            std::vector<GateOp> b{GateOp::cnot(0, 1), GateOp::rx(1, rng.uniform(-3, 3))};
            const auto est = estimate_quantum_risk(a, b, 2, 300, 100 + i);
            CHECK(est.mean >= 0.0);
            CHECK(est.mean <= 4.0);
        }
    }
}

TEST_CASE("hoeffding coverage on a toy flip experiment") {
    const ClassifierModel m = build_variational_classifier(2, 1, 404);
    PerturbationLayer layer = PerturbationLayer::identity(2);
    Rng rng(405);
    for (double& a : layer.angles) a = rng.uniform(-1.2, 1.2);

    const double coverage = verify_hoeffding(m, layer, 20000, 200, 100, 0.05, 9);
    CHECK(coverage >= 0.95);  // Hoeffding is conservative, usually ~1.0
    CHECK_THROWS_AS(verify_hoeffding(m, layer, 1000, 50, 100, 0.05, 9), std::invalid_argument);
}
