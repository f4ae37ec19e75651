#include "qadv/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qadv/rng.hpp"

namespace qadv {

namespace {

void require(bool ok, const std::string& constraint) {
    if (!ok) throw std::domain_error("bound query violates: " + constraint);
}

}  // namespace

double theorem1_min_epsilon(double d, int k, double mu_min, double r0) {
    require(d >= 2, "d >= 2");
    require(k >= 1, "k >= 1");
    require(mu_min > 0 && mu_min <= 1, "0 < mu_min <= 1");
    require(r0 >= 0 && r0 < 1, "0 <= R0 < 1");
    return std::sqrt(4.0 / d * std::log(2.0 * k / (mu_min * (1.0 - r0))));
}

double lemma_a1_min_epsilon(double d, double mu, double r) {
    require(d >= 2, "d >= 2");
    require(mu > 0 && mu <= 1, "0 < mu <= 1");
    require(r >= 0 && r < 1, "0 <= R < 1");
    return std::sqrt(4.0 / d * std::log(2.0 / (mu * (1.0 - r))));
}

double levy_min_epsilon(double alpha, double beta, double d, double mu, double r) {
    require(alpha > 0, "alpha > 0");
    require(beta > 0, "beta > 0");
    require(d >= 2, "d >= 2");
    require(mu > 0 && mu <= 1, "0 < mu <= 1");
    require(r >= 0 && r < 1, "0 <= R < 1");
    const double arg = alpha * alpha / (mu * (1.0 - r));
    require(arg > 0, "alpha^2 / (mu (1-R)) > 0");
    const double eps_sq = std::log(arg) / (beta * d);
    require(eps_sq >= 0, "ln argument >= 1 (bound would be imaginary)");
    return std::sqrt(eps_sq);
}

double union_risk_lower_bound(std::span<const double> adversarial_risks) {
    double sum = 0.0;
    for (double r : adversarial_risks) {
        require(r >= 0 && r <= 1, "each risk in [0, 1]");
        sum += r;
    }
    const double k = static_cast<double>(adversarial_risks.size());
    return std::max(0.0, sum - (k - 1.0));
}

double hoeffding_deviation(long n, double delta) {
    require(n >= 1, "n >= 1");
    require(delta > 0 && delta < 1, "0 < delta < 1");
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

double qnfl_classifier_bound(double d, double d_prime, double n_train) {
    require(d >= 2, "d >= 2");
    require(d_prime >= 1, "d' >= 1");
    require(n_train >= 0, "N >= 0");
    return 1.0 - d_prime * (n_train * n_train + d + 1.0) / (d * (d + 1.0));
}

double qnfl_classifier_bound_clamped(double d, double d_prime, double n_train) {
    return std::max(0.0, qnfl_classifier_bound(d, d_prime, n_train));
}

double qnfl_unitary_bound(double d, double n_train) {
    require(d >= 2, "d >= 2");
    require(n_train >= 0, "N >= 0");
    return 1.0 - (n_train * n_train + d + 1.0) / (d * (d + 1.0));
}

MonteCarloEstimate estimate_quantum_risk(std::span<const GateOp> truth_circuit,
                                         std::span<const GateOp> hypothesis_circuit, int n_qubits,
                                         long n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("estimate_quantum_risk: n_samples >= 1");
    double sum = 0.0, sum_sq = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        const StateVector psi = haar_random_state(n_qubits, mix_seed(seed, i));
        const StateVector t_psi = apply_circuit(psi, truth_circuit);
        const StateVector v_psi = apply_circuit(psi, hypothesis_circuit);
        // normalizing by the actual norms keeps identical circuits at
        // exactly zero and the estimate inside [0, 4]
        const double overlap_sq = std::norm(inner_product(t_psi, v_psi));
        const double norms = t_psi.norm_sq() * v_psi.norm_sq();
        const double fid = std::min(1.0, overlap_sq / norms);
        const double value = 4.0 * std::max(0.0, 1.0 - fid);
        sum += value;
        sum_sq += value * value;
    }
    MonteCarloEstimate est;
    est.n_samples = n_samples;
    const double n = static_cast<double>(n_samples);
    est.mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - est.mean * est.mean);
    est.std_error = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return est;
}

double verify_hoeffding(const ClassifierModel& model, const PerturbationLayer& layer,
                        long oracle_samples, int trials, int n, double delta,
                        std::uint64_t seed) {
    if (trials < 100) throw std::invalid_argument("verify_hoeffding: trials must be >= 100");
    if (oracle_samples < 1 || n < 1) {
        throw std::invalid_argument("verify_hoeffding: sample counts must be >= 1");
    }
    require(delta > 0 && delta < 1, "0 < delta < 1");

    auto flip_rate = [&](long count, std::uint64_t stream_seed) {
        double flips = 0.0;
        for (long i = 0; i < count; ++i) {
            const StateVector psi = haar_random_state(model.spec.n_in, mix_seed(stream_seed, i));
            if (predict(model, layer.apply(psi)) != predict(model, psi)) flips += 1.0;
        }
        return flips / static_cast<double>(count);
    };

    const double mu_hat = flip_rate(oracle_samples, mix_seed(seed, 0xa11ce));
    const double dev = hoeffding_deviation(n, delta);
    int covered = 0;
    for (int t = 0; t < trials; ++t) {
        const double r_e = flip_rate(n, mix_seed(seed, 1000 + t));
        if (std::abs(r_e - mu_hat) <= dev) covered += 1;
    }
    return static_cast<double>(covered) / trials;
}

}  // namespace qadv
