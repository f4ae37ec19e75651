#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qadv/attacks.hpp"
#include "qadv/model.hpp"
#include "qadv/state.hpp"

namespace qadv {

/// Inputs for the closed-form bound evaluators, mirroring the symbols of
/// the robustness theorems; the CLI fills this from key=value arguments.
struct BoundQuery {
    double d = 2;         // Hilbert dimension
    int k = 1;            // ensemble size
    double mu = 1.0;      // (minimum) risk in (0, 1]
    double r0 = 0.0;      // target adversarial risk in [0, 1)
    double delta = 0.05;  // confidence in (0, 1)
    long n = 1;           // sample count
    double n_train = 0;   // training-set size N
    double d_prime = 2;   // label count
    double alpha = 1.414213562373095048801688724209698;  // Levy constants
    double beta = 0.25;
};

/// Minimum perturbation strength guaranteeing universal adversarial risk
/// >= R0 for k classifiers: sqrt( (4/d) ln( 2k / (mu_min (1-R0)) ) ).
double theorem1_min_epsilon(double d, int k, double mu_min, double r0);

/// Single-classifier bound, sqrt( (4/d) ln( 2 / (mu (1-R)) ) );
/// equals theorem1_min_epsilon at k = 1.
double lemma_a1_min_epsilon(double d, double mu, double r);

/// General (alpha, beta)-normal Levy-group form,
/// sqrt( (1/(beta d)) ln( alpha^2 / (mu (1-R)) ) ).
double levy_min_epsilon(double alpha, double beta, double d, double mu, double r);

/// max(0, sum risks - (k-1)): the union lower bound, clamped at zero.
double union_risk_lower_bound(std::span<const double> adversarial_risks);

/// sqrt( ln(2/delta) / (2n) ).
double hoeffding_deviation(long n, double delta);

/// Quantum no-free-lunch classifier bound 1 - d'(N^2+d+1)/(d(d+1)),
/// returned raw (negative = vacuous).
double qnfl_classifier_bound(double d, double d_prime, double n_train);
double qnfl_classifier_bound_clamped(double d, double d_prime, double n_train);

/// Unitary-learning form 1 - (N^2+d+1)/(d(d+1)), raw.
double qnfl_unitary_bound(double d, double n_train);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
};

/// Monte-Carlo value of the quantum risk integral: the Haar mean of the
/// squared trace norm || t|psi><psi|t^dag - V|psi><psi|V^dag ||_1^2,
/// computed as 4 (1 - |<psi| t^dag V |psi>|^2) for pure states (the
/// unnormalized convention Tr|A|; values lie in [0, 4]). Identical gate
/// lists give exactly zero.
MonteCarloEstimate estimate_quantum_risk(std::span<const GateOp> truth_circuit,
                                         std::span<const GateOp> hypothesis_circuit, int n_qubits,
                                         long n_samples, std::uint64_t seed);

/// Empirical Hoeffding coverage for the empirical-error-rate bound. The
/// misclassification event is "the layer flips the model's clean-state
/// prediction", a fixed Bernoulli over Haar draws: mu is estimated once
/// from `oracle_samples` draws, then `trials` experiments of n draws each
/// count how often |R_E - mu_hat| <= hoeffding_deviation(n, delta).
/// Returns the covered fraction (expected >= 1 - delta).
double verify_hoeffding(const ClassifierModel& model, const PerturbationLayer& layer,
                        long oracle_samples, int trials, int n, double delta, std::uint64_t seed);

}  // namespace qadv
