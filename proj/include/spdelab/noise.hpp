#pragma once

#include <string>
#include <vector>

#include "spdelab/field.hpp"
#include "spdelab/random.hpp"

namespace spdelab {

/// Spectrum of the Q-Wiener process W = sum_i sqrt(lambda_i) e_i beta_i,
/// truncated to lambdas.size() modes.
struct NoiseSpec {
    Eigen::VectorXd lambdas;
    /// Integrability exponent used by the d >= 2 check; zeta is its conjugate.
    double theta = 2.0;

    enum class Decay { constant, inverse, inverse_square };

    /// lambda_i = 1, 1/i or 1/i^2 for i = 1..n_modes.
    static NoiseSpec with_decay(Decay decay, int n_modes);

    int n_modes() const { return static_cast<int>(lambdas.size()); }
    double zeta() const { return theta / (theta - 1.0); }
    void validate() const;
};

NoiseSpec::Decay parse_decay(const std::string& name);
std::string to_string(NoiseSpec::Decay decay);

/// Declared behaviour of lambda_i beyond the truncation: lambda_i = scale * i^{-exponent}.
/// exponent = 0 is a constant tail.
struct TailModel {
    double scale = 1.0;
    double exponent = 0.0;

    static TailModel from(NoiseSpec::Decay decay);
};

struct HypothesisReport {
    bool pass = false;
    /// Partial sum of lambda_i^theta |e_i|_inf^2 over the declared tail (d >= 2 only).
    double partial_sum = 0.0;
    std::string detail;
};

/// Checks the noise hypothesis: for d = 1, sup_i lambda_i < infinity; for d >= 2,
/// theta < d/(d-2) and sum_i lambda_i^theta |e_i|_inf^2 < infinity with |e_i|_inf = sqrt(2).
HypothesisReport validate_hypothesis(const NoiseSpec& spec, int d, const TailModel& tail);

/// One increment of W over a step of length h: per-mode N(0, lambda_i h) draws.
struct NoiseIncrement {
    Eigen::VectorXd dW;
    double h = 0.0;
};

NoiseIncrement sample_increment(const NoiseSpec& spec, double h, CounterRng& rng);

/// |phi|_{H0} = (sum_i c_i^2 / lambda_i)^{1/2} for H-coefficients c_i = <phi, e_i>.
/// Coefficients past the noise truncation count as modes with lambda = 0.
double h0_norm(const Eigen::Ref<const Spectrum>& coefficients, const NoiseSpec& spec);

/// All increments of one trajectory, frozen so that repeated passes over the
/// same time grid (Picard iterations, common-noise pairs) see the same noise.
/// `beta` holds standard Brownian increments, N(0, h), one column per step.
struct NoiseRealization {
    Eigen::MatrixXd beta;
    double h = 0.0;

    int n_steps() const { return static_cast<int>(beta.cols()); }
    /// dW_i = sqrt(lambda_i) beta_i for step m.
    Eigen::VectorXd increment(const NoiseSpec& spec, int m) const;
};

/// Draws step m from CounterRng(key, m), so the realization is schedule-independent.
NoiseRealization make_realization(const NoiseSpec& spec, int n_steps, double h, StreamKey key);

/// A realization of zeros (deterministic runs).
NoiseRealization zero_realization(const NoiseSpec& spec, int n_steps, double h);

}  // namespace spdelab
