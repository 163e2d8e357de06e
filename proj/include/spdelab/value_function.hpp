#pragma once

#include "spdelab/model.hpp"
#include "spdelab/random.hpp"

namespace spdelab {

/// How the feedback value v(r, y) is evaluated inside a stochastic run.
struct ValueFunction {
    enum class Kind { deterministic, monte_carlo };

    Kind kind = Kind::deterministic;
    /// Inner trajectories per evaluation (monte_carlo only).
    int k_inner = 64;
    /// Fixed-point depth: inner trajectories use v_deterministic at depth 0 and
    /// v_monte_carlo at depth m_fp - 1 otherwise.
    int m_fp = 1;

    void validate() const;
};

/// v_t(rho, y) = g(Y(t)) with Y the deterministic flow started from y at time rho,
/// on max(16, ceil((t - rho)/h)) steps. rho == t returns g(y) exactly.
Observation v_deterministic(const Setup& setup, double rho, const Eigen::Ref<const Field>& y, double t, double h);

struct ValueEstimate {
    Observation mean;
    /// Componentwise jackknife standard error.
    Observation stderr_;
    int n_samples = 0;
};

/// v_{t,eps}(rho, y) = E g(X(t)) for the feedback SPDE started from y at time rho,
/// estimated from k_inner trajectories. Inner trajectory i uses the streams
/// key.child(2i) (noise) and key.child(2i+1) (its own feedback evaluations).
/// eps == 0 reproduces v_deterministic exactly.
ValueEstimate v_monte_carlo(const Setup& setup, double rho, const Eigen::Ref<const Field>& y, double t, double eps,
                            int k_inner, int m_fp, StreamKey key, double h);

}  // namespace spdelab
