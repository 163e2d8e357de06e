#pragma once

#include <functional>
#include <vector>

#include "spdelab/control.hpp"
#include "spdelab/model.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/value_function.hpp"

namespace spdelab {

/// One solve of dX = (AX + F(X)) ds + sqrt(eps) sigma(X, v(s, X)) dW on [t_start, t_end].
struct SpdeRun {
    double eps = 0.0;
    double t_start = 0.0;
    double t_end = 1.0;
    Field x;
    int n_steps = 64;
    double picard_tol = 1e-4;
    int picard_max = 20;

    double step() const { return (t_end - t_start) / n_steps; }
    void validate(const SpatialGrid& grid) const;
};

/// The feedback argument v(r_m, X(r_m)) for step m of a run.
using FeedbackFn = std::function<Observation(int m, double r, const Field& x)>;

/// Builds the feedback for a run ending at t with time step h: v_deterministic, or
/// v_monte_carlo at the value function's depth using streams key.child(m).
/// Returns an empty function when sigma ignores the feedback argument.
FeedbackFn make_feedback(const Setup& setup, const ValueFunction& value_fn, double t, double eps, double h,
                         StreamKey key);

/// The multiplier fields sigma(X(r_m), v(r_m, X(r_m))), m = 0..n_steps-1.
std::vector<Field> sigma_fields(const Setup& setup, const Path& iterate, const FeedbackFn& feedback);

/// gamma(X)(s) = int S(s-r) sigma(X(r), v(r, X(r))) dW_r, left-point in sigma, with
/// each step's increment propagated by the exact per-mode decay; the per-step
/// weight sqrt((1 - e^{-2 alpha h}) / (2 alpha h)) makes the variance exact for
/// constant sigma.
Path stochastic_convolution(const Setup& setup, const std::vector<Field>& sigma, const NoiseRealization& noise,
                            double t_start, double t_end);
Path stochastic_convolution(const Setup& setup, const Path& iterate, const FeedbackFn& feedback,
                            const NoiseRealization& noise);

/// int S(s-r) sigma(X(r), v(r, X(r))) phi(r) dr, left-point exponential quadrature.
Path control_convolution(const Setup& setup, const std::vector<Field>& sigma, const Control& control,
                         double t_start, double t_end);

struct PicardDiagnostics {
    /// sup_s |X^{m+1} - X^m|_E per iteration.
    std::vector<double> diffs;
    /// diffs[m+1] / diffs[m].
    std::vector<double> ratios;
    int iterations = 0;
    bool converged = false;
};

struct PicardResult {
    Path path;
    PicardDiagnostics diagnostics;
};

/// Iterates X^{m+1} = M(sqrt(eps) gamma(X^m) [+ control term] + S(. - t_start) x) from
/// X^0 = M(S(. - t_start) x) on the frozen realization. Runs whose coefficient
/// cannot change between iterations (eps = 0 without control, state-independent
/// sigma) stop after one iteration. Throws ContractionFailure when the ratio stays
/// >= 1 for two consecutive iterations or picard_max is reached.
PicardResult picard_solve(const Setup& setup, const SpdeRun& run, const FeedbackFn& feedback,
                          const NoiseRealization& noise, const Control* control = nullptr);

/// Convenience overload: the realization is drawn from key.child(0) and the
/// feedback streams from key.child(1).
PicardResult picard_solve(const Setup& setup, const SpdeRun& run, const ValueFunction& value_fn, StreamKey key,
                          const Control* control = nullptr);

struct ThresholdRow {
    double eps = 0.0;
    double mean_ratio = 0.0;
    double stderr_ = 0.0;
    int n_noise = 0;
};

struct ThresholdReport {
    std::vector<ThresholdRow> rows;
    /// Largest eps with mean ratio < 1 (0 when none).
    double eps_star = 0.0;
};

/// For each eps, the mean over n_noise realizations (streams key.child(i), shared
/// across eps) of the first contraction ratio |X^2 - X^1| / |X^1 - X^0|.
ThresholdReport epsilon_threshold_probe(const Setup& setup, const SpdeRun& run_template,
                                        const std::vector<double>& eps_grid, int n_noise,
                                        const ValueFunction& value_fn, StreamKey key);

struct FailureSearch {
    bool found = false;
    double eps = 0.0;
    double measured_ratio = 0.0;
    std::string message;
};

/// Doubles eps from run.eps until picard_solve raises ContractionFailure.
FailureSearch find_contraction_failure(const Setup& setup, const SpdeRun& run, const ValueFunction& value_fn,
                                       StreamKey key, int max_doublings = 40);

struct FlowLipschitzReport {
    /// max over pairs of (E sup_s |X1 - X2|_E^p)^{1/p} / |x1 - x2|_E, p = 1 and 2.
    double ratio_p1 = 0.0;
    double ratio_p2 = 0.0;
};

/// Common-noise pairs: realization i (stream key.child(i)) drives both members of every pair.
FlowLipschitzReport flow_lipschitz_probe(const Setup& setup, const SpdeRun& run_template,
                                         const std::vector<std::pair<Field, Field>>& x_pairs, int n_noise,
                                         const ValueFunction& value_fn, StreamKey key);

struct MomentRow {
    double eps = 0.0;
    /// E sup_s |X|_E^p / (1 + |x|_E^p).
    double ratio = 0.0;
};

struct MomentReport {
    std::vector<MomentRow> rows;
    /// sup over rows <= 2 * (eps = 0 value) + slack.
    bool bounded = false;
};

MomentReport moment_bound_probe(const Setup& setup, const SpdeRun& run_template, double p,
                                const std::vector<double>& eps_grid, int n_noise, const ValueFunction& value_fn,
                                StreamKey key, double slack = 0.1);

}  // namespace spdelab
