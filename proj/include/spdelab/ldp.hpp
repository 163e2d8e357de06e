#pragma once

#include <limits>
#include <string>
#include <vector>

#include "spdelab/control.hpp"
#include "spdelab/feedback.hpp"
#include "spdelab/model.hpp"

namespace spdelab {

/// The controlled skeleton X' = AX + F(X) + sigma(X, v_t(s, X)) phi(s), X(t_start) = x,
/// on the control's time grid. The drift enters the implicit reaction substep.
Path solve_skeleton(const Setup& setup, const Eigen::Ref<const Field>& x, const Control& control);

/// (1/2) int |phi(s)|_{H0}^2 ds.
inline double rate_functional(const Control& control) { return control.cost(); }

/// What the skeleton has to hit at the end of the window.
struct RateTarget {
    enum class Kind { terminal_field, terminal_functional, path };

    Kind kind = Kind::terminal_functional;
    /// terminal_field: the target X(t).
    Field field;
    /// path: the target trajectory, on the control's time grid.
    Path path;
    /// terminal_functional: <X(t), e_mode> for mode >= 1, the spatial mean for mode = 0.
    int mode = 1;
    double level = 0.0;

    static RateTarget functional(int mode, double level);
    static RateTarget terminal(Field field);
    static RateTarget trajectory(Path path);
};

struct RateOptions {
    /// Controlled noise modes.
    int n_ctrl = 8;
    int n_steps = 64;
    /// Constraint tolerance in the sup-norm of the target mismatch.
    double tol_target = 1e-3;
    double penalty = 1e3;
    int max_outer = 12;
    int max_inner = 25;
    double fd_step = 1e-6;
};

struct RateResult {
    Control control;
    /// (1/2)|phi|^2, or +infinity when the target was not met.
    double value = std::numeric_limits<double>::infinity();
    /// Cost of the best iterate, finite even when the target was missed.
    double best_cost = 0.0;
    double violation = std::numeric_limits<double>::infinity();
    bool reachable = true;
    bool converged = false;
    int iterations = 0;
    std::string detail;
};

/// Minimizes (1/2) int |phi|_{H0}^2 subject to the skeleton meeting the target.
/// Gauss-Newton on an augmented Lagrangian with a finite-difference Jacobian
/// over the n_ctrl x n_steps control coefficients; the penalty grows tenfold
/// whenever the mismatch fails to shrink by a factor 4.
RateResult minimize_rate(const Setup& setup, const Eigen::Ref<const Field>& x, double t, const RateTarget& target,
                         const RateOptions& options = {});

/// The linear-additive minimum energy for steering mode k from 0 to b at time t:
/// alpha_k b^2 / (lambda_k (1 - e^{-2 alpha_k t})).
double gramian_rate(double alpha, double lambda, double b, double t);

/// phi(s) + amplitude sin(2 pi s / period) on noise mode `mode` (1-based).
Control oscillatory_control(const Control& base, double amplitude, double period, int mode = 1);

struct C1Row {
    double eps = 0.0;
    /// E sup_s |X_eps^{phi_eps} - X^phi|_E.
    double error = 0.0;
    double stderr_ = 0.0;
};

struct C1Report {
    std::vector<C1Row> rows;
    /// Least-squares slope of log error against log eps.
    double slope = 0.0;
    /// Error decreases along decreasing eps.
    bool monotone = false;
};

/// For each eps, n_paths solves of the controlled SPDE driven by family[i]
/// against the eps = 0 solve driven by `limit`. Path j uses stream key.child(j)
/// at every eps (common random numbers).
C1Report c1_convergence_test(const Setup& setup, const Eigen::Ref<const Field>& x, const std::vector<Control>& family,
                             const Control& limit, const std::vector<double>& eps_grid, int n_paths,
                             const ValueFunction& value_fn, StreamKey key);

/// sup_s |X^{phi_delta} - X^phi|_E for the oscillatory family at each period.
std::vector<double> oscillation_errors(const Setup& setup, const Eigen::Ref<const Field>& x, const Control& base,
                                       double amplitude, const std::vector<double>& periods, int mode = 1);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// The event {<X(t), e_mode> >= level} (mode = 0: spatial mean).
struct RareEvent {
    int mode = 1;
    double level = 0.0;
};

struct RareEventOptions {
    int n_paths = 100000;
    int n_steps = 64;
    /// Shift the noise by phi*/sqrt(eps), phi* the minimizing control, and
    /// reweight by the Girsanov density.
    bool importance = true;
    RateOptions rate;
};

struct RareEventRow {
    double eps = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    long hits = 0;
    /// eps log P; with zero hits, the bound eps log(3 / n_paths) instead.
    double eps_log_p = 0.0;
    double gap = 0.0;
    bool bound_only = false;
};

struct RareEventReport {
    std::vector<RareEventRow> rows;
    double I_star = 0.0;
    RateResult rate;
};

RareEventReport rare_event_compare(const Setup& setup, const Eigen::Ref<const Field>& x, double t,
                                   const RareEvent& event, const std::vector<double>& eps_grid,
                                   const RareEventOptions& options, StreamKey key);

}  // namespace spdelab
