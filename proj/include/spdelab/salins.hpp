#pragma once

#include <functional>
#include <vector>

#include "spdelab/field.hpp"
#include "spdelab/random.hpp"
#include "spdelab/reaction.hpp"
#include "spdelab/semigroup.hpp"

namespace spdelab {

/// u(s) = int_lambda^s S(s-r) F(u(r)) dr + z(s) on the window [z.t_start, z.t_end].
struct SalinsProblem {
    ReactionSpec reaction;
    HeatSemigroup semigroup;
    Path z;

    double lambda() const { return z.t_start; }
    double t() const { return z.t_end; }
};

enum class SalinsScheme { splitting, yosida };

struct SalinsOptions {
    SalinsScheme scheme = SalinsScheme::splitting;
    /// Yosida index used by the `yosida` scheme.
    int yosida_n = 10000;
};

/// Optional explicit drift d(m, u_m): a field added to the reaction on step m,
/// evaluated at the left state. Used for controlled equations.
using DriftFn = std::function<Field(int, const Field&)>;

/// Solves for v = u - z: v' = A v + f(v + z) (+ drift). Strang splitting with
/// exact half-step diffusion and a nodewise implicit-midpoint reaction step;
/// the latter is a monotone scalar equation when (h/2) k < 1.
/// Throws StepSizeError otherwise and DomainError when z has fewer than 16 steps.
Path solve_salins(const SalinsProblem& problem, const SalinsOptions& options = {}, const DriftFn& drift = {});

/// sup over the time grid of |u(s) - z(s) - int_lambda^s S(s-r) F(u(r)) dr|_E,
/// with the integral evaluated by trapezoid-in-time exponential quadrature.
double mild_residual(const SalinsProblem& problem, const Path& u);

struct AprioriReport {
    double sup_u = 0.0;
    /// sup_s |F(z(s))|_E + sup_s |z(s)|_E.
    double forcing = 0.0;
    /// Measured c_T = sup_u / forcing (0 when both vanish).
    double ratio = 0.0;
    double residual = 0.0;
    bool violated = false;
};

/// Checks u against the a-priori bound sup|u| <= c_T (sup|F(z)| + sup|z|).
/// Throws NotASolutionError when the mild residual exceeds 1e-3.
AprioriReport apriori_check(const SalinsProblem& problem, const Path& u, double c_max = 10.0);

/// A random path sum_{k<=n_modes} a_k(s) e_k with smooth random a_k, sup-norm
/// normalized to `amplitude`.
Path random_forcing(const SpatialGrid& grid, double t_start, double t_end, int n_steps, int n_modes,
                    double amplitude, StreamKey key);

struct LipschitzPair {
    double ratio = 0.0;
    bool pass = false;
};

struct LipschitzReport {
    std::vector<LipschitzPair> pairs;
    double max_ratio = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct LipschitzProbeOptions {
    int n_pairs = 20;
    double perturbation_scale = 0.1;
    double forcing_amplitude = 1.0;
    int forcing_modes = 8;
    double slack = 0.05;
};

/// Draws forcing pairs on the window and time grid of `problem.z` (whose values are
/// ignored), measuring |M(z2) - M(z1)|_C(E) / |z2 - z1|_C(E) against
/// salins_lipschitz_bound(k, t - lambda) * (1 + slack).
LipschitzReport lipschitz_probe(const SalinsProblem& problem, const LipschitzProbeOptions& options, StreamKey key,
                                const SalinsOptions& solver = {});

}  // namespace spdelab
