#pragma once

#include "spdelab/field.hpp"

namespace spdelab {

/// The semigroup S(s) = exp(sA) generated by A = (1/2) d^2/dxi^2 with
/// Dirichlet ends, acting diagonally on the sine basis: A e_k = -alpha_k e_k.
///
/// Every action is spectral (exact per mode) and therefore projects onto the
/// grid's first n_modes eigenfunctions; only s = 0 returns its input untouched.
class HeatSemigroup {
public:
    /// alpha_k = k^2 pi^2 / 2.
    explicit HeatSemigroup(SpatialGrid grid);

    /// User-supplied eigenvalues (one per grid mode, strictly increasing, positive).
    HeatSemigroup(SpatialGrid grid, Eigen::VectorXd eigenvalues);

    const SpatialGrid& grid() const { return grid_; }
    const Eigen::VectorXd& eigenvalues() const { return alpha_; }

    /// Per-mode factors exp(-alpha_k s).
    Eigen::VectorXd decay(double s) const;

    Field apply(double s, const Eigen::Ref<const Field>& x) const;

    /// The kernel K(s, xi_node, .) of S(s) from its truncated eigen-expansion.
    Field kernel(double s, int node) const;

    /// Approximates int_lambda^s S(s-r) h(r) dr, with h frozen at the left end of
    /// each step of its time grid and integrated exactly against the decay:
    /// per mode, c_k(r_m) (1 - e^{-alpha_k dr}) / alpha_k e^{-alpha_k (s - r_{m+1})}.
    Field convolve(const Path& h, double lambda, double s) const;

    /// The same quadrature evaluated at every node of h's time grid, starting at h.t_start.
    Path convolve_path(const Path& h) const;

private:
    SpatialGrid grid_;
    Eigen::VectorXd alpha_;
};

}  // namespace spdelab
