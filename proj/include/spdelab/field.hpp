#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>

#include "spdelab/errors.hpp"

namespace spdelab {

/// Node values of a continuous function on [0,1] that vanishes at both ends.
/// Only the interior nodes are stored; the boundary is implicitly zero.
using Field = Eigen::VectorXd;

/// Sine coefficients <x, e_k>_H, k = 1..len.
using Spectrum = Eigen::VectorXd;

/// Uniform grid on (0,1) with Dirichlet ends, together with the sampled
/// eigenbasis e_k(xi) = sqrt(2) sin(k pi xi) of the Dirichlet Laplacian.
///
/// Interior nodes are xi_j = j * spacing, j = 1..n_points, with
/// spacing = 1/(n_points+1). Spectral maps are a discrete sine transform,
/// which is exact on fields spanned by the first n_points modes.
class SpatialGrid {
public:
    SpatialGrid(int n_points = 127, int n_modes = 64);

    int n_points() const { return n_points_; }
    int n_modes() const { return n_modes_; }
    double spacing() const { return spacing_; }

    /// Position of interior node j (0-based).
    double node(int j) const { return (j + 1) * spacing_; }
    Eigen::VectorXd nodes() const;

    /// n_points x n_modes matrix with entries e_k(xi_j).
    const Eigen::MatrixXd& basis() const { return *basis_; }

    /// e_k sampled on the grid; any k >= 1 is allowed.
    Field eigenfunction(int k) const;

    /// Coefficients c_k = <x, e_k>_H for k = 1..n_modes (trapezoid rule).
    Spectrum to_spectral(const Eigen::Ref<const Field>& x) const;

    /// Sum_k c_k e_k on the nodes; c may be shorter than n_modes.
    Field from_spectral(const Eigen::Ref<const Spectrum>& c) const;

    /// Orthogonal projection onto the first n_modes eigenfunctions.
    Field project(const Eigen::Ref<const Field>& x) const { return from_spectral(to_spectral(x)); }

    /// <x, y>_H by the trapezoid rule with zero end values.
    double inner(const Eigen::Ref<const Field>& x, const Eigen::Ref<const Field>& y) const;

    /// Integral of x over (0,1).
    double integral(const Eigen::Ref<const Field>& x) const { return spacing_ * x.sum(); }

    /// Samples a scalar function at the interior nodes.
    template <typename Fn>
    Field sample(Fn&& fn) const
    {
        Field x(n_points_);
        for (int j = 0; j < n_points_; ++j) x[j] = fn(node(j));
        return x;
    }

    void check_field(const Eigen::Ref<const Field>& x) const;

    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b)
    {
        return a.n_points_ == b.n_points_ && a.n_modes_ == b.n_modes_;
    }

private:
    int n_points_;
    int n_modes_;
    double spacing_;
    std::shared_ptr<const Eigen::MatrixXd> basis_;
};

/// |x|_E: the largest absolute node value (the boundary contributes 0).
template <typename Derived>
typename Derived::Scalar sup_norm(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    return x.size() == 0 ? Scalar(0) : x.cwiseAbs().maxCoeff();
}

/// |x|_H, trapezoid approximation of (int_0^1 x^2)^{1/2}.
template <typename Derived>
typename Derived::Scalar l2_norm(const SpatialGrid& grid, const Eigen::MatrixBase<Derived>& x)
{
    using std::sqrt;
    return sqrt(typename Derived::Scalar(grid.spacing()) * x.squaredNorm());
}

/// One realization of a process on a uniform time grid over [t_start, t_end].
/// Column m of `values` is the field at time t_start + m*step().
struct Path {
    double t_start = 0.0;
    double t_end = 1.0;
    Eigen::MatrixXd values;

    Path() = default;
    Path(double start, double end, int n_points, int n_steps);

    int n_steps() const { return static_cast<int>(values.cols()) - 1; }
    int n_points() const { return static_cast<int>(values.rows()); }
    double step() const { return (t_end - t_start) / n_steps(); }
    double time(int m) const { return t_start + m * step(); }

    auto field(int m) { return values.col(m); }
    auto field(int m) const { return values.col(m); }
    auto terminal() const { return values.col(values.cols() - 1); }

    /// True when both paths live on the same time grid and spatial grid.
    bool same_grid(const Path& other) const;
};

/// sup over the time grid of |X(s)|_E, the norm of C([t_start,t_end]; E).
inline double sup_norm(const Path& path) { return sup_norm(path.values); }

/// sup over the time grid of |X1(s) - X2(s)|_E.
double sup_distance(const Path& a, const Path& b);

/// Builds a path by evaluating fn(s) -> Field at every time node.
template <typename Fn>
Path make_path(double t_start, double t_end, int n_points, int n_steps, Fn&& fn)
{
    Path p(t_start, t_end, n_points, n_steps);
    for (int m = 0; m <= n_steps; ++m) p.field(m) = fn(p.time(m));
    return p;
}

}  // namespace spdelab
