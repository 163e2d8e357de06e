#pragma once

#include <limits>

#include "spdelab/field.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {

/// A piecewise-constant control phi: [t_start, t_end] -> H0 on a uniform time grid.
/// Column m of `phi` holds the coordinates of phi(s_m) in the orthonormal basis
/// sqrt(lambda_i) e_i of H0, for the leading n_ctrl noise modes, so that
/// |phi(s_m)|_{H0} is the Euclidean norm of the column and the H-coefficients are
/// sqrt(lambda_i) phi_i.
struct Control {
    double t_start = 0.0;
    double t_end = 1.0;
    Eigen::MatrixXd phi;
    /// The radius M of the ball Lambda_{t,M}.
    double bound = std::numeric_limits<double>::infinity();

    Control() = default;
    Control(double start, double end, int n_ctrl, int n_steps);

    int n_ctrl() const { return static_cast<int>(phi.rows()); }
    int n_steps() const { return static_cast<int>(phi.cols()); }
    double step() const { return (t_end - t_start) / n_steps(); }

    /// int |phi(s)|_{H0}^2 ds.
    double energy() const { return step() * phi.squaredNorm(); }
    /// (1/2) int |phi(s)|_{H0}^2 ds.
    double cost() const { return 0.5 * energy(); }
    bool in_ball() const { return energy() <= bound * bound * (1.0 + 1e-12); }

    /// H-coefficients <phi(s_m), e_i>, i = 1..n_ctrl.
    Spectrum h_coefficients(const NoiseSpec& noise, int m) const;
    /// phi(s_m) as a field on the grid.
    Field field(const SpatialGrid& grid, const NoiseSpec& noise, int m) const;

    /// Checks the mode count against the noise, rejects energy on modes with
    /// lambda_i = 0 (NotInH0Error) and enforces the ball bound (DomainError).
    void validate(const NoiseSpec& noise) const;
};

/// The H0-orthonormal coordinates of a constant-in-time H-coefficient vector.
Control constant_control(const NoiseSpec& noise, const Eigen::Ref<const Spectrum>& h_coefficients, double t_start,
                         double t_end, int n_steps);

}  // namespace spdelab
