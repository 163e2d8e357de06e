#include "spdelab/semigroup.hpp"

#include <algorithm>
#include <string>

namespace spdelab {

namespace {

Eigen::VectorXd dirichlet_eigenvalues(int n_modes)
{
    Eigen::VectorXd alpha(n_modes);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int k = 1; k <= n_modes; ++k) alpha[k - 1] = 0.5 * k * k * pi2;
    return alpha;
}

// (1 - e^{-a d}) / a, continuous at a = 0.
double decay_integral(double a, double d)
{
    return a * d < 1e-8 ? d * (1.0 - 0.5 * a * d) : -std::expm1(-a * d) / a;
}

}  // namespace

HeatSemigroup::HeatSemigroup(SpatialGrid grid)
    : HeatSemigroup(grid, dirichlet_eigenvalues(grid.n_modes()))
{}

HeatSemigroup::HeatSemigroup(SpatialGrid grid, Eigen::VectorXd eigenvalues)
    : grid_(std::move(grid)), alpha_(std::move(eigenvalues))
{
    if (alpha_.size() != grid_.n_modes()) throw DimensionError("need one eigenvalue per grid mode");
    if (alpha_[0] <= 0) throw DomainError("eigenvalues must be positive");
    for (int k = 1; k < alpha_.size(); ++k)
        if (!(alpha_[k] > alpha_[k - 1])) throw DomainError("eigenvalues must be strictly increasing");
}

Eigen::VectorXd HeatSemigroup::decay(double s) const
{
    if (s < 0) throw DomainError("semigroup time must be non-negative");
    return (-s * alpha_).array().exp();
}

Field HeatSemigroup::apply(double s, const Eigen::Ref<const Field>& x) const
{
    if (s < 0) throw DomainError("semigroup time must be non-negative");
    grid_.check_field(x);
    if (s == 0) return x;
    return grid_.from_spectral(decay(s).cwiseProduct(grid_.to_spectral(x)));
}

Field HeatSemigroup::kernel(double s, int node) const
{
    if (!(s > 0)) throw DomainError("heat kernel needs s > 0");
    if (node < 0 || node >= grid_.n_points()) throw DomainError("node index out of range");
    const Eigen::VectorXd weights = decay(s).cwiseProduct(grid_.basis().row(node).transpose());
    return grid_.from_spectral(weights);
}

Field HeatSemigroup::convolve(const Path& h, double lambda, double s) const
{
    const double tol = 1e-12 * std::max(1.0, std::abs(h.t_end));
    if (lambda < h.t_start - tol || s > h.t_end + tol || lambda > s + tol)
        throw DomainError("convolution window [" + std::to_string(lambda) + ", " + std::to_string(s) +
                          "] is outside the path's time range");
    if (h.n_points() != grid_.n_points()) throw DimensionError("path does not match grid");

    Spectrum acc = Spectrum::Zero(grid_.n_modes());
    for (int m = 0; m < h.n_steps(); ++m) {
        const double a = std::max(h.time(m), lambda);
        const double b = std::min(h.time(m + 1), s);
        if (b - a <= tol) continue;
        const Spectrum c = grid_.to_spectral(h.field(m));
        for (int k = 0; k < grid_.n_modes(); ++k)
            acc[k] += c[k] * decay_integral(alpha_[k], b - a) * std::exp(-alpha_[k] * (s - b));
    }
    return grid_.from_spectral(acc);
}

Path HeatSemigroup::convolve_path(const Path& h) const
{
    if (h.n_points() != grid_.n_points()) throw DimensionError("path does not match grid");
    const double dt = h.step();
    const Eigen::VectorXd step_decay = decay(dt);
    Eigen::VectorXd weight(grid_.n_modes());
    for (int k = 0; k < grid_.n_modes(); ++k) weight[k] = decay_integral(alpha_[k], dt);

    Path out(h.t_start, h.t_end, h.n_points(), h.n_steps());
    Spectrum acc = Spectrum::Zero(grid_.n_modes());
    for (int m = 0; m < h.n_steps(); ++m) {
        acc = step_decay.cwiseProduct(acc) + weight.cwiseProduct(grid_.to_spectral(h.field(m)));
        out.field(m + 1) = grid_.from_spectral(acc);
    }
    return out;
}

}  // namespace spdelab
