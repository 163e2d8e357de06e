#include "spdelab/field.hpp"

#include <string>

namespace spdelab {

SpatialGrid::SpatialGrid(int n_points, int n_modes)
    : n_points_(n_points), n_modes_(n_modes), spacing_(1.0 / (n_points + 1))
{
    if (n_points < 3) throw DomainError("grid needs at least 3 interior nodes");
    if (n_modes < 1 || n_modes > n_points)
        throw DomainError("n_modes must lie in [1, n_points], got " + std::to_string(n_modes));

    auto basis = std::make_shared<Eigen::MatrixXd>(n_points, n_modes);
    const double pi = std::numbers::pi;
    for (int k = 1; k <= n_modes; ++k)
        for (int j = 0; j < n_points; ++j)
            (*basis)(j, k - 1) = std::numbers::sqrt2 * std::sin(k * pi * node(j));
    basis_ = std::move(basis);
}

Eigen::VectorXd SpatialGrid::nodes() const
{
    return sample([](double xi) { return xi; });
}

Field SpatialGrid::eigenfunction(int k) const
{
    if (k < 1) throw DomainError("eigenfunction index starts at 1");
    if (k <= n_modes_) return basis_->col(k - 1);
    const double pi = std::numbers::pi;
    return sample([&](double xi) { return std::numbers::sqrt2 * std::sin(k * pi * xi); });
}

void SpatialGrid::check_field(const Eigen::Ref<const Field>& x) const
{
    if (x.size() != n_points_)
        throw DimensionError("field has " + std::to_string(x.size()) + " values, grid has " +
                             std::to_string(n_points_) + " nodes");
}

Spectrum SpatialGrid::to_spectral(const Eigen::Ref<const Field>& x) const
{
    check_field(x);
    return spacing_ * (basis_->transpose() * x);
}

Field SpatialGrid::from_spectral(const Eigen::Ref<const Spectrum>& c) const
{
    if (c.size() > n_modes_)
        throw DimensionError("got " + std::to_string(c.size()) + " coefficients for " +
                             std::to_string(n_modes_) + " modes");
    return basis_->leftCols(c.size()) * c;
}

double SpatialGrid::inner(const Eigen::Ref<const Field>& x, const Eigen::Ref<const Field>& y) const
{
    check_field(x);
    check_field(y);
    return spacing_ * x.dot(y);
}

Path::Path(double start, double end, int n_points, int n_steps)
    : t_start(start), t_end(end), values(Eigen::MatrixXd::Zero(n_points, n_steps + 1))
{
    if (!(end > start)) throw DomainError("path needs t_start < t_end");
    if (n_steps < 1) throw DomainError("path needs at least one time step");
}

bool Path::same_grid(const Path& other) const
{
    return n_points() == other.n_points() && n_steps() == other.n_steps() &&
           std::abs(t_start - other.t_start) <= 1e-12 && std::abs(t_end - other.t_end) <= 1e-12;
}

double sup_distance(const Path& a, const Path& b)
{
    if (!a.same_grid(b)) throw DimensionError("paths live on different grids");
    return sup_norm(a.values - b.values);
}

}  // namespace spdelab
