#include "spdelab/control.hpp"

#include "spdelab/errors.hpp"

#include <cmath>
#include <string>

namespace spdelab {

Control::Control(double start, double end, int n_ctrl, int n_steps)
    : t_start(start), t_end(end), phi(Eigen::MatrixXd::Zero(n_ctrl, n_steps))
{
    if (!(end > start)) throw DomainError("control window must have positive length");
    if (n_ctrl < 1 || n_steps < 1) throw DomainError("control needs at least one mode and one step");
}

Spectrum Control::h_coefficients(const NoiseSpec& noise, int m) const
{
    if (n_ctrl() > noise.n_modes()) throw DimensionError("control has more modes than the noise");
    return noise.lambdas.head(n_ctrl()).cwiseSqrt().cwiseProduct(phi.col(m));
}

Field Control::field(const SpatialGrid& grid, const NoiseSpec& noise, int m) const
{
    if (n_ctrl() > grid.n_modes()) throw DimensionError("control has more modes than the grid");
    return grid.from_spectral(h_coefficients(noise, m));
}

void Control::validate(const NoiseSpec& noise) const
{
    if (n_ctrl() > noise.n_modes()) throw DimensionError("control has more modes than the noise");
    if (!phi.allFinite()) throw DomainError("control coefficients must be finite");
    for (int i = 0; i < n_ctrl(); ++i)
        if (noise.lambdas[i] == 0.0 && phi.row(i).cwiseAbs().maxCoeff() > 0)
            throw NotInH0Error("control acts on noise mode " + std::to_string(i + 1) + ", which has lambda = 0");
    if (!in_ball())
        throw DomainError("control energy " + std::to_string(std::sqrt(energy())) + " exceeds the bound M = " +
                          std::to_string(bound));
}

Control constant_control(const NoiseSpec& noise, const Eigen::Ref<const Spectrum>& h_coefficients, double t_start,
                         double t_end, int n_steps)
{
    const int n = static_cast<int>(h_coefficients.size());
    if (n > noise.n_modes()) throw DimensionError("control has more modes than the noise");
    Control c(t_start, t_end, n, n_steps);
    for (int i = 0; i < n; ++i) {
        if (h_coefficients[i] == 0.0) continue;
        if (noise.lambdas[i] == 0.0)
            throw NotInH0Error("coefficient on noise mode " + std::to_string(i + 1) + ", which has lambda = 0");
        c.phi.row(i).setConstant(h_coefficients[i] / std::sqrt(noise.lambdas[i]));
    }
    return c;
}

}  // namespace spdelab
