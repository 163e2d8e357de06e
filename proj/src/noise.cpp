#include "spdelab/noise.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace spdelab {

NoiseSpec NoiseSpec::with_decay(Decay decay, int n_modes)
{
    if (n_modes < 1) throw DomainError("noise needs at least one mode");
    NoiseSpec spec;
    spec.lambdas.resize(n_modes);
    for (int i = 1; i <= n_modes; ++i) {
        switch (decay) {
        case Decay::constant: spec.lambdas[i - 1] = 1.0; break;
        case Decay::inverse: spec.lambdas[i - 1] = 1.0 / i; break;
        case Decay::inverse_square: spec.lambdas[i - 1] = 1.0 / (double(i) * i); break;
        }
    }
    return spec;
}

void NoiseSpec::validate() const
{
    if (lambdas.size() == 0) throw DomainError("noise needs at least one mode");
    for (int i = 0; i < lambdas.size(); ++i)
        if (!(lambdas[i] >= 0) || !std::isfinite(lambdas[i]))
            throw DomainError("noise eigenvalue lambda_" + std::to_string(i + 1) + " must be finite and >= 0");
}

NoiseSpec::Decay parse_decay(const std::string& name)
{
    if (name == "const") return NoiseSpec::Decay::constant;
    if (name == "inv") return NoiseSpec::Decay::inverse;
    if (name == "inv_sq") return NoiseSpec::Decay::inverse_square;
    throw DomainError("unknown noise decay '" + name + "' (expected const, inv or inv_sq)");
}

std::string to_string(NoiseSpec::Decay decay)
{
    switch (decay) {
    case NoiseSpec::Decay::constant: return "const";
    case NoiseSpec::Decay::inverse: return "inv";
    case NoiseSpec::Decay::inverse_square: return "inv_sq";
    }
    return "?";
}

TailModel TailModel::from(NoiseSpec::Decay decay)
{
    switch (decay) {
    case NoiseSpec::Decay::constant: return {1.0, 0.0};
    case NoiseSpec::Decay::inverse: return {1.0, 1.0};
    case NoiseSpec::Decay::inverse_square: return {1.0, 2.0};
    }
    return {};
}

HypothesisReport validate_hypothesis(const NoiseSpec& spec, int d, const TailModel& tail)
{
    if (d < 1) throw DomainError("spatial dimension must be >= 1");
    spec.validate();

    HypothesisReport report;
    std::ostringstream detail;
    if (!(tail.scale >= 0) || !std::isfinite(tail.scale)) {
        report.detail = "H3: tail scale must be finite and non-negative";
        return report;
    }

    if (d == 1) {
        const bool bounded = tail.scale == 0.0 || tail.exponent >= 0.0;
        report.pass = bounded;
        detail << "H3 (d=1): sup lambda_i " << (bounded ? "is finite" : "is infinite (growing tail)");
        report.detail = detail.str();
        return report;
    }

    const double theta = spec.theta;
    if (d == 2) {
        detail << "H3 (d=2): any finite theta is admissible (limit of d/(d-2) is infinite); ";
    } else {
        const double limit = double(d) / (d - 2);
        if (!(theta < limit)) {
            detail << "H3 (d=" << d << "): theta=" << theta << " must be < d/(d-2)=" << limit;
            report.detail = detail.str();
            return report;
        }
    }

    // sum_i lambda_i^theta |e_i|_inf^2 with |e_i|_inf^2 = 2: converges iff the tail decays
    // faster than i^{-1/theta}.
    const bool summable = tail.scale == 0.0 || tail.exponent * theta > 1.0;
    double sum = 0.0;
    constexpr int n_partial = 100000;
    for (int i = 1; i <= n_partial; ++i) {
        const double lambda =
            i <= spec.n_modes() ? spec.lambdas[i - 1] : tail.scale * std::pow(double(i), -tail.exponent);
        sum += std::pow(lambda, theta) * 2.0;
    }
    report.partial_sum = sum;
    report.pass = summable;
    detail << "sum lambda_i^theta |e_i|^2 " << (summable ? "converges" : "diverges") << " (partial sum to "
           << n_partial << " = " << sum << ")";
    report.detail = detail.str();
    return report;
}

NoiseIncrement sample_increment(const NoiseSpec& spec, double h, CounterRng& rng)
{
    if (!(h > 0)) throw DomainError("increment step must be positive");
    NoiseIncrement inc{Eigen::VectorXd(spec.n_modes()), h};
    for (int i = 0; i < spec.n_modes(); ++i) inc.dW[i] = std::sqrt(spec.lambdas[i] * h) * rng.normal();
    return inc;
}

double h0_norm(const Eigen::Ref<const Spectrum>& coefficients, const NoiseSpec& spec)
{
    double sum = 0.0;
    for (int i = 0; i < coefficients.size(); ++i) {
        const double c = coefficients[i];
        if (c == 0.0) continue;
        const double lambda = i < spec.n_modes() ? spec.lambdas[i] : 0.0;
        if (lambda == 0.0)
            throw NotInH0Error("coefficient on mode " + std::to_string(i + 1) + " has no noise variance");
        sum += c * c / lambda;
    }
    return std::sqrt(sum);
}

Eigen::VectorXd NoiseRealization::increment(const NoiseSpec& spec, int m) const
{
    return spec.lambdas.array().sqrt().matrix().cwiseProduct(beta.col(m));
}

NoiseRealization make_realization(const NoiseSpec& spec, int n_steps, double h, StreamKey key)
{
    if (!(h > 0)) throw DomainError("increment step must be positive");
    NoiseRealization r{Eigen::MatrixXd(spec.n_modes(), n_steps), h};
    const double sd = std::sqrt(h);
    for (int m = 0; m < n_steps; ++m) {
        CounterRng rng(key, static_cast<std::uint64_t>(m));
        for (int i = 0; i < spec.n_modes(); ++i) r.beta(i, m) = sd * rng.normal();
    }
    return r;
}

NoiseRealization zero_realization(const NoiseSpec& spec, int n_steps, double h)
{
    return {Eigen::MatrixXd::Zero(spec.n_modes(), n_steps), h};
}

}  // namespace spdelab
