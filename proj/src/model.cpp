#include "spdelab/model.hpp"

#include <algorithm>
#include <cmath>

namespace spdelab {

double norm(const Observation& y)
{
    return std::max(sup_norm(y.field), std::abs(y.scalar));
}

double distance(const Observation& a, const Observation& b)
{
    if (a.field.size() != b.field.size()) throw DimensionError("observations live on different grids");
    return std::max(sup_norm(a.field - b.field), std::abs(a.scalar - b.scalar));
}

double SigmaSpec::operator()(double a, double b, double r) const
{
    switch (kind) {
    case Kind::additive: return s0;
    case Kind::multiplicative: return s0 + s1 * std::tanh(a);
    case Kind::feedback: return s0 + s1 * std::tanh(b) + s2 * std::tanh(r);
    }
    return s0;
}

bool SigmaSpec::state_independent() const
{
    switch (kind) {
    case Kind::additive: return true;
    case Kind::multiplicative: return s1 == 0.0;
    case Kind::feedback: return s1 == 0.0 && s2 == 0.0;
    }
    return true;
}

bool SigmaSpec::uses_feedback() const
{
    return kind == Kind::feedback && !state_independent();
}

double SigmaSpec::lipschitz() const
{
    switch (kind) {
    case Kind::additive: return 0.0;
    case Kind::multiplicative: return std::abs(s1);
    case Kind::feedback: return std::abs(s1) + std::abs(s2);
    }
    return 0.0;
}

Field SigmaSpec::multiplier(const Eigen::Ref<const Field>& x, const Observation& y) const
{
    Field out(x.size());
    if (uses_feedback()) {
        if (y.field.size() != x.size()) throw DimensionError("feedback value does not match the state grid");
        for (Eigen::Index j = 0; j < x.size(); ++j) out[j] = (*this)(x[j], y.field[j], y.scalar);
    } else {
        for (Eigen::Index j = 0; j < x.size(); ++j) out[j] = (*this)(x[j], 0.0, 0.0);
    }
    return out;
}

SigmaSpec::Kind parse_sigma_kind(const std::string& name)
{
    if (name == "additive") return SigmaSpec::Kind::additive;
    if (name == "multiplicative") return SigmaSpec::Kind::multiplicative;
    if (name == "feedback") return SigmaSpec::Kind::feedback;
    throw DomainError("unknown sigma kind '" + name + "' (expected additive, multiplicative or feedback)");
}

std::string to_string(SigmaSpec::Kind kind)
{
    switch (kind) {
    case SigmaSpec::Kind::additive: return "additive";
    case SigmaSpec::Kind::multiplicative: return "multiplicative";
    case SigmaSpec::Kind::feedback: return "feedback";
    }
    return "additive";
}

Observation ObservableSpec::operator()(const SpatialGrid& grid, const Eigen::Ref<const Field>& x) const
{
    Observation y;
    if (g1 == Pointwise::identity)
        y.field = x;
    else
        y.field = x.cwiseMax(-clip_bound).cwiseMin(clip_bound);
    y.scalar = g2 == Functional::mean ? grid.integral(x) : sup_norm(x);
    return y;
}

ObservableSpec::Pointwise parse_pointwise(const std::string& name)
{
    if (name == "identity") return ObservableSpec::Pointwise::identity;
    if (name == "clip") return ObservableSpec::Pointwise::clip;
    throw DomainError("unknown observable g1 '" + name + "' (expected identity or clip)");
}

ObservableSpec::Functional parse_functional(const std::string& name)
{
    if (name == "mean") return ObservableSpec::Functional::mean;
    if (name == "sup") return ObservableSpec::Functional::sup;
    throw DomainError("unknown observable g2 '" + name + "' (expected mean or sup)");
}

std::string to_string(ObservableSpec::Pointwise g1)
{
    return g1 == ObservableSpec::Pointwise::identity ? "identity" : "clip";
}

std::string to_string(ObservableSpec::Functional g2)
{
    return g2 == ObservableSpec::Functional::mean ? "mean" : "sup";
}

Setup Setup::make_default()
{
    SpatialGrid grid;
    return {HeatSemigroup(grid), NoiseSpec::with_decay(NoiseSpec::Decay::inverse, grid.n_modes()), ModelSpec{}};
}

Setup Setup::linear_additive(const SpatialGrid& grid)
{
    ModelSpec model;
    model.reaction = ReactionSpec::zero();
    model.sigma = {SigmaSpec::Kind::additive, 1.0, 0.0, 0.0};
    return {HeatSemigroup(grid), NoiseSpec::with_decay(NoiseSpec::Decay::inverse, grid.n_modes()), model};
}

double salins_lipschitz_bound(double k, double window)
{
    const double kw = std::max(k, 0.0) * window;
    return (kw + 1.0) * std::exp(kw) + 1.0;
}

}  // namespace spdelab
