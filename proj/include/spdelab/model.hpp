#pragma once

#include <string>

#include "spdelab/field.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/reaction.hpp"
#include "spdelab/semigroup.hpp"

namespace spdelab {

/// A point of E x R: the value of the observable g.
struct Observation {
    Field field;
    double scalar = 0.0;
};

inline Observation& operator+=(Observation& a, const Observation& b)
{
    a.field += b.field;
    a.scalar += b.scalar;
    return a;
}

inline Observation operator*(double w, const Observation& a) { return {w * a.field, w * a.scalar}; }

/// |(y, r)| = max(|y|_E, |r|).
double norm(const Observation& y);
double distance(const Observation& a, const Observation& b);

/// sigma(x, y, r)(xi) = s(x(xi), y(xi), r) from a three-argument catalog kernel.
struct SigmaSpec {
    enum class Kind { additive, multiplicative, feedback };

    Kind kind = Kind::feedback;
    double s0 = 1.0;
    double s1 = 0.5;
    double s2 = 0.5;

    /// additive: s0; multiplicative: s0 + s1 tanh(a); feedback: s0 + s1 tanh(b) + s2 tanh(r).
    double operator()(double a, double b, double r) const;

    /// True when sigma does not depend on the state (the stochastic convolution is then X-independent).
    bool state_independent() const;
    /// True when sigma reads the value-function argument (y, r).
    bool uses_feedback() const;
    /// Lipschitz constant of s in (a, b, r) with respect to the max-norm.
    double lipschitz() const;

    /// The nodewise multiplier field sigma(x, y, r). `y` may be empty when !uses_feedback().
    Field multiplier(const Eigen::Ref<const Field>& x, const Observation& y) const;
};

SigmaSpec::Kind parse_sigma_kind(const std::string& name);
std::string to_string(SigmaSpec::Kind kind);

/// g(x) = (g1(x(.)), g2(x)).
struct ObservableSpec {
    enum class Pointwise { identity, clip };
    enum class Functional { mean, sup };

    Pointwise g1 = Pointwise::identity;
    double clip_bound = 1.0;
    Functional g2 = Functional::mean;

    Observation operator()(const SpatialGrid& grid, const Eigen::Ref<const Field>& x) const;
    /// Both catalog members are 1-Lipschitz.
    double lipschitz() const { return 1.0; }
};

ObservableSpec::Pointwise parse_pointwise(const std::string& name);
ObservableSpec::Functional parse_functional(const std::string& name);
std::string to_string(ObservableSpec::Pointwise g1);
std::string to_string(ObservableSpec::Functional g2);

struct ModelSpec {
    ReactionSpec reaction = ReactionSpec::cubic();
    SigmaSpec sigma;
    ObservableSpec observable;
};

/// Everything a solver needs besides the run parameters.
struct Setup {
    HeatSemigroup semigroup;
    NoiseSpec noise;
    ModelSpec model;

    const SpatialGrid& grid() const { return semigroup.grid(); }

    /// Default grid, lambda_i = 1/i on every grid mode, cubic reaction, feedback sigma.
    static Setup make_default();
    /// f = 0, sigma = 1, lambda_i = 1/i on every grid mode.
    static Setup linear_additive(const SpatialGrid& grid);
};

/// Bound (k^+ w + 1) e^{k^+ w} + 1 on the Lipschitz constant of the solution map over a window of length w.
double salins_lipschitz_bound(double k, double window);

}  // namespace spdelab
