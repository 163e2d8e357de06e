#pragma once

#include <functional>
#include <string>

#include "spdelab/field.hpp"

namespace spdelab {

using ScalarFn = std::function<double(double)>;

/// A continuous reaction f with a one-sided bound
/// f(u2) - f(u1) <= k (u2 - u1) for u1 <= u2. No growth bound is assumed.
struct ReactionSpec {
    std::string name;
    ScalarFn f;
    /// Optional derivative, used only to accelerate root finding.
    ScalarFn df;
    double k = 0.0;

    double operator()(double u) const { return f(u); }

    /// f(u) = -u^3 + k u.
    static ReactionSpec cubic(double k = 1.0);
    /// f(u) = a u, with one-sided constant a.
    static ReactionSpec linear(double a);
    static ReactionSpec zero();
    /// f(u) = 1 - e^u, k = 0: unbounded superlinear decay for u > 0.
    static ReactionSpec exp_down();

    /// Catalog lookup. For `cubic` `k` is the linear coefficient (1 when not
    /// finite); for `linear` `param` is the slope. For the other members a
    /// finite `k` replaces the catalog constant as declared, so that validation
    /// can reject it.
    static ReactionSpec from_catalog(const std::string& name, double k, double param);
};

struct DissipativityReport {
    bool pass = false;
    /// max over probe pairs of (f(u2)-f(u1))/(u2-u1) - k.
    double worst_violation = 0.0;
    double max_quotient = 0.0;
};

/// Scans all ordered pairs of an n_probe-point uniform grid on [-R, R].
DissipativityReport check_dissipativity(const ScalarFn& f, double k, double R, int n_probe = 401);

/// Solves g(x) = target for strictly increasing continuous g. The root is
/// bracketed by doubling outward from [guess - w, guess + w], w = |g(guess)-target| + 1,
/// then refined by Illinois-type false position with bisection fallback until
/// |g(x) - target| <= tol or the bracket collapses to rounding level.
/// `dg`, if given, enables Newton steps inside the bracket.
double monotone_solve(const ScalarFn& g, double target, double guess, double tol = 1e-12,
                      const ScalarFn& dg = {});

/// The resolvent (I - phi/n)^{-1}(u) with phi = f - k id: the unique w with w - phi(w)/n = u.
double yosida_resolvent(const ReactionSpec& spec, int n, double u);

/// f_n(u) = n (resolvent(u) - u) + k u.
double yosida_f_n(const ReactionSpec& spec, int n, double u);

/// The Lipschitz reaction f_n packaged as a ReactionSpec with the same k.
ReactionSpec yosida_approximation(const ReactionSpec& spec, int n);

/// Nemytskii map F(x)(xi) = f(x(xi)).
Field apply_F(const ReactionSpec& spec, const Eigen::Ref<const Field>& x);

}  // namespace spdelab
