#include "spdelab/reaction.hpp"

#include "spdelab/errors.hpp"

#include <cmath>
#include <limits>

namespace spdelab {

ReactionSpec ReactionSpec::cubic(double k)
{
    return {"cubic", [k](double u) { return -u * u * u + k * u; },
            [k](double u) { return -3.0 * u * u + k; }, k};
}

ReactionSpec ReactionSpec::linear(double a)
{
    return {"linear", [a](double u) { return a * u; }, [a](double) { return a; }, a};
}

ReactionSpec ReactionSpec::zero()
{
    return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0};
}

ReactionSpec ReactionSpec::exp_down()
{
    return {"exp_down", [](double u) { return -std::expm1(u); }, [](double u) { return -std::exp(u); }, 0.0};
}

ReactionSpec ReactionSpec::from_catalog(const std::string& name, double k, double param)
{
    if (name == "cubic") return cubic(std::isfinite(k) ? k : 1.0);
    ReactionSpec spec;
    if (name == "linear")
        spec = linear(param);
    else if (name == "zero")
        spec = zero();
    else if (name == "exp_down")
        spec = exp_down();
    else
        throw DomainError("unknown reaction '" + name + "' (expected cubic, linear, zero or exp_down)");
    if (std::isfinite(k)) spec.k = k;
    return spec;
}

DissipativityReport check_dissipativity(const ScalarFn& f, double k, double R, int n_probe)
{
    if (!(R > 0)) throw DomainError("probe range must be positive");
    if (n_probe < 100) throw DomainError("need at least 100 probe points");

    std::vector<double> u(n_probe), fu(n_probe);
    for (int i = 0; i < n_probe; ++i) {
        u[i] = -R + 2.0 * R * i / (n_probe - 1);
        fu[i] = f(u[i]);
    }

    DissipativityReport report;
    report.max_quotient = -std::numeric_limits<double>::infinity();
    bool finite = true;
    for (int i = 0; i < n_probe; ++i) {
        if (!std::isfinite(fu[i])) finite = false;
        for (int j = i + 1; j < n_probe; ++j)
            report.max_quotient = std::max(report.max_quotient, (fu[j] - fu[i]) / (u[j] - u[i]));
    }
    report.worst_violation = report.max_quotient - k;
    // Difference quotients of exact one-sided functions may overshoot k by rounding.
    double scale = 0.0;
    for (double v : fu) scale = std::max(scale, std::abs(v));
    const double slack = 64 * std::numeric_limits<double>::epsilon() * (scale + 1.0) * (n_probe - 1) / (2 * R);
    report.pass = finite && report.worst_violation <= slack;
    return report;
}

double monotone_solve(const ScalarFn& g, double target, double guess, double tol, const ScalarFn& dg)
{
    auto residual = [&](double x) { return g(x) - target; };

    double r0 = residual(guess);
    if (r0 == 0.0) return guess;
    if (!std::isfinite(r0)) throw ResolventError("equation residual is not finite at the initial guess");

    // Bracket [lo, hi] with residual(lo) < 0 < residual(hi).
    double width = std::abs(r0) + 1.0;
    double lo = guess, hi = guess, rlo = r0, rhi = r0;
    constexpr int max_expansions = 200;
    if (r0 > 0) {
        for (int i = 0; rlo > 0; ++i) {
            if (i == max_expansions) throw ResolventError("could not bracket the root from below");
            hi = lo;
            rhi = rlo;
            lo = guess - width;
            rlo = residual(lo);
            if (std::isnan(rlo)) throw ResolventError("equation residual is NaN while bracketing");
            width *= 2;
        }
    } else {
        for (int i = 0; rhi < 0; ++i) {
            if (i == max_expansions) throw ResolventError("could not bracket the root from above");
            lo = hi;
            rlo = rhi;
            hi = guess + width;
            rhi = residual(hi);
            if (std::isnan(rhi)) throw ResolventError("equation residual is NaN while bracketing");
            width *= 2;
        }
    }
    if (rlo == 0.0) return lo;
    if (rhi == 0.0) return hi;

    double x = std::abs(r0) < std::min(-rlo, rhi) ? guess : 0.5 * (lo + hi);
    double rx = x == guess ? r0 : residual(x);
    int side = 0;
    for (int iter = 0; iter < 400; ++iter) {
        if (std::abs(rx) <= tol) return x;
        if (rx < 0) {
            lo = x;
            rlo = rx;
            if (side == -1) rhi *= 0.5;
            side = -1;
        } else {
            hi = x;
            rhi = rx;
            if (side == 1) rlo *= 0.5;
            side = 1;
        }
        if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
            return std::abs(rlo) < std::abs(rhi) ? lo : hi;

        double next = std::numeric_limits<double>::quiet_NaN();
        if (dg) {
            const double slope = dg(x);
            if (slope > 0) next = x - rx / slope;
        }
        if (!(next > lo && next < hi)) next = lo - rlo * (hi - lo) / (rhi - rlo);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
        rx = residual(x);
    }
    return x;
}

double yosida_resolvent(const ReactionSpec& spec, int n, double u)
{
    if (n < 1) throw DomainError("Yosida index must be >= 1");
    const double k = spec.k;
    const double inv_n = 1.0 / n;
    auto g = [&](double w) { return w - (spec.f(w) - k * w) * inv_n; };
    ScalarFn dg;
    if (spec.df) dg = [&](double w) { return 1.0 - (spec.df(w) - k) * inv_n; };
    return monotone_solve(g, u, u, 1e-12, dg);
}

double yosida_f_n(const ReactionSpec& spec, int n, double u)
{
    return n * (yosida_resolvent(spec, n, u) - u) + spec.k * u;
}

ReactionSpec yosida_approximation(const ReactionSpec& spec, int n)
{
    ReactionSpec approx;
    approx.name = spec.name + "_yosida" + std::to_string(n);
    approx.k = spec.k;
    approx.f = [spec, n](double u) { return yosida_f_n(spec, n, u); };
    return approx;
}

Field apply_F(const ReactionSpec& spec, const Eigen::Ref<const Field>& x)
{
    return x.unaryExpr([&](double u) { return spec.f(u); });
}

}  // namespace spdelab
