#include "spdelab/salins.hpp"

#include "spdelab/errors.hpp"
#include "spdelab/model.hpp"
#include "spdelab/parallel.hpp"

#include <cmath>
#include <string>

namespace spdelab {

Path solve_salins(const SalinsProblem& problem, const SalinsOptions& options, const DriftFn& drift)
{
    const Path& z = problem.z;
    const HeatSemigroup& S = problem.semigroup;
    S.grid().check_field(z.field(0));
    if (z.n_steps() < 16) throw DomainError("the solution map needs at least 16 time steps");

    // With f = 0 the map is the identity and every step would reproduce z.
    if (problem.reaction.name == "zero" && !drift) return z;

    const ReactionSpec reaction =
        options.scheme == SalinsScheme::yosida ? yosida_approximation(problem.reaction, options.yosida_n)
                                               : problem.reaction;
    const double h = z.step();
    if (0.5 * h * reaction.k >= 1.0) {
        const double suggested = 1.0 / reaction.k;
        throw StepSizeError("implicit reaction step is ill-posed: (h/2) k = " + std::to_string(0.5 * h * reaction.k) +
                                " >= 1; use h < " + std::to_string(2.0 / reaction.k),
                            suggested);
    }

    const Eigen::VectorXd half = S.decay(0.5 * h);
    const SpatialGrid& grid = S.grid();
    const double hh = 0.5 * h;
    auto g = [&](double q) { return q - hh * reaction.f(q); };
    ScalarFn dg;
    if (reaction.df) dg = [&](double q) { return 1.0 - hh * reaction.df(q); };

    Path u(z.t_start, z.t_end, z.n_points(), z.n_steps());
    u.field(0) = z.field(0);
    Field v = Field::Zero(z.n_points());
    Field zmid(z.n_points());
    for (int m = 0; m < z.n_steps(); ++m) {
        Field d;
        if (drift) d = drift(m, Field(u.field(m)));
        v = grid.from_spectral(half.cwiseProduct(grid.to_spectral(v)));
        zmid = 0.5 * (z.field(m) + z.field(m + 1));
        for (int j = 0; j < v.size(); ++j) {
            double rhs = v[j] + zmid[j];
            if (d.size() != 0) rhs += hh * d[j];
            const double q = monotone_solve(g, rhs, rhs, 1e-12, dg);
            v[j] = 2.0 * (q - zmid[j]) - v[j];
        }
        v = grid.from_spectral(half.cwiseProduct(grid.to_spectral(v)));
        u.field(m + 1) = v + z.field(m + 1);
    }
    return u;
}

double mild_residual(const SalinsProblem& problem, const Path& u)
{
    if (!u.same_grid(problem.z)) throw DimensionError("solution and forcing live on different grids");
    // Averaging F over each step turns the left-point quadrature into a trapezoid rule.
    Path Fu(u.t_start, u.t_end, u.n_points(), u.n_steps());
    Field prev = apply_F(problem.reaction, u.field(0));
    for (int m = 0; m < u.n_steps(); ++m) {
        Field next = apply_F(problem.reaction, u.field(m + 1));
        Fu.field(m) = 0.5 * (prev + next);
        prev = std::move(next);
    }
    Fu.field(u.n_steps()) = prev;

    const Path conv = problem.semigroup.convolve_path(Fu);
    return sup_norm((u.values - problem.z.values - conv.values).eval());
}

AprioriReport apriori_check(const SalinsProblem& problem, const Path& u, double c_max)
{
    AprioriReport report;
    report.residual = mild_residual(problem, u);
    if (report.residual > 1e-3)
        throw NotASolutionError("path does not solve the mild equation: residual " + std::to_string(report.residual));
    report.sup_u = sup_norm(u);
    double sup_F = 0.0;
    for (int m = 0; m <= problem.z.n_steps(); ++m)
        sup_F = std::max(sup_F, sup_norm(apply_F(problem.reaction, problem.z.field(m))));
    report.forcing = sup_F + sup_norm(problem.z);
    if (report.forcing > 0)
        report.ratio = report.sup_u / report.forcing;
    else
        report.ratio = report.sup_u > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    report.violated = report.ratio > c_max;
    return report;
}

Path random_forcing(const SpatialGrid& grid, double t_start, double t_end, int n_steps, int n_modes,
                    double amplitude, StreamKey key)
{
    if (n_modes > grid.n_modes()) throw DimensionError("forcing has more modes than the grid");
    CounterRng rng(key, 0);
    Eigen::VectorXd a(n_modes), b(n_modes), w(n_modes), p(n_modes);
    for (int k = 0; k < n_modes; ++k) {
        a[k] = rng.normal() / (k + 1);
        b[k] = rng.normal() / (k + 1);
        w[k] = 2.0 * std::numbers::pi * (0.5 + 2.0 * rng.uniform()) / (t_end - t_start);
        p[k] = 2.0 * std::numbers::pi * rng.uniform();
    }
    Path z = make_path(t_start, t_end, grid.n_points(), n_steps, [&](double s) {
        const double tau = s - t_start;
        Spectrum c(n_modes);
        for (int k = 0; k < n_modes; ++k) c[k] = a[k] + b[k] * std::sin(w[k] * tau + p[k]);
        return grid.from_spectral(c);
    });
    const double sup = sup_norm(z);
    if (sup > 0) z.values *= amplitude / sup;
    return z;
}

LipschitzReport lipschitz_probe(const SalinsProblem& problem, const LipschitzProbeOptions& options, StreamKey key,
                                const SalinsOptions& solver)
{
    if (options.n_pairs < 10) throw DomainError("the Lipschitz probe needs at least 10 pairs");
    const SpatialGrid& grid = problem.semigroup.grid();
    const Path& tmpl = problem.z;

    LipschitzReport report;
    report.bound = salins_lipschitz_bound(problem.reaction.k, tmpl.t_end - tmpl.t_start);
    const double limit = report.bound * (1.0 + options.slack);
    report.pairs.resize(options.n_pairs);

    parallel_for(options.n_pairs, [&](int i) {
        const StreamKey pair_key = key.child(i);
        SalinsProblem p1 = problem;
        p1.z = random_forcing(grid, tmpl.t_start, tmpl.t_end, tmpl.n_steps(), options.forcing_modes,
                              options.forcing_amplitude, pair_key.child(0));
        SalinsProblem p2 = p1;
        p2.z.values += random_forcing(grid, tmpl.t_start, tmpl.t_end, tmpl.n_steps(), options.forcing_modes,
                                      options.perturbation_scale, pair_key.child(1))
                           .values;
        const Path u1 = solve_salins(p1, solver);
        const Path u2 = solve_salins(p2, solver);
        const double dz = sup_distance(p1.z, p2.z);
        const double ratio = dz > 0 ? sup_distance(u1, u2) / dz : 0.0;
        report.pairs[i] = {ratio, ratio <= limit};
    });

    report.pass = true;
    for (const auto& pair : report.pairs) {
        report.max_ratio = std::max(report.max_ratio, pair.ratio);
        report.pass = report.pass && pair.pass;
    }
    return report;
}

}  // namespace spdelab
