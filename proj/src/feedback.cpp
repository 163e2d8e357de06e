#include "spdelab/feedback.hpp"

#include "spdelab/errors.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/salins.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace spdelab {

namespace {

bool is_constant(const Field& f)
{
    return f.size() == 0 || (f.array() == f[0]).all();
}

void check_time_grid(const NoiseRealization& noise, double t_start, double t_end)
{
    const double h = (t_end - t_start) / noise.n_steps();
    if (std::abs(h - noise.h) > 1e-12 * std::max(1.0, std::abs(h)))
        throw DimensionError("noise realization does not match the run's time grid");
}

Path spectral_path(const SpatialGrid& grid, double t_start, double t_end, const std::vector<Spectrum>& coeffs)
{
    Path out(t_start, t_end, grid.n_points(), static_cast<int>(coeffs.size()) - 1);
    for (std::size_t m = 0; m < coeffs.size(); ++m) out.field(static_cast<int>(m)) = grid.from_spectral(coeffs[m]);
    return out;
}

struct PicardContext {
    const Setup& setup;
    const SpdeRun& run;
    const FeedbackFn& feedback;
    const NoiseRealization& noise;
    const Control* control;
    Path base;

    PicardContext(const Setup& s, const SpdeRun& r, const FeedbackFn& f, const NoiseRealization& n, const Control* c)
        : setup(s), run(r), feedback(f), noise(n), control(c)
    {
        run.validate(setup.grid());
        if (noise.n_steps() != run.n_steps) throw DimensionError("noise realization has the wrong number of steps");
        check_time_grid(noise, run.t_start, run.t_end);
        if (control) {
            control->validate(setup.noise);
            if (control->n_steps() != run.n_steps || std::abs(control->t_start - run.t_start) > 1e-12 ||
                std::abs(control->t_end - run.t_end) > 1e-12)
                throw DimensionError("control does not match the run's time grid");
        }
        base = make_path(run.t_start, run.t_end, setup.grid().n_points(), run.n_steps,
                         [&](double s) { return setup.semigroup.apply(s - run.t_start, run.x); });
    }

    Path solve(Path z) const
    {
        return solve_salins(SalinsProblem{setup.model.reaction, setup.semigroup, std::move(z)});
    }

    Path initial() const { return solve(base); }

    /// M(sqrt(eps) gamma(X) + control term + S(.)x).
    Path next(const Path& X) const
    {
        const std::vector<Field> sigma = sigma_fields(setup, X, feedback);
        Path z = base;
        if (run.eps > 0)
            z.values += std::sqrt(run.eps) *
                        stochastic_convolution(setup, sigma, noise, run.t_start, run.t_end).values;
        if (control) z.values += control_convolution(setup, sigma, *control, run.t_start, run.t_end).values;
        return solve(std::move(z));
    }
};

}  // namespace

void SpdeRun::validate(const SpatialGrid& grid) const
{
    if (eps < 0) throw DomainError("eps must be non-negative");
    if (!(t_end > t_start)) throw DomainError("run window must have positive length");
    if (!(picard_tol > 0)) throw DomainError("picard_tol must be positive");
    if (picard_max < 1) throw DomainError("picard_max must be >= 1");
    if (n_steps < 16) throw DomainError("a run needs at least 16 time steps");
    grid.check_field(x);
}

FeedbackFn make_feedback(const Setup& setup, const ValueFunction& value_fn, double t, double eps, double h,
                         StreamKey key)
{
    value_fn.validate();
    if (!setup.model.sigma.uses_feedback()) return {};
    if (value_fn.kind == ValueFunction::Kind::deterministic || eps == 0)
        return [setup, t, h](int, double r, const Field& x) { return v_deterministic(setup, r, x, t, h); };
    return [setup, value_fn, t, eps, h, key](int m, double r, const Field& x) {
        return v_monte_carlo(setup, r, x, t, eps, value_fn.k_inner, value_fn.m_fp, key.child(m), h).mean;
    };
}

std::vector<Field> sigma_fields(const Setup& setup, const Path& iterate, const FeedbackFn& feedback)
{
    const SigmaSpec& sigma = setup.model.sigma;
    std::vector<Field> out(iterate.n_steps());
    auto eval = [&](int m) {
        Observation y;
        if (sigma.uses_feedback()) {
            if (!feedback) throw DomainError("sigma needs a feedback value function");
            y = feedback(m, iterate.time(m), Field(iterate.field(m)));
        }
        out[m] = sigma.multiplier(iterate.field(m), y);
    };
    if (sigma.uses_feedback())
        parallel_for(iterate.n_steps(), eval);
    else
        for (int m = 0; m < iterate.n_steps(); ++m) eval(m);
    return out;
}

Path stochastic_convolution(const Setup& setup, const std::vector<Field>& sigma, const NoiseRealization& noise,
                            double t_start, double t_end)
{
    const SpatialGrid& grid = setup.grid();
    const int n_steps = noise.n_steps();
    if (static_cast<int>(sigma.size()) != n_steps) throw DimensionError("one sigma field per step is required");
    check_time_grid(noise, t_start, t_end);
    const int n_noise = setup.noise.n_modes();
    if (n_noise > grid.n_modes()) throw DimensionError("noise has more modes than the grid");
    if (noise.beta.rows() != n_noise) throw DimensionError("noise realization does not match the noise spec");

    const double h = noise.h;
    const Eigen::VectorXd& alpha = setup.semigroup.eigenvalues();
    const Eigen::VectorXd decay = setup.semigroup.decay(h);
    Eigen::VectorXd weight(grid.n_modes());
    for (int k = 0; k < grid.n_modes(); ++k) {
        const double a = 2.0 * alpha[k] * h;
        weight[k] = a < 1e-12 ? 1.0 : std::sqrt(-std::expm1(-a) / a);
    }
    const Eigen::VectorXd sqrt_lambda = setup.noise.lambdas.cwiseSqrt();

    std::vector<Spectrum> gamma(n_steps + 1, Spectrum::Zero(grid.n_modes()));
    Spectrum dW = Spectrum::Zero(grid.n_modes());
    for (int m = 0; m < n_steps; ++m) {
        dW.head(n_noise) = sqrt_lambda.cwiseProduct(noise.beta.col(m));
        Spectrum kick;
        if (is_constant(sigma[m]))
            kick = sigma[m].size() == 0 ? Spectrum::Zero(grid.n_modes()) : Spectrum(sigma[m][0] * dW);
        else
            kick = grid.to_spectral(sigma[m].cwiseProduct(grid.from_spectral(dW)));
        gamma[m + 1] = decay.cwiseProduct(gamma[m]) + weight.cwiseProduct(kick);
    }
    return spectral_path(grid, t_start, t_end, gamma);
}

Path stochastic_convolution(const Setup& setup, const Path& iterate, const FeedbackFn& feedback,
                            const NoiseRealization& noise)
{
    if (iterate.n_steps() != noise.n_steps()) throw DimensionError("iterate and noise use different time grids");
    return stochastic_convolution(setup, sigma_fields(setup, iterate, feedback), noise, iterate.t_start,
                                  iterate.t_end);
}

Path control_convolution(const Setup& setup, const std::vector<Field>& sigma, const Control& control,
                         double t_start, double t_end)
{
    const SpatialGrid& grid = setup.grid();
    const int n_steps = control.n_steps();
    if (static_cast<int>(sigma.size()) != n_steps) throw DimensionError("one sigma field per step is required");
    const double h = (t_end - t_start) / n_steps;
    const Eigen::VectorXd& alpha = setup.semigroup.eigenvalues();
    const Eigen::VectorXd decay = setup.semigroup.decay(h);
    Eigen::VectorXd weight(grid.n_modes());
    for (int k = 0; k < grid.n_modes(); ++k) weight[k] = -std::expm1(-alpha[k] * h) / alpha[k];

    std::vector<Spectrum> out(n_steps + 1, Spectrum::Zero(grid.n_modes()));
    Spectrum c = Spectrum::Zero(grid.n_modes());
    for (int m = 0; m < n_steps; ++m) {
        c.head(control.n_ctrl()) = control.h_coefficients(setup.noise, m);
        Spectrum kick;
        if (is_constant(sigma[m]))
            kick = sigma[m][0] * c;
        else
            kick = grid.to_spectral(sigma[m].cwiseProduct(grid.from_spectral(c)));
        out[m + 1] = decay.cwiseProduct(out[m]) + weight.cwiseProduct(kick);
    }
    return spectral_path(grid, t_start, t_end, out);
}

PicardResult picard_solve(const Setup& setup, const SpdeRun& run, const FeedbackFn& feedback,
                          const NoiseRealization& noise, const Control* control)
{
    const PicardContext ctx(setup, run, feedback, noise, control);
    PicardResult result{ctx.initial(), {}};
    PicardDiagnostics& diag = result.diagnostics;
    if (run.eps == 0 && !control) {
        diag.iterations = 1;
        diag.converged = true;
        return result;
    }

    const bool frozen = setup.model.sigma.state_independent();
    for (int it = 1; it <= run.picard_max; ++it) {
        Path next = ctx.next(result.path);
        const double diff = sup_distance(next, result.path);
        result.path = std::move(next);
        diag.iterations = it;
        if (!std::isfinite(diff))
            throw ContractionFailure("Picard iterate diverged at iteration " + std::to_string(it),
                                     std::numeric_limits<double>::infinity());
        if (!diag.diffs.empty()) diag.ratios.push_back(diag.diffs.back() > 0 ? diff / diag.diffs.back() : 0.0);
        diag.diffs.push_back(diff);
        if (frozen || diff <= run.picard_tol) {
            diag.converged = true;
            return result;
        }
        const auto n = diag.ratios.size();
        if (n >= 2 && diag.ratios[n - 1] >= 1 && diag.ratios[n - 2] >= 1)
            throw ContractionFailure("Picard map is not contracting at eps = " + std::to_string(run.eps) +
                                         ": measured ratio " + std::to_string(diag.ratios.back()),
                                     diag.ratios.back());
    }
    const double ratio = diag.ratios.empty() ? std::numeric_limits<double>::quiet_NaN() : diag.ratios.back();
    throw ContractionFailure("Picard iteration did not reach tolerance " + std::to_string(run.picard_tol) + " in " +
                                 std::to_string(run.picard_max) + " iterations at eps = " + std::to_string(run.eps) +
                                 " (last ratio " + std::to_string(ratio) + ")",
                             ratio);
}

PicardResult picard_solve(const Setup& setup, const SpdeRun& run, const ValueFunction& value_fn, StreamKey key,
                          const Control* control)
{
    const NoiseRealization noise = make_realization(setup.noise, run.n_steps, run.step(), key.child(0));
    const FeedbackFn feedback = make_feedback(setup, value_fn, run.t_end, run.eps, run.step(), key.child(1));
    return picard_solve(setup, run, feedback, noise, control);
}

ThresholdReport epsilon_threshold_probe(const Setup& setup, const SpdeRun& run_template,
                                        const std::vector<double>& eps_grid, int n_noise,
                                        const ValueFunction& value_fn, StreamKey key)
{
    if (n_noise < 1) throw DomainError("need at least one noise realization");
    for (std::size_t i = 1; i < eps_grid.size(); ++i)
        if (!(eps_grid[i] > eps_grid[i - 1])) throw DomainError("eps grid must be increasing");

    ThresholdReport report;
    for (double eps : eps_grid) {
        SpdeRun run = run_template;
        run.eps = eps;
        std::vector<double> ratio(n_noise, 0.0);
        parallel_for(n_noise, [&](int i) {
            const NoiseRealization noise = make_realization(setup.noise, run.n_steps, run.step(), key.child(i).child(0));
            const FeedbackFn feedback =
                make_feedback(setup, value_fn, run.t_end, eps, run.step(), key.child(i).child(1));
            const PicardContext ctx(setup, run, feedback, noise, nullptr);
            const Path x0 = ctx.initial();
            const Path x1 = ctx.next(x0);
            const Path x2 = ctx.next(x1);
            const double d1 = sup_distance(x1, x0);
            ratio[i] = d1 > 0 ? sup_distance(x2, x1) / d1 : 0.0;
        });
        ThresholdRow row{eps, 0.0, 0.0, n_noise};
        for (double r : ratio) row.mean_ratio += r / n_noise;
        if (n_noise > 1) {
            double var = 0.0;
            for (double r : ratio) var += (r - row.mean_ratio) * (r - row.mean_ratio);
            row.stderr_ = std::sqrt(var / (n_noise - 1) / n_noise);
        }
        if (row.mean_ratio < 1) report.eps_star = std::max(report.eps_star, eps);
        report.rows.push_back(row);
    }
    return report;
}

FailureSearch find_contraction_failure(const Setup& setup, const SpdeRun& run, const ValueFunction& value_fn,
                                       StreamKey key, int max_doublings)
{
    SpdeRun probe = run;
    if (probe.eps <= 0) probe.eps = 1e-3;
    FailureSearch out;
    for (int i = 0; i <= max_doublings; ++i, probe.eps *= 2) {
        try {
            picard_solve(setup, probe, value_fn, key);
        } catch (const ContractionFailure& e) {
            out.found = true;
            out.eps = probe.eps;
            out.measured_ratio = e.measured_ratio();
            out.message = e.what();
            return out;
        }
    }
    out.eps = probe.eps / 2;
    return out;
}

FlowLipschitzReport flow_lipschitz_probe(const Setup& setup, const SpdeRun& run_template,
                                         const std::vector<std::pair<Field, Field>>& x_pairs, int n_noise,
                                         const ValueFunction& value_fn, StreamKey key)
{
    if (n_noise < 1) throw DomainError("need at least one noise realization");
    FlowLipschitzReport report;
    for (const auto& [x1, x2] : x_pairs) {
        const double dx = sup_norm(x1 - x2);
        if (dx == 0) continue;
        std::vector<double> d(n_noise);
        parallel_for(n_noise, [&](int i) {
            SpdeRun r1 = run_template, r2 = run_template;
            r1.x = x1;
            r2.x = x2;
            d[i] = sup_distance(picard_solve(setup, r1, value_fn, key.child(i)).path,
                                picard_solve(setup, r2, value_fn, key.child(i)).path);
        });
        double m1 = 0.0, m2 = 0.0;
        for (double v : d) {
            m1 += v / n_noise;
            m2 += v * v / n_noise;
        }
        report.ratio_p1 = std::max(report.ratio_p1, m1 / dx);
        report.ratio_p2 = std::max(report.ratio_p2, std::sqrt(m2) / dx);
    }
    return report;
}

MomentReport moment_bound_probe(const Setup& setup, const SpdeRun& run_template, double p,
                                const std::vector<double>& eps_grid, int n_noise, const ValueFunction& value_fn,
                                StreamKey key, double slack)
{
    if (!(p >= 1)) throw DomainError("moment order must be >= 1");
    if (n_noise < 1) throw DomainError("need at least one noise realization");
    const double denom = 1.0 + std::pow(sup_norm(run_template.x), p);
    auto ratio_at = [&](double eps) {
        SpdeRun run = run_template;
        run.eps = eps;
        std::vector<double> v(n_noise);
        parallel_for(n_noise, [&](int i) {
            v[i] = std::pow(sup_norm(picard_solve(setup, run, value_fn, key.child(i)).path), p);
        });
        double mean = 0.0;
        for (double x : v) mean += x / n_noise;
        return mean / denom;
    };

    MomentReport report;
    const double reference = ratio_at(0.0);
    double worst = 0.0;
    for (double eps : eps_grid) {
        report.rows.push_back({eps, ratio_at(eps)});
        worst = std::max(worst, report.rows.back().ratio);
    }
    report.bounded = worst <= 2.0 * reference + slack;
    return report;
}

}  // namespace spdelab
