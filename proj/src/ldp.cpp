#include "spdelab/ldp.hpp"

#include "spdelab/errors.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/salins.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace spdelab {

namespace {

double terminal_functional(const SpatialGrid& grid, const Eigen::Ref<const Field>& x, int mode)
{
    if (mode == 0) return grid.integral(x);
    if (mode < 1 || mode > grid.n_modes()) throw DomainError("functional mode out of range");
    return grid.inner(x, grid.eigenfunction(mode));
}

/// Target mismatch: `scaled` feeds the least-squares model, `sup` is the reported violation.
struct Mismatch {
    Eigen::VectorXd scaled;
    double sup = 0.0;
};

Mismatch mismatch(const SpatialGrid& grid, const Path& X, const RateTarget& target)
{
    Mismatch out;
    switch (target.kind) {
    case RateTarget::Kind::terminal_functional: {
        const double r = terminal_functional(grid, X.terminal(), target.mode) - target.level;
        out.scaled = Eigen::VectorXd::Constant(1, r);
        out.sup = std::abs(r);
        break;
    }
    case RateTarget::Kind::terminal_field: {
        const Field r = X.terminal() - target.field;
        out.scaled = std::sqrt(grid.spacing()) * r;
        out.sup = sup_norm(r);
        break;
    }
    case RateTarget::Kind::path: {
        if (!X.same_grid(target.path)) throw DimensionError("target path does not match the control grid");
        const Eigen::MatrixXd r = X.values.rightCols(X.n_steps()) - target.path.values.rightCols(X.n_steps());
        out.scaled = std::sqrt(grid.spacing() * X.step()) * r.reshaped();
        out.sup = sup_norm(r);
        break;
    }
    }
    return out;
}

}  // namespace

Path solve_skeleton(const Setup& setup, const Eigen::Ref<const Field>& x, const Control& control)
{
    control.validate(setup.noise);
    const SpatialGrid& grid = setup.grid();
    grid.check_field(x);
    const double t0 = control.t_start;
    const double t = control.t_end;
    const double h = control.step();

    SalinsProblem problem{setup.model.reaction, setup.semigroup,
                          make_path(t0, t, grid.n_points(), control.n_steps(),
                                    [&](double s) { return setup.semigroup.apply(s - t0, x); })};
    const SigmaSpec& sigma = setup.model.sigma;
    const DriftFn drift = [&](int m, const Field& u) -> Field {
        Observation y;
        if (sigma.uses_feedback()) y = v_deterministic(setup, t0 + m * h, u, t, h);
        return sigma.multiplier(u, y).cwiseProduct(control.field(grid, setup.noise, m));
    };
    return solve_salins(problem, {}, drift);
}

RateTarget RateTarget::functional(int mode, double level)
{
    RateTarget r;
    r.kind = Kind::terminal_functional;
    r.mode = mode;
    r.level = level;
    return r;
}

RateTarget RateTarget::terminal(Field field)
{
    RateTarget r;
    r.kind = Kind::terminal_field;
    r.field = std::move(field);
    return r;
}

RateTarget RateTarget::trajectory(Path path)
{
    RateTarget r;
    r.kind = Kind::path;
    r.path = std::move(path);
    return r;
}

RateResult minimize_rate(const Setup& setup, const Eigen::Ref<const Field>& x, double t, const RateTarget& target,
                         const RateOptions& options)
{
    if (options.n_ctrl < 1 || options.n_ctrl > setup.noise.n_modes())
        throw DomainError("ldp.n_ctrl must lie between 1 and the number of noise modes");
    if (!(t > 0)) throw DomainError("rate window must have positive length");
    const SpatialGrid& grid = setup.grid();
    int n_steps = options.n_steps;
    if (target.kind == RateTarget::Kind::path) {
        n_steps = target.path.n_steps();
        if (target.path.t_start != 0.0 || std::abs(target.path.t_end - t) > 1e-12)
            throw DomainError("target path must live on [0, t]");
    }
    if (target.kind == RateTarget::Kind::terminal_field) grid.check_field(target.field);

    Control control(0.0, t, options.n_ctrl, n_steps);
    const Eigen::Index n_var = control.phi.size();
    const double h = control.step();

    auto evaluate = [&](const Eigen::VectorXd& v) {
        Control c = control;
        c.phi = v.reshaped(options.n_ctrl, n_steps);
        return mismatch(grid, solve_skeleton(setup, x, c), target);
    };
    auto jacobian = [&](const Eigen::VectorXd& v, const Mismatch& at) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(at.scaled.size(), n_var);
        parallel_for(static_cast<int>(n_var), [&](int i) {
            // Modes outside H0 carry no admissible control and keep a zero column.
            if (!(setup.noise.lambdas[i % options.n_ctrl] > 0)) return;
            Eigen::VectorXd w = v;
            const double d = options.fd_step * std::max(1.0, std::abs(v[i]));
            w[i] += d;
            J.col(i) = (evaluate(w).scaled - at.scaled) / d;
        });
        return J;
    };

    RateResult result;
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n_var);
    Mismatch r = evaluate(phi);
    auto finish = [&](bool converged) {
        control.phi = phi.reshaped(options.n_ctrl, n_steps);
        result.control = control;
        result.best_cost = control.cost();
        result.violation = r.sup;
        result.converged = converged;
        result.value = converged ? result.best_cost : std::numeric_limits<double>::infinity();
        return result;
    };
    if (r.sup <= options.tol_target) {
        result.detail = "target met by the uncontrolled flow";
        return finish(true);
    }

    Eigen::MatrixXd J = jacobian(phi, r);
    // Directions the control cannot move are certified unreachable up front.
    for (Eigen::Index i = 0; i < J.rows(); ++i) {
        if (J.row(i).norm() <= 1e-10 && std::abs(r.scaled[i]) > 0) {
            result.reachable = false;
            result.detail = "target is unreachable: the controlled modes do not move constraint " + std::to_string(i);
            return finish(false);
        }
    }

    double mu = options.penalty;
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(r.scaled.size());
    bool fresh_jacobian = true;
    for (int outer = 0; outer < options.max_outer; ++outer) {
        auto lagrangian = [&](const Eigen::VectorXd& v, const Mismatch& m) {
            return 0.5 * h * v.squaredNorm() + 0.5 * mu * (m.scaled + nu / mu).squaredNorm();
        };
        for (int inner = 0; inner < options.max_inner; ++inner) {
            ++result.iterations;
            if (!fresh_jacobian) J = jacobian(phi, r);
            fresh_jacobian = false;
            const double L = lagrangian(phi, r);
            const Eigen::VectorXd g = h * phi + mu * J.transpose() * (r.scaled + nu / mu);
            Eigen::MatrixXd H = mu * J.transpose() * J;
            H.diagonal().array() += h;
            const Eigen::VectorXd delta = -H.ldlt().solve(g);
            const double predicted = -(g.dot(delta) + 0.5 * delta.dot(H * delta));
            if (!(predicted > 1e-14 * (1.0 + L))) break;

            double step = 1.0;
            Eigen::VectorXd trial;
            Mismatch rt;
            double Lt = L;
            for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
                trial = phi + step * delta;
                rt = evaluate(trial);
                Lt = lagrangian(trial, rt);
                if (Lt <= L - 1e-4 * step * predicted) break;
            }
            if (!(Lt < L)) break;
            phi = std::move(trial);
            r = std::move(rt);
            // A full step that realizes the predicted decrease lands on the model minimizer.
            if (step == 1.0 && std::abs((L - Lt) / predicted - 1.0) < 1e-6) break;
        }
        if (r.sup <= options.tol_target) return finish(true);
        const double before = r.sup;
        nu += mu * r.scaled;
        if (outer > 0 && before > 0.25 * result.violation) mu *= 10;
        result.violation = before;
    }
    result.detail = "optimizer stalled with target mismatch " + std::to_string(r.sup);
    return finish(false);
}

double gramian_rate(double alpha, double lambda, double b, double t)
{
    return alpha * b * b / (lambda * -std::expm1(-2.0 * alpha * t));
}

Control oscillatory_control(const Control& base, double amplitude, double period, int mode)
{
    if (mode < 1 || mode > base.n_ctrl()) throw DomainError("oscillation mode outside the control's modes");
    if (!(period > 0)) throw DomainError("oscillation period must be positive");
    Control c = base;
    for (int m = 0; m < c.n_steps(); ++m) {
        const double s = c.t_start + m * c.step();
        c.phi(mode - 1, m) += amplitude * std::sin(2.0 * std::numbers::pi * (s - c.t_start) / period);
    }
    return c;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw DimensionError("slope needs at least two matching points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

C1Report c1_convergence_test(const Setup& setup, const Eigen::Ref<const Field>& x, const std::vector<Control>& family,
                             const Control& limit, const std::vector<double>& eps_grid, int n_paths,
                             const ValueFunction& value_fn, StreamKey key)
{
    if (family.size() != eps_grid.size()) throw DimensionError("one control per eps is required");
    if (n_paths < 2) throw DomainError("need at least two paths");
    SpdeRun run;
    run.t_start = limit.t_start;
    run.t_end = limit.t_end;
    run.n_steps = limit.n_steps();
    run.x = x;
    const Path reference = picard_solve(setup, run, value_fn, key.child(n_paths), &limit).path;

    C1Report report;
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        SpdeRun r = run;
        r.eps = eps_grid[e];
        std::vector<double> err(n_paths);
        parallel_for(n_paths, [&](int j) {
            err[j] = sup_distance(picard_solve(setup, r, value_fn, key.child(j), &family[e]).path, reference);
        });
        C1Row row{eps_grid[e], 0.0, 0.0};
        for (double v : err) row.error += v / n_paths;
        double var = 0.0;
        for (double v : err) var += (v - row.error) * (v - row.error);
        row.stderr_ = std::sqrt(var / (n_paths - 1) / n_paths);
        report.rows.push_back(row);
    }

    std::vector<double> xs, ys;
    for (const auto& row : report.rows) {
        xs.push_back(row.eps);
        ys.push_back(row.error);
    }
    report.slope = loglog_slope(xs, ys);
    report.monotone = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const bool smaller_eps = report.rows[i].eps < report.rows[i - 1].eps;
        const bool smaller_err = report.rows[i].error < report.rows[i - 1].error;
        report.monotone = report.monotone && smaller_eps == smaller_err;
    }
    return report;
}

std::vector<double> oscillation_errors(const Setup& setup, const Eigen::Ref<const Field>& x, const Control& base,
                                       double amplitude, const std::vector<double>& periods, int mode)
{
    const Path reference = solve_skeleton(setup, x, base);
    std::vector<double> out(periods.size());
    parallel_for(static_cast<int>(periods.size()), [&](int i) {
        out[i] = sup_distance(solve_skeleton(setup, x, oscillatory_control(base, amplitude, periods[i], mode)),
                              reference);
    });
    return out;
}

RareEventReport rare_event_compare(const Setup& setup, const Eigen::Ref<const Field>& x, double t,
                                   const RareEvent& event, const std::vector<double>& eps_grid,
                                   const RareEventOptions& options, StreamKey key)
{
    if (options.n_paths < 1) throw DomainError("need at least one path");
    const SpatialGrid& grid = setup.grid();
    RareEventReport report;

    SpdeRun run;
    run.t_end = t;
    run.n_steps = options.n_steps;
    run.x = x;
    const Path flow = picard_solve(setup, run, ValueFunction{}, key).path;
    const bool typical =
        std::isinf(event.level) || terminal_functional(grid, flow.terminal(), event.mode) >= event.level;

    Eigen::MatrixXd phi_star;
    if (!typical) {
        RateOptions rate = options.rate;
        rate.n_steps = options.n_steps;
        report.rate = minimize_rate(setup, x, t, RateTarget::functional(event.mode, event.level), rate);
        report.I_star = report.rate.value;
        if (std::isfinite(report.I_star)) phi_star = report.rate.control.phi;
    }

    for (double eps : eps_grid) {
        if (!(eps > 0)) throw DomainError("rare-event eps must be positive");
        SpdeRun r = run;
        r.eps = eps;
        const bool shifted = options.importance && phi_star.size() > 0;
        const Eigen::MatrixXd theta = shifted ? Eigen::MatrixXd(phi_star / std::sqrt(eps)) : Eigen::MatrixXd();
        const FeedbackFn feedback = make_feedback(setup, ValueFunction{}, t, eps, r.step(), key.child(1));

        std::vector<double> weight(options.n_paths, 0.0);
        std::vector<char> hit(options.n_paths, 0);
        parallel_for(options.n_paths, [&](int j) {
            NoiseRealization noise = make_realization(setup.noise, r.n_steps, r.step(), key.child(2).child(j));
            double log_w = 0.0;
            if (shifted) {
                auto beta = noise.beta.topRows(theta.rows());
                log_w = -(theta.array() * beta.array()).sum() - 0.5 * noise.h * theta.squaredNorm();
                beta += noise.h * theta;
            }
            const Path X = picard_solve(setup, r, feedback, noise).path;
            const double value = std::isinf(event.level) ? 0.0 : terminal_functional(grid, X.terminal(), event.mode);
            if (value >= event.level) {
                hit[j] = 1;
                weight[j] = std::exp(log_w);
            }
        });

        RareEventRow row;
        row.eps = eps;
        const double n = options.n_paths;
        for (int j = 0; j < options.n_paths; ++j) {
            row.hits += hit[j];
            row.estimate += weight[j];
        }
        row.estimate /= n;
        double var = 0.0;
        for (double w : weight) var += (w - row.estimate) * (w - row.estimate);
        row.stderr_ = options.n_paths > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
        if (row.hits == 0) {
            row.bound_only = true;
            row.eps_log_p = eps * std::log(3.0 / n);
        } else {
            row.eps_log_p = eps * std::log(row.estimate);
        }
        row.gap = std::abs(row.eps_log_p + report.I_star);
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace spdelab
