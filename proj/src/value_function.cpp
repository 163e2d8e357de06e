#include "spdelab/value_function.hpp"

#include "spdelab/feedback.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/salins.hpp"

#include <cmath>
#include <vector>

namespace spdelab {

namespace {

int inner_steps(double rho, double t, double h)
{
    return std::max(16, static_cast<int>(std::ceil((t - rho) / h - 1e-9)));
}

}  // namespace

void ValueFunction::validate() const
{
    if (k_inner < 1) throw DomainError("feedback.k_inner must be >= 1");
    if (m_fp < 0) throw DomainError("feedback.depth must be >= 0");
}

Observation v_deterministic(const Setup& setup, double rho, const Eigen::Ref<const Field>& y, double t, double h)
{
    if (rho < 0 || rho > t) throw DomainError("value function needs 0 <= rho <= t");
    if (!(h > 0)) throw DomainError("time step must be positive");
    const SpatialGrid& grid = setup.grid();
    grid.check_field(y);
    if (rho == t) return setup.model.observable(grid, y);

    const int n = inner_steps(rho, t, h);
    SalinsProblem problem{setup.model.reaction, setup.semigroup,
                          make_path(rho, t, grid.n_points(), n,
                                    [&](double s) { return setup.semigroup.apply(s - rho, y); })};
    const Path Y = solve_salins(problem);
    return setup.model.observable(grid, Y.terminal());
}

ValueEstimate v_monte_carlo(const Setup& setup, double rho, const Eigen::Ref<const Field>& y, double t, double eps,
                            int k_inner, int m_fp, StreamKey key, double h)
{
    ValueFunction{ValueFunction::Kind::monte_carlo, k_inner, m_fp}.validate();
    if (eps < 0) throw DomainError("eps must be non-negative");

    const SpatialGrid& grid = setup.grid();
    if (eps == 0 || rho == t) {
        ValueEstimate out;
        out.mean = v_deterministic(setup, rho, y, t, h);
        out.stderr_ = {Field::Zero(grid.n_points()), 0.0};
        out.n_samples = k_inner;
        return out;
    }
    if (rho < 0 || rho > t) throw DomainError("value function needs 0 <= rho <= t");

    SpdeRun run;
    run.eps = eps;
    run.t_start = rho;
    run.t_end = t;
    run.x = y;
    run.n_steps = inner_steps(rho, t, h);
    const ValueFunction inner = m_fp == 0 ? ValueFunction{}
                                          : ValueFunction{ValueFunction::Kind::monte_carlo, k_inner, m_fp - 1};

    std::vector<Observation> samples(k_inner);
    parallel_for(k_inner, [&](int i) {
        const NoiseRealization noise = make_realization(setup.noise, run.n_steps, run.step(), key.child(2 * i));
        const FeedbackFn feedback = make_feedback(setup, inner, t, eps, run.step(), key.child(2 * i + 1));
        const PicardResult result = picard_solve(setup, run, feedback, noise);
        samples[i] = setup.model.observable(grid, result.path.terminal());
    });

    ValueEstimate out;
    out.n_samples = k_inner;
    out.mean = (1.0 / k_inner) * samples[0];
    for (int i = 1; i < k_inner; ++i) out.mean += (1.0 / k_inner) * samples[i];

    // Jackknife over leave-one-out means; for the sample mean this is s / sqrt(K).
    out.stderr_ = {Field::Zero(grid.n_points()), 0.0};
    if (k_inner > 1) {
        const double K = k_inner;
        Field var = Field::Zero(grid.n_points());
        double var_scalar = 0.0;
        for (const Observation& s : samples) {
            const Field loo = (K * out.mean.field - s.field) / (K - 1);
            const double loo_scalar = (K * out.mean.scalar - s.scalar) / (K - 1);
            var += (loo - out.mean.field).cwiseAbs2();
            var_scalar += (loo_scalar - out.mean.scalar) * (loo_scalar - out.mean.scalar);
        }
        out.stderr_.field = ((K - 1) / K * var).cwiseSqrt();
        out.stderr_.scalar = std::sqrt((K - 1) / K * var_scalar);
    }
    return out;
}

}  // namespace spdelab
