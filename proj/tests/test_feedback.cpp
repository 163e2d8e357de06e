#include <doctest.h>

#include <cmath>

#include "spdelab/feedback.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/salins.hpp"
#include "support.hpp"

using namespace spdelab;

namespace {

SpdeRun make_run(const Setup& setup, double eps, const Field& x, int n_steps = 32)
{
    SpdeRun run;
    run.eps = eps;
    run.x = x;
    run.n_steps = n_steps;
    run.validate(setup.grid());
    return run;
}

Setup additive(Setup setup)
{
    setup.model.sigma.kind = SigmaSpec::Kind::additive;
    return setup;
}

std::vector<Field> constant_sigma(const Setup& setup, int n_steps, double value)
{
    return std::vector<Field>(n_steps, Field::Constant(setup.grid().n_points(), value));
}

}  // namespace

TEST_CASE("stochastic convolution with zero or additive sigma")
{
    const Setup setup = test::small_linear_additive();
    const int n = 32;
    const NoiseRealization noise = make_realization(setup.noise, n, 1.0 / n, {1, 1});
    CHECK(sup_norm(stochastic_convolution(setup, constant_sigma(setup, n, 0.0), noise, 0.0, 1.0)) == 0.0);

    // Ito isometry: Var <gamma(t), e_k> = lambda_k (1 - e^{-2 alpha_k t}) / (2 alpha_k).
    const int n_paths = 10000;
    Eigen::MatrixXd coeffs(3, n_paths);
    for (int i = 0; i < n_paths; ++i) {
        const NoiseRealization w = make_realization(setup.noise, n, 1.0 / n, StreamKey{2, 1}.child(i));
        const Path g = stochastic_convolution(setup, constant_sigma(setup, n, 1.0), w, 0.0, 1.0);
        coeffs.col(i) = setup.grid().to_spectral(g.terminal()).head(3);
    }
    for (int k = 1; k <= 3; ++k) {
        const Eigen::ArrayXd c = coeffs.row(k - 1).transpose().array();
        const double var = (c - c.mean()).square().sum() / (n_paths - 1);
        const double lambda = setup.noise.lambdas[k - 1];
        const double exact = lambda * (1 - std::exp(-2 * test::alpha(k))) / (2 * test::alpha(k));
        CAPTURE(k);
        CHECK(var == doctest::Approx(exact).epsilon(0.05));
    }
}

TEST_CASE("stochastic convolution is Lipschitz in the iterate")
{
    Setup setup = test::small_setup();
    setup.model.sigma.kind = SigmaSpec::Kind::multiplicative;
    const int n = 32;
    double num = 0.0, den = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const Path x1 = random_forcing(setup.grid(), 0.0, 1.0, n, 8, 1.0, {3, i});
        Path x2 = x1;
        x2.values += random_forcing(setup.grid(), 0.0, 1.0, n, 8, 0.2, {4, i}).values;
        const NoiseRealization w = make_realization(setup.noise, n, 1.0 / n, {5, i});
        num += sup_distance(stochastic_convolution(setup, x1, {}, w), stochastic_convolution(setup, x2, {}, w));
        den += sup_distance(x1, x2);
    }
    const double L = num / den;
    CAPTURE(L);
    CHECK(std::isfinite(L));
    CHECK(L > 0.0);
    CHECK(L < 5.0);
}

TEST_CASE("Picard examples")
{
    const Setup setup = test::small_setup();
    const Field x = test::band_limited(setup.grid(), 6, 1);

    const PicardResult det = picard_solve(setup, make_run(setup, 0.0, x), ValueFunction{}, {1, 2});
    CHECK(det.diagnostics.iterations == 1);
    const Path z = make_path(0.0, 1.0, 31, 32, [&](double s) { return setup.semigroup.apply(s, x); });
    CHECK(sup_distance(det.path, solve_salins({setup.model.reaction, setup.semigroup, z})) == 0.0);

    const Setup lin = test::small_linear_additive();
    const PicardResult one = picard_solve(lin, make_run(lin, 0.01, x), ValueFunction{}, {1, 3});
    CHECK(one.diagnostics.iterations == 1);
    CHECK(one.diagnostics.converged);

    const PicardResult cubic = picard_solve(setup, make_run(setup, 1e-3, x), ValueFunction{}, {1, 4});
    CHECK(cubic.diagnostics.converged);
    REQUIRE_FALSE(cubic.diagnostics.ratios.empty());
    for (double r : cubic.diagnostics.ratios) CHECK(r < 0.5);
}

TEST_CASE("converged Picard path is a fixed point")
{
    const Setup setup = test::small_setup();
    const Field x = test::band_limited(setup.grid(), 6, 2);
    SpdeRun run = make_run(setup, 1e-2, x);
    const NoiseRealization w = make_realization(setup.noise, run.n_steps, run.step(), {6, 0});
    const FeedbackFn feedback = make_feedback(setup, ValueFunction{}, 1.0, run.eps, run.step(), {6, 1});
    const PicardResult result = picard_solve(setup, run, feedback, w);
    REQUIRE(result.diagnostics.converged);

    Path forcing = stochastic_convolution(setup, result.path, feedback, w);
    forcing.values *= std::sqrt(run.eps);
    for (int m = 0; m <= run.n_steps; ++m) forcing.field(m) += setup.semigroup.apply(forcing.time(m), x);
    const Path image = solve_salins({setup.model.reaction, setup.semigroup, forcing});
    CHECK(sup_distance(image, result.path) <= 2 * run.picard_tol);
}

TEST_CASE("threshold probe")
{
    const Setup setup = test::small_setup();
    const Field x = test::band_limited(setup.grid(), 6, 3);
    const SpdeRun run = make_run(setup, 0.0, x);
    const ThresholdReport r = epsilon_threshold_probe(setup, run, {0.0, 1e-3, 4e-3}, 8, ValueFunction{}, {7, 0});
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].mean_ratio == 0.0);
    const double growth = r.rows[2].mean_ratio / r.rows[1].mean_ratio;
    CAPTURE(growth);
    CHECK(growth >= 1.0);
    CHECK(growth <= 3.0);
    CHECK(r.eps_star == 4e-3);

    const Setup lin = test::small_linear_additive();
    const ThresholdReport flat = epsilon_threshold_probe(lin, make_run(lin, 0.0, x), {1e-3, 1.0}, 4, ValueFunction{}, {7, 1});
    for (const ThresholdRow& row : flat.rows) CHECK(row.mean_ratio == 0.0);
}

TEST_CASE("contraction failure is reported")
{
    const Setup setup = test::small_setup();
    SpdeRun run = make_run(setup, 1e6, test::band_limited(setup.grid(), 6, 3), 16);
    CHECK_THROWS_AS(picard_solve(setup, run, ValueFunction{}, {8, 0}), ContractionFailure);
    try {
        picard_solve(setup, run, ValueFunction{}, {8, 0});
    } catch (const ContractionFailure& e) {
        CHECK(std::string(e.what()).find("eps") != std::string::npos);
    }
}

TEST_CASE("flow Lipschitz probe")
{
    const Setup setup = test::small_setup();
    const Field x1 = test::band_limited(setup.grid(), 6, 4);
    const Field x2 = x1 + 0.1 * test::band_limited(setup.grid(), 6, 5);

    const FlowLipschitzReport same =
        flow_lipschitz_probe(setup, make_run(setup, 1e-3, x1), {{x1, x1}}, 4, ValueFunction{}, {9, 0});
    CHECK(same.ratio_p1 == 0.0);

    Setup heat = setup;
    heat.model.reaction = ReactionSpec::zero();
    const FlowLipschitzReport h = flow_lipschitz_probe(heat, make_run(heat, 0.0, x1), {{x1, x2}}, 1, ValueFunction{}, {9, 1});
    CHECK(h.ratio_p1 <= 1.0);

    const FlowLipschitzReport c =
        flow_lipschitz_probe(setup, make_run(setup, 1e-3, x1), {{x1, x2}, {x2, 2.0 * x1}}, 8, ValueFunction{}, {9, 2});
    CHECK(c.ratio_p1 <= c.ratio_p2 + 1e-12);
    CHECK(c.ratio_p2 <= 2 * salins_lipschitz_bound(setup.model.reaction.k, 1.0));
}

TEST_CASE("moment probe")
{
    const Setup setup = test::small_setup();
    const MomentReport zero =
        moment_bound_probe(setup, make_run(setup, 0.0, Field::Zero(31)), 2.0, {0.0}, 2, ValueFunction{}, {10, 0});
    CHECK(zero.rows[0].ratio == 0.0);

    const Field x = test::band_limited(setup.grid(), 6, 6);
    const MomentReport r =
        moment_bound_probe(setup, make_run(setup, 0.0, x), 2.0, {1e-4, 1e-3, 1e-2}, 8, ValueFunction{}, {10, 1});
    CHECK(r.bounded);
    double lo = INFINITY, hi = 0.0;
    for (const MomentRow& row : r.rows) {
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
    }
    CHECK(hi <= 2 * lo);
}

TEST_CASE("Picard paths do not depend on the worker count")
{
    const Setup setup = test::small_setup(15, 8);
    const Field x = test::band_limited(setup.grid(), 4, 7);
    const ValueFunction mc{ValueFunction::Kind::monte_carlo, 4, 0};
    SpdeRun run = make_run(setup, 1e-2, x, 16);
    set_worker_count(1);
    const Path a = picard_solve(setup, run, mc, {11, 0}).path;
    set_worker_count(4);
    const Path b = picard_solve(setup, run, mc, {11, 0}).path;
    set_worker_count(0);
    CHECK((a.values.array() == b.values.array()).all());
}

TEST_CASE("additive noise preserves ordering of initial data")
{
    const Setup setup = additive(test::small_setup());
    const Field x1 = test::band_limited(setup.grid(), 4, 8);
    const Field bump = setup.grid().sample([](double s) { return std::sin(M_PI * s); });
    const Field x2 = x1 + 0.3 * bump;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const Path X1 = picard_solve(setup, make_run(setup, 0.05, x1), ValueFunction{}, {12, i}).path;
        const Path X2 = picard_solve(setup, make_run(setup, 0.05, x2), ValueFunction{}, {12, i}).path;
        CHECK((X2.values - X1.values).minCoeff() >= -1e-9);
    }
}

TEST_CASE("paths converge to the deterministic flow like sqrt(eps)")
{
    const Setup setup = test::small_setup();
    const Field x = test::band_limited(setup.grid(), 6, 9);
    const Path X0 = picard_solve(setup, make_run(setup, 0.0, x), ValueFunction{}, {13, 0}).path;
    std::vector<double> eps{1e-4, 1e-3, 1e-2}, err;
    for (double e : eps) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(1, X0.values.cols());
        for (std::uint64_t i = 0; i < 16; ++i) {
            const Path X = picard_solve(setup, make_run(setup, e, x), ValueFunction{}, {13, i}).path;
            for (int m = 0; m < X.values.cols(); ++m) acc(0, m) += sup_norm(Eigen::VectorXd(X.field(m) - X0.field(m))) / 16;
        }
        err.push_back(acc.maxCoeff());
    }
    const double slope = std::log(err[2] / err[0]) / std::log(eps[2] / eps[0]);
    CAPTURE(slope);
    CHECK(slope >= 0.4);
}
