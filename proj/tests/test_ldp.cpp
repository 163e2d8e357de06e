#include <doctest.h>

#include <cmath>

#include "spdelab/ldp.hpp"
#include "spdelab/salins.hpp"
#include "support.hpp"

using namespace spdelab;

namespace {

/// Discrete least-norm oracle: the skeleton maps the mode-k control sequence c to
/// y_n = sum_m a_m c_m with a_m = h sqrt(lambda) e^{-alpha h/2} e^{-alpha h (n-1-m)};
/// the cheapest c with y_n = b costs (1/2) h b^2 / |a|^2.
double discrete_rate(double alpha, double lambda, double b, double t, int n)
{
    const double h = t / n;
    double a2 = 0.0;
    for (int m = 0; m < n; ++m) {
        const double a = h * std::sqrt(lambda) * std::exp(-alpha * h / 2) * std::exp(-alpha * h * (n - 1 - m));
        a2 += a * a;
    }
    return 0.5 * h * b * b / a2;
}

double normal_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("skeleton examples")
{
    const Setup setup = test::small_setup();
    const Field x = test::band_limited(setup.grid(), 6, 1);
    const Control zero(0.0, 1.0, 4, 32);
    const Path z = make_path(0.0, 1.0, 31, 32, [&](double s) { return setup.semigroup.apply(s, x); });
    CHECK(sup_distance(solve_skeleton(setup, x, zero), solve_salins({setup.model.reaction, setup.semigroup, z})) <=
          1e-14);

    const Setup lin = test::small_linear_additive();
    Control c(0.0, 1.0, 2, 128);
    c.phi.row(0).setConstant(0.8);
    const Path y = solve_skeleton(lin, Field::Zero(31), c);
    const double a1 = test::alpha(1);
    const double exact = std::sqrt(lin.noise.lambdas[0]) * 0.8 * (1 - std::exp(-a1)) / a1;
    CHECK(std::abs(lin.grid().to_spectral(y.terminal())[0] - exact) <= 1e-4);
    CHECK(std::abs(lin.grid().to_spectral(y.terminal())[1]) <= 1e-14);

    // Growth bound sup|X| <= c (1 + |x|): the measured constant stays moderate across scales.
    Control phi(0.0, 1.0, 2, 32);
    phi.phi.setConstant(0.5);
    for (double s : {0.5, 1.0, 4.0}) {
        const Field xs = s * x;
        const double ratio = sup_norm(solve_skeleton(setup, xs, phi)) / (1 + sup_norm(xs));
        CAPTURE(s);
        CHECK(ratio <= 2.0);
    }
}

TEST_CASE("rate functional quadrature")
{
    CHECK(rate_functional(Control(0.0, 1.0, 3, 16)) == 0.0);
    Control unit(0.0, 1.0, 3, 16);
    for (int m = 0; m < 16; ++m) unit.phi(m % 3, m) = 1.0;
    CHECK(rate_functional(unit) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("control validation")
{
    NoiseSpec noise = NoiseSpec::with_decay(NoiseSpec::Decay::inverse, 4);
    Control c(0.0, 1.0, 2, 8);
    c.phi.setConstant(1.0);
    CHECK_NOTHROW(c.validate(noise));
    c.bound = 1.0;
    CHECK_FALSE(c.in_ball());
    CHECK_THROWS_AS(c.validate(noise), DomainError);
    c.bound = 2.0;
    CHECK(c.in_ball());
    noise.lambdas[1] = 0.0;
    CHECK_THROWS_AS(c.validate(noise), NotInH0Error);
    CHECK_THROWS_AS(Control(0.0, 1.0, 8, 8).validate(noise), DimensionError);

    const NoiseSpec inv = NoiseSpec::with_decay(NoiseSpec::Decay::inverse, 4);
    const Control k = constant_control(inv, Eigen::Vector2d(1.0, 1.0), 0.0, 1.0, 4);
    CHECK(k.phi(0, 0) == doctest::Approx(1.0));
    CHECK(k.phi(1, 3) == doctest::Approx(std::sqrt(2.0)));
    CHECK(k.h_coefficients(inv, 2)[1] == doctest::Approx(1.0));
}

TEST_CASE("rate at the deterministic endpoint is zero")
{
    const Setup setup = test::small_setup();
    const Field x = test::band_limited(setup.grid(), 6, 2);
    const Path flow = solve_skeleton(setup, x, Control(0.0, 1.0, 2, 32));
    const RateResult r = minimize_rate(setup, x, 1.0, RateTarget::terminal(Field(flow.terminal())), {2, 32});
    CHECK(r.value <= 1e-6);
    CHECK(r.reachable);
}

TEST_CASE("linear-additive steering matches the Gramian and the discrete oracle")
{
    const Setup lin = test::small_linear_additive();
    const double a1 = test::alpha(1), l1 = lin.noise.lambdas[0];
    CHECK(gramian_rate(a1, 1.0, 0.5, 1.0) == doctest::Approx(a1 * 0.25 / (1 - std::exp(-2 * a1))));

    RateOptions opts;
    opts.n_ctrl = 2;
    opts.n_steps = 64;
    const RateResult r = minimize_rate(lin, Field::Zero(31), 1.0, RateTarget::functional(1, 0.5), opts);
    REQUIRE(std::isfinite(r.value));
    CHECK(r.violation <= opts.tol_target);
    CHECK(r.value == doctest::Approx(gramian_rate(a1, l1, 0.5, 1.0)).epsilon(0.02));
    CHECK(r.value == doctest::Approx(discrete_rate(a1, l1, 0.5, 1.0, 64)).epsilon(0.01));

    const RateResult twice = minimize_rate(lin, Field::Zero(31), 1.0, RateTarget::functional(1, 1.0), opts);
    CHECK(twice.value / r.value == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("unreachable target")
{
    Setup lin = test::small_linear_additive();
    lin.noise.lambdas[0] = 0.0;
    RateOptions opts;
    opts.n_ctrl = 2;
    opts.n_steps = 16;
    const RateResult r = minimize_rate(lin, Field::Zero(31), 1.0, RateTarget::functional(1, 0.5), opts);
    CHECK(std::isinf(r.value));
    CHECK_FALSE(r.reachable);
}

TEST_CASE("refining the controlled modes changes the rate by less than 1%")
{
    Setup setup = test::small_setup();
    setup.model.sigma.kind = SigmaSpec::Kind::multiplicative;
    RateOptions opts;
    opts.n_steps = 16;
    opts.n_ctrl = 2;
    const RateResult coarse = minimize_rate(setup, Field::Zero(31), 1.0, RateTarget::functional(1, 0.3), opts);
    opts.n_ctrl = 4;
    const RateResult fine = minimize_rate(setup, Field::Zero(31), 1.0, RateTarget::functional(1, 0.3), opts);
    REQUIRE(std::isfinite(coarse.value));
    CHECK(fine.value == doctest::Approx(coarse.value).epsilon(0.01));
}

TEST_CASE("path targets bound the rate by the generating control")
{
    const Setup lin = test::small_linear_additive();
    Control phi(0.0, 1.0, 2, 16);
    for (int m = 0; m < 16; ++m) {
        phi.phi(0, m) = std::sin(0.4 * m);
        phi.phi(1, m) = 0.5;
    }
    const Path X = solve_skeleton(lin, Field::Zero(31), phi);
    RateOptions opts;
    opts.n_ctrl = 2;
    const RateResult r = minimize_rate(lin, Field::Zero(31), 1.0, RateTarget::trajectory(X), opts);
    REQUIRE(std::isfinite(r.value));
    CHECK(r.value <= rate_functional(phi) * 1.01);
}

TEST_CASE("rare events")
{
    const Setup lin = test::small_linear_additive();
    RareEventOptions opts;
    opts.n_paths = 2000;
    opts.n_steps = 32;
    opts.rate.n_ctrl = 1;
    opts.rate.n_steps = 32;

    const RareEventReport all = rare_event_compare(lin, Field::Zero(31), 1.0, {1, -INFINITY}, {0.02}, opts, {1, 1});
    CHECK(all.I_star == 0.0);
    CHECK(all.rows[0].estimate == 1.0);
    CHECK(all.rows[0].eps_log_p == 0.0);

    // <X(t), e_1> ~ N(0, eps lambda_1 (1 - e^{-2 alpha_1 t}) / (2 alpha_1)).
    const double b = 0.3, eps = 0.02, a1 = test::alpha(1);
    const double sd = std::sqrt(eps * lin.noise.lambdas[0] * (1 - std::exp(-2 * a1)) / (2 * a1));
    const RareEventReport r = rare_event_compare(lin, Field::Zero(31), 1.0, {1, b}, {eps}, opts, {1, 2});
    const double exact = normal_tail(b / sd);
    CAPTURE(exact);
    CAPTURE(r.rows[0].estimate);
    CHECK(std::abs(r.rows[0].estimate - exact) <= 4 * r.rows[0].stderr_ + 0.02 * exact);
    CHECK(r.I_star == doctest::Approx(gramian_rate(a1, lin.noise.lambdas[0], b, 1.0)).epsilon(0.02));
    CHECK(r.rows[0].gap == doctest::Approx(std::abs(r.rows[0].eps_log_p + r.I_star)));

    opts.importance = false;
    opts.n_paths = 100;
    const RareEventReport none = rare_event_compare(lin, Field::Zero(31), 1.0, {1, 2.0}, {1e-3}, opts, {1, 3});
    CHECK(none.rows[0].hits == 0);
    CHECK(none.rows[0].bound_only);
    CHECK(none.rows[0].eps_log_p == doctest::Approx(1e-3 * std::log(3.0 / 100)));
}

TEST_CASE("C1 convergence and oscillating controls")
{
    const Setup setup = test::small_setup();
    const Field x = test::band_limited(setup.grid(), 6, 3);
    Control phi(0.0, 1.0, 2, 32);
    phi.phi.setConstant(0.5);
    const std::vector<double> eps{4e-3, 1e-3, 2.5e-4};
    const C1Report r = c1_convergence_test(setup, x, std::vector<Control>(3, phi), phi, eps, 16, ValueFunction{}, {3, 3});
    CAPTURE(r.slope);
    CHECK(r.monotone);
    CHECK(r.slope >= 0.4);
    CHECK(r.slope <= 0.6);

    Control base(0.0, 1.0, 2, 512);
    base.phi.setConstant(0.5);
    const std::vector<double> e = oscillation_errors(setup, x, base, 1.0, {0.25, 0.125, 0.0625});
    CHECK(e[1] < e[0]);
    CHECK(e[2] < e[1]);

    CHECK(loglog_slope({1, 10, 100}, {2, 20, 200}) == doctest::Approx(1.0));
}
