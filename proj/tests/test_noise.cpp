#include <doctest.h>

#include "spdelab/noise.hpp"
#include "support.hpp"

using namespace spdelab;

TEST_CASE("hypothesis H3")
{
    const NoiseSpec white = NoiseSpec::with_decay(NoiseSpec::Decay::constant, 16);
    CHECK(validate_hypothesis(white, 1, TailModel::from(NoiseSpec::Decay::constant)).pass);
    CHECK_FALSE(validate_hypothesis(white, 1, {1.0, -0.5}).pass);

    // d = 3, lambda_i = 1/i: theta = 2.5 < 3 and sum i^{-2.5} converges, so H3 holds;
    // theta = 3.5 violates theta < d/(d-2).
    NoiseSpec inv = NoiseSpec::with_decay(NoiseSpec::Decay::inverse, 16);
    inv.theta = 2.5;
    CHECK(validate_hypothesis(inv, 3, TailModel::from(NoiseSpec::Decay::inverse)).pass);
    inv.theta = 3.5;
    CHECK_FALSE(validate_hypothesis(inv, 3, TailModel::from(NoiseSpec::Decay::inverse)).pass);
    // theta = 0.9 is admissible but sum i^{-0.9} diverges.
    inv.theta = 0.9;
    CHECK_FALSE(validate_hypothesis(inv, 3, TailModel::from(NoiseSpec::Decay::inverse)).pass);

    NoiseSpec inv_sq = NoiseSpec::with_decay(NoiseSpec::Decay::inverse_square, 16);
    inv_sq.theta = 2.0;
    const HypothesisReport r = validate_hypothesis(inv_sq, 3, TailModel::from(NoiseSpec::Decay::inverse_square));
    CHECK(r.pass);
    // Oracle: sum_i 2 i^{-4} = 2 zeta(4) = pi^4 / 45, minus the tail beyond 1e5.
    CHECK(r.partial_sum == doctest::Approx(std::pow(M_PI, 4) / 45).epsilon(1e-12));

    const HypothesisReport d2 = validate_hypothesis(inv_sq, 2, TailModel::from(NoiseSpec::Decay::inverse_square));
    CHECK(d2.pass);
    CHECK(d2.detail.find("any finite theta") != std::string::npos);
    CHECK_THROWS_AS(validate_hypothesis(inv_sq, 0, TailModel{}), DomainError);
}

TEST_CASE("sample_increment")
{
    NoiseSpec spec = NoiseSpec::with_decay(NoiseSpec::Decay::inverse_square, 4);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0, cross = 0.0, sum_b = 0.0, sum_b2 = 0.0;
    for (int m = 0; m < n; ++m) {
        CounterRng rng({17, 3}, m);
        const NoiseIncrement inc = sample_increment(spec, 0.01, rng);
        sum += inc.dW[0];
        sum2 += inc.dW[0] * inc.dW[0];
        sum_b += inc.dW[1];
        sum_b2 += inc.dW[1] * inc.dW[1];
        cross += inc.dW[0] * inc.dW[1];
    }
    const double var = sum2 / n - (sum / n) * (sum / n);
    // Sample variance of N(0, 0.01) draws has standard deviation 0.01 sqrt(2/(n-1)).
    CHECK(std::abs(var - 0.01) <= 3 * 0.01 * std::sqrt(2.0 / (n - 1)));
    const double var_b = sum_b2 / n - (sum_b / n) * (sum_b / n);
    const double rho = (cross / n - (sum / n) * (sum_b / n)) / std::sqrt(var * var_b);
    CHECK(std::abs(rho) <= 4 / std::sqrt(double(n)));

    spec.lambdas[0] = 0.0;
    CounterRng rng({1, 1}, 0);
    CHECK(sample_increment(spec, 0.1, rng).dW[0] == 0.0);

    CounterRng a({5, 6}, 7), b({5, 6}, 7);
    const NoiseIncrement ia = sample_increment(spec, 0.1, a), ib = sample_increment(spec, 0.1, b);
    CHECK(ia.dW == ib.dW);
    CHECK_THROWS_AS(sample_increment(spec, 0.0, a), DomainError);
}

TEST_CASE("realizations are keyed by stream and step")
{
    const NoiseSpec spec = NoiseSpec::with_decay(NoiseSpec::Decay::inverse, 8);
    const NoiseRealization a = make_realization(spec, 32, 1.0 / 32, {3, 1});
    const NoiseRealization b = make_realization(spec, 32, 1.0 / 32, {3, 1});
    const NoiseRealization c = make_realization(spec, 32, 1.0 / 32, StreamKey{3, 1}.child(0));
    CHECK(a.beta == b.beta);
    CHECK(a.beta != c.beta);
    CHECK(a.increment(spec, 4)[1] == doctest::Approx(std::sqrt(0.5) * a.beta(1, 4)));
    CHECK(zero_realization(spec, 4, 0.25).beta.isZero());
}

TEST_CASE("h0_norm")
{
    NoiseSpec spec;
    spec.lambdas = Eigen::Vector2d(4.0, 1.0);
    CHECK(h0_norm(Eigen::Vector2d(1, 0), spec) == doctest::Approx(0.5));
    CHECK(h0_norm(Eigen::Vector2d(0, 0), spec) == 0.0);

    spec.lambdas = Eigen::Vector2d(1.0, 0.25);
    CHECK(std::abs(h0_norm(Eigen::Vector2d(1, 1), spec) - std::sqrt(5.0)) <= 1e-12);
    const Eigen::Vector2d phi(0.3, -1.1);
    CHECK(h0_norm(-2.5 * phi, spec) == 2.5 * h0_norm(phi, spec));

    spec.lambdas = Eigen::Vector2d(1.0, 0.0);
    CHECK_THROWS_AS(h0_norm(Eigen::Vector2d(0, 1), spec), NotInH0Error);
    CHECK(h0_norm(Eigen::Vector2d(1, 0), spec) == 1.0);
    CHECK_THROWS_AS(h0_norm(Eigen::Vector3d(1, 0, 1), spec), NotInH0Error);
}

TEST_CASE("decay names")
{
    CHECK(parse_decay("inv_sq") == NoiseSpec::Decay::inverse_square);
    CHECK(to_string(parse_decay("const")) == "const");
    CHECK_THROWS_AS(parse_decay("fast"), DomainError);
    NoiseSpec bad;
    bad.lambdas = Eigen::Vector2d(1.0, -1.0);
    CHECK_THROWS_AS(bad.validate(), DomainError);
}
