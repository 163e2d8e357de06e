#include <doctest.h>

#include "spdelab/path_io.hpp"
#include "support.hpp"

#include <sstream>

using namespace spdelab;

TEST_CASE("sup_norm of sampled functions")
{
    SpatialGrid grid(199, 64);
    CHECK(sup_norm(Field::Zero(199)) == 0.0);

    // Dense evaluation of the continuous maximum.
    double dense_max = 0.0;
    for (int i = 0; i <= 100000; ++i) dense_max = std::max(dense_max, std::sin(M_PI * i / 100000.0));
    CHECK(sup_norm(grid.sample([](double xi) { return std::sin(M_PI * xi); })) == doctest::Approx(dense_max).epsilon(2e-4));
    CHECK(sup_norm(grid.eigenfunction(1)) == doctest::Approx(std::sqrt(2.0)).epsilon(3e-4));

    Field x = test::band_limited(grid, 10, 3);
    CHECK(sup_norm(x) > 0);
}

TEST_CASE("spectral maps")
{
    SpatialGrid grid;
    const Spectrum c = grid.to_spectral(grid.eigenfunction(3));
    for (int k = 0; k < grid.n_modes(); ++k) CHECK(c[k] == doctest::Approx(k == 2 ? 1.0 : 0.0).epsilon(1e-6).scale(1));
    CHECK(grid.to_spectral(Field::Zero(grid.n_points())).cwiseAbs().maxCoeff() == 0.0);

    const Field x = test::band_limited(grid, grid.n_modes(), 11);
    CHECK(sup_norm(grid.project(x) - x) <= 1e-8);

    CHECK_THROWS_AS(grid.from_spectral(Spectrum::Zero(grid.n_modes() + 1)), DimensionError);
    CHECK_THROWS_AS(grid.to_spectral(Field::Zero(5)), DimensionError);
    CHECK_THROWS_AS(SpatialGrid(2, 1), DomainError);
    CHECK_THROWS_AS(SpatialGrid(10, 11), DomainError);
}

TEST_CASE("l2_norm")
{
    SpatialGrid grid;
    CHECK(l2_norm(grid, grid.eigenfunction(1)) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(l2_norm(grid, Field::Zero(grid.n_points())) == 0.0);
    CHECK(l2_norm(grid, Field::Ones(grid.n_points())) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("Parseval, Cauchy-Schwarz and sup dominance")
{
    SpatialGrid grid;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Field x = test::band_limited(grid, 20, s);
        const Field y = test::band_limited(grid, 40, s + 100);
        const double residual = std::pow(l2_norm(grid, x), 2) - grid.to_spectral(x).squaredNorm();
        CHECK(residual >= -1e-12);
        CHECK(residual <= 1e-6);
        CHECK(std::abs(grid.inner(x, y)) <= l2_norm(grid, x) * l2_norm(grid, y) + 1e-14);
        CHECK(l2_norm(grid, x) <= sup_norm(x));
    }
}

TEST_CASE("paths")
{
    SpatialGrid grid(15, 8);
    const Path p = make_path(0.0, 1.0, 15, 4, [&](double s) { return Field(s * grid.eigenfunction(1)); });
    CHECK(p.n_steps() == 4);
    CHECK(p.step() == 0.25);
    CHECK(p.time(2) == 0.5);
    CHECK(sup_norm(p) == doctest::Approx(sup_norm(grid.eigenfunction(1))));
    Path q = p;
    q.values *= 2;
    CHECK(sup_distance(p, q) == doctest::Approx(sup_norm(p)));
    CHECK_THROWS_AS(sup_distance(p, Path(0.0, 1.0, 15, 5)), DimensionError);
    CHECK_THROWS_AS(Path(1.0, 1.0, 15, 4), DomainError);
}

TEST_CASE("CSV helpers and path serialization")
{
    CHECK(csv_cell("plain") == "plain");
    CHECK(csv_cell("a,b") == "\"a,b\"");
    CHECK(csv_cell("say \"hi\"") == "\"say \"\"hi\"\"\"");
    const auto cells = split_csv_record("1,\"a,b\",\"x\"\"y\"");
    REQUIRE(cells.size() == 3);
    CHECK(cells[1] == "a,b");
    CHECK(cells[2] == "x\"y");
    CHECK(std::stod(format_number(0.1)) == 0.1);

    SpatialGrid grid(15, 8);
    const Path p = make_path(0.0, 0.5, 15, 3, [&](double s) { return Field(std::cos(s) * grid.eigenfunction(2)); });
    std::stringstream ss;
    write_path(ss, grid, p);
    CHECK(ss.str().rfind("# grid n_points=15 n_modes=8\ntime,x1,", 0) == 0);
    const LoadedPath back = read_path(ss);
    CHECK(back.n_points == 15);
    CHECK(back.n_modes == 8);
    CHECK(back.path.values == p.values);
    CHECK(back.path.t_end == 0.5);

    std::stringstream spec;
    write_path(spec, grid, p, true);
    CHECK(spec.str().find("time,c1,") != std::string::npos);
}
