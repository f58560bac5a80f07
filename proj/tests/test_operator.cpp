#include "oracles.hpp"

#include "anilap/error.hpp"
#include "anilap/grid_operator.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace anilap;

TEST_CASE("cell weights against first principles") {
    for (double a : {0.5, 1.0, 1.5}) {
        const double kap = oracle::near_cell_kappa(a);
        for (std::size_t j : {1, 2, 3, 10, 100}) {
            CAPTURE(a);
            CAPTURE(j);
            CHECK(axis_weight(a, 0.1, j) == doctest::Approx(oracle::cell_weight(a, 0.1, j, kap)).epsilon(1e-9));
        }
    }
}

TEST_CASE("periodic operator reproduces the symbol on cosines") {
    const double L = 2 * std::numbers::pi;
    for (double a : {0.5, 1.0, 1.5}) {
        const AnisotropyIndices idx({a});
        const auto K = KernelFamily::axes(idx);
        const Grid g = Grid::periodic_box({0.0}, {L}, {512});
        const auto u = GridFunction::sample(g, [](const Point& x) { return std::cos(3 * x[0]); });
        const double exact = -oracle::symbol_constant(a) * std::pow(3.0, a);
        CHECK(std::abs(apply_operator(K, u, 0) - exact) <= 0.02 * std::abs(exact));
    }
}

TEST_CASE("spectral path agrees with the symbol") {
    const AnisotropyIndices idx({1.5, 0.5});
    const Grid g = Grid::periodic_box({0.0, 0.0}, {2 * std::numbers::pi, 2 * std::numbers::pi}, {32, 32});
    const auto u = GridFunction::sample(g, [](const Point& x) { return std::cos(2 * x[0] + x[1]); });
    const auto Lu = spectral_apply(idx, u);
    const double m = symbol(idx, {2.0, 1.0});
    for (std::size_t i = 0; i < g.size(); i += 37) CHECK(Lu[i] == doctest::Approx(-m * u[i]).epsilon(1e-10));
}

TEST_CASE("spectral and grid paths on a periodic box") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    const Grid g = Grid::periodic_box({0.0, 0.0}, {2 * std::numbers::pi, 2 * std::numbers::pi}, {128, 128});
    const auto u = GridFunction::sample(g, [](const Point& x) { return std::cos(x[0]) * std::sin(2 * x[1]); });
    const auto Lu = spectral_apply(idx, u);
    const std::size_t node = g.flat({5, 9});
    CHECK(apply_operator(K, u, node) == doctest::Approx(Lu[node]).epsilon(0.01));
}

TEST_CASE("operator kills constants and is linear") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    const Grid g = Grid::spanning({-2, -2}, {2, 2}, {21, 21});
    const GridFunction c = GridFunction::sample(g, [](const Point&) { return 3.0; }, ConstantExterior{3.0});
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.is_inner(i)) CHECK(std::abs(apply_operator(K, c, i)) <= 1e-10);
    const auto u = GridFunction::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); });
    const auto v = GridFunction::sample(g, [](const Point& x) { return x[0] * x[1] / (1 + x[0] * x[0]); });
    GridFunction w(g);
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = 2 * u[i] - 0.5 * v[i];
    const std::size_t n = g.flat({7, 12});
    CHECK(apply_operator(K, w, n) ==
          doctest::Approx(2 * apply_operator(K, u, n) - 0.5 * apply_operator(K, v, n)).epsilon(1e-12));
}

TEST_CASE("boundary-layer evaluation is refused") {
    const AnisotropyIndices idx({1.0});
    const auto K = KernelFamily::axes(idx);
    const Grid g = Grid::spanning({-1.0}, {1.0}, {11});
    const GridFunction u(g);
    CHECK_THROWS_AS((void)apply_operator(K, u, 0), Error);
    const auto all = apply_operator_all(K, u);
    CHECK(std::isnan(all[0]));
    CHECK(all[5] == 0.0);
}

TEST_CASE("cosine exterior data through the callable tail") {
    // Whole-line cosine represented by a finite window plus callable exterior data.
    const double a = 1.5;
    const AnisotropyIndices idx({a});
    const auto K = KernelFamily::axes(idx);
    const Grid g = Grid::spanning({-8.0}, {8.0}, {1601});
    auto f = [](const Point& x) { return std::cos(x[0]); };
    const auto u = GridFunction::sample(g, f, CallableExterior{f});
    CHECK(apply_operator(K, u, 800) == doctest::Approx(-oracle::symbol_constant(a)).epsilon(0.01));
}
