#include "oracles.hpp"

#include "anilap/error.hpp"
#include "anilap/kernels.hpp"
#include "anilap/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace anilap;

TEST_CASE("symbol constant against quadrature") {
    for (double a : {0.3, 0.5, 1.0, 1.5, 1.8}) {
        CAPTURE(a);
        CHECK(symbol_constant(a) == doctest::Approx(oracle::symbol_constant(a)).epsilon(1e-9));
    }
    CHECK(symbol_constant(1.0) == doctest::Approx(M_PI).epsilon(1e-15));
    CHECK_THROWS_AS((void)symbol_constant(2.0), Error);
}

TEST_CASE("near-cell constant against direct summation") {
    for (double a : {0.3, 0.5, 1.0, 1.5, 1.9}) {
        CAPTURE(a);
        CHECK(near_cell_kappa(a) == doctest::Approx(oracle::near_cell_kappa(a)).epsilon(1e-8));
    }
}

TEST_CASE("axes kernel integrates |h|^2 ^ 1 to 4d") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> A(0.05, 1.95);
    for (std::size_t d = 1; d <= 3; ++d) {
        std::vector<double> al(d);
        for (auto& a : al) a = A(rng);
        const auto K = KernelFamily::axes(AnisotropyIndices(al));
        for (double v : check_levy_integrability(K, {Point(d, 0.0), Point(d, 0.7)}))
            CHECK(std::abs(v - 4.0 * static_cast<double>(d)) <= 1e-6);
    }
}

TEST_CASE("modulated kernel stays between one and two times the axes value") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::modulated_axes(idx, checkerboard_coefficient(0.25));
    for (double v : check_levy_integrability(K, {Point{0.1, 0.2}, Point{-0.4, 0.3}})) {
        CHECK(v >= 8 - 1e-6);
        CHECK(v <= 16 + 1e-6);
    }
}

TEST_CASE("coefficient catalog is symmetric with values in [1, 2]") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-2, 2);
    for (const auto& a : {constant_coefficient(1.5), checkerboard_coefficient(0.3),
                          bump_coefficient(Point{0.0, 0.0}, 0.5)}) {
        for (int i = 0; i < 200; ++i) {
            const Point x{U(rng), U(rng)}, y{U(rng), U(rng)};
            CHECK(a(x, y) == a(y, x));
            CHECK(a(x, y) >= 1);
            CHECK(a(x, y) <= 2);
        }
    }
}

TEST_CASE("symmetry check of symmetric kernels") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::modulated_axes(idx, bump_coefficient(Point{0.0, 0.0}, 0.7));
    const auto s = check_symmetry(K, Box{{-1, -1}, {0, 0}}, Box{{0.2, -1}, {1, 0}});
    CHECK(s.gap <= 1e-10);
}

TEST_CASE("density evaluation") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    CHECK(density_eval(K, Point{0, 0}, 0, 0.5) == doctest::Approx(axis_density(1.5, 0.5)));
    CHECK(axis_density(1.5, 0.5) == doctest::Approx(1.5 * 0.5 * std::pow(0.5, -2.5)));
    CHECK_THROWS_AS((void)density_eval(K, Point{0, 0}, Point{1, 0}), Error);
    const auto I = KernelFamily::isotropic(2, 1.0, constant_coefficient(1.0));
    CHECK_THROWS_AS((void)density_eval(I, Point{0, 0}, Point{0, 0}), Error);
    CHECK(density_eval(I, Point{0, 0}, Point{1, 0}) == doctest::Approx(1.0));
}

TEST_CASE("tail mass of the axes kernel") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    const AnisoRect M(idx, {0, 0}, 1.0);
    double ref = 0;
    for (std::size_t k = 0; k < 2; ++k) ref += 2 * (2 - idx.alpha(k)) * std::pow(M.half_width(k), -idx.alpha(k));
    CHECK(tail_mass(K, Point{0, 0}, M) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("energy comparability of modulated kernels") {
    const AnisotropyIndices idx({1.5, 0.5});
    const AnisoRect r(idx, {0.1, -0.2}, 0.5);
    const Grid g = Grid::spanning({r.lower(0), r.lower(1)}, {r.upper(0), r.upper(1)}, {10, 10});
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<GridFunction> trials;
    for (int t = 0; t < 5; ++t) {
        GridFunction w(g);
        for (auto& v : w.values()) v = U(rng);
        trials.push_back(w);
    }
    trials.emplace_back(g);  // zero energy, skipped
    const auto twice = comparability_estimate(KernelFamily::modulated_axes(idx, constant_coefficient(2.0)), r, trials);
    CHECK(twice.skipped == 1);
    CHECK(twice.lower == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(twice.upper == doctest::Approx(2.0).epsilon(1e-12));
    const auto cb = comparability_estimate(KernelFamily::modulated_axes(idx, checkerboard_coefficient(0.2)), r, trials);
    CHECK(cb.lower >= 1 - 1e-12);
    CHECK(cb.upper <= 2 + 1e-12);
}
