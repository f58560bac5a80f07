#include "oracles.hpp"

#include "anilap/error.hpp"
#include "anilap/numerics.hpp"
#include "anilap/stable_mc.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace anilap;

TEST_CASE("alpha = 1 variates follow the standard Cauchy law") {
    const auto s = sample_stable(1.0, 200000, 3);
    for (double xi : {0.5, 1.0, 2.0}) {
        double cf = 0;
        for (double x : s) cf += std::cos(xi * x);
        cf /= static_cast<double>(s.size());
        CHECK(std::abs(cf - std::exp(-xi)) <= 4 / std::sqrt(static_cast<double>(s.size())));
    }
}

TEST_CASE("characteristic function of general variates") {
    for (double a : {0.5, 1.5}) {
        const auto s = sample_stable(a, 200000, 11);
        for (double xi : {0.5, 1.0}) {
            double cf = 0;
            for (double x : s) cf += std::cos(xi * x);
            cf /= static_cast<double>(s.size());
            CHECK(std::abs(cf - std::exp(-std::pow(xi, a))) <= 4 / std::sqrt(static_cast<double>(s.size())));
        }
    }
}

TEST_CASE("Hill estimator recovers the tail index") {
    for (double a : {0.5, 1.0, 1.5}) {
        auto s = sample_stable(a, 400000, 7);
        for (auto& x : s) x = std::abs(x);
        std::sort(s.begin(), s.end(), std::greater<>());
        const std::size_t k = 2000;
        double h = 0;
        for (std::size_t i = 0; i < k; ++i) h += std::log(s[i] / s[k]);
        CHECK(static_cast<double>(k) / h == doctest::Approx(a).epsilon(0.1));
    }
}

TEST_CASE("invalid index is rejected") {
    CHECK_THROWS_AS((void)sample_stable(2.0, 10, 1), Error);
    CHECK_THROWS_AS((void)sample_stable(0.0, 10, 1), Error);
}

TEST_CASE("mean exit time of the unit interval matches the torsion function") {
    const AnisotropyIndices idx({1.0});
    const auto cfg = path_config(idx, 1e-4, 5);
    const auto ex = simulate_exit(cfg, {0.0}, AnisoRect(idx, {0.0}, 1.0), 20000);
    CHECK(ex.censored == 0);
    // Continuous monitoring exits earlier than discrete steps can see; the
    // bias is O(dt^{1/2}) at alpha = 1.
    CHECK(std::abs(ex.mean_time - oracle::torsion(1.0, 0.0)) <= 3 * ex.stderr_time + 0.02);
}

TEST_CASE("whole-space paths are censored at the horizon") {
    const AnisotropyIndices idx({1.0, 1.0});
    const auto cfg = path_config(idx, 1e-2, 1, 50);
    const auto ex = simulate_exit(cfg, {0.0, 0.0}, std::nullopt, 10);
    CHECK(ex.censored == 10);
    CHECK(ex.horizon_warning);
}

TEST_CASE("simulation is reproducible and independent of the worker count") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto cfg = path_config(idx, 1e-3, 42);
    set_jobs(1);
    const auto a = simulate_exit(cfg, {0, 0}, AnisoRect(idx, {0, 0}, 0.5), 500);
    set_jobs(4);
    const auto b = simulate_exit(cfg, {0, 0}, AnisoRect(idx, {0, 0}, 0.5), 500);
    set_jobs(0);
    CHECK(a.times == b.times);
    CHECK(a.mean_time == b.mean_time);
}

TEST_CASE("two-sample KS test") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N(0, 1), M(0.5, 1);
    std::vector<double> x(2000), y(2000), z(2000);
    for (auto& v : x) v = N(rng);
    for (auto& v : y) v = N(rng);
    for (auto& v : z) v = M(rng);
    CHECK(ks_two_sample(x, y).p_value > 0.01);
    CHECK(ks_two_sample(x, z).p_value < 1e-6);
}

TEST_CASE("sign-flip p-value") {
    CHECK(sign_flip_pvalue(std::vector<double>(100, 1.0)) < 1e-6);
    std::vector<double> alt;
    for (int i = 0; i < 100; ++i) alt.push_back(i % 2 ? 1.0 : -1.0);
    CHECK(sign_flip_pvalue(alt) > 0.5);
}

TEST_CASE("multilinear interpolation is exact on bilinear functions") {
    const Grid g = Grid::spanning({0, 0}, {1, 2}, {5, 9});
    const auto u = GridFunction::sample(g, [](const Point& x) { return 1 + 2 * x[0] - x[1] + 3 * x[0] * x[1]; });
    for (const Point& p : {Point{0.33, 1.7}, Point{0.9, 0.1}, Point{0.5, 1.0}})
        CHECK(interpolate(u, p) == doctest::Approx(1 + 2 * p[0] - p[1] + 3 * p[0] * p[1]).epsilon(1e-13));
}
