#include "anilap/error.hpp"
#include "anilap/geometry.hpp"
#include "anilap/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace anilap;

TEST_CASE("beta and theta") {
    const AnisotropyIndices idx({1.5, 0.5});
    CHECK(idx.beta() == doctest::Approx(2.0 / 3 + 2).epsilon(1e-15));
    CHECK(idx.theta() == doctest::Approx(2 * idx.beta() / (idx.beta() - 1)).epsilon(1e-15));
    CHECK(idx.alpha_max() == 1.5);
    CHECK(idx.alpha_min() == 0.5);
    const AnisotropyIndices one({1.5});
    CHECK_THROWS_AS((void)one.theta(), Error);
    CHECK_THROWS_AS(AnisotropyIndices({0.0, 1.0}), Error);
    CHECK_THROWS_AS(AnisotropyIndices({2.0}), Error);
}

TEST_CASE("rectangle volume scales like lambda^(alpha_max beta)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> A(0.1, 1.9), L(0.1, 4.0), R(0.05, 1.0);
    for (int t = 0; t < 50; ++t) {
        const AnisotropyIndices idx({A(rng), A(rng), A(rng)});
        const double lam = L(rng), r = R(rng);
        const Point c{0.3, -0.2, 1.0};
        const double ratio = AnisoRect(idx, c, lam * r).volume() / AnisoRect(idx, c, r).volume();
        const double ref = std::pow(lam, idx.alpha_max() * idx.beta());
        CHECK(std::abs(ratio - ref) <= 1e-12 * ref);
    }
}

TEST_CASE("metric balls and rectangles agree") {
    const AnisotropyIndices idx({1.5, 0.5});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    const Point x{0.1, -0.2};
    for (double r : {0.1, 0.5, 0.9}) {
        const AnisoRect M(idx, x, r);
        for (int i = 0; i < 2000; ++i) {
            const Point y{x[0] + U(rng), x[1] + U(rng)};
            CHECK(M.contains(y) == (metric_dist(idx, x, y) < r));
        }
    }
}

TEST_CASE("metric is symmetric and bounded by the Euclidean power") {
    const AnisotropyIndices idx({1.5, 0.5});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (int i = 0; i < 1000; ++i) {
        const Point x{U(rng), U(rng)}, y{U(rng), U(rng)};
        CHECK(metric_dist(idx, x, y) == metric_dist(idx, y, x));
        const double e = std::hypot(x[0] - y[0], x[1] - y[1]);
        CHECK(metric_dist(idx, x, y) <= std::pow(e, idx.alpha_min() / idx.alpha_max()) * (1 + 1e-12));
    }
}

TEST_CASE("scale map maps M_r onto M_{lambda r}") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto S = scale_map(idx, 2.0);
    CHECK(S.determinant() == doctest::Approx(std::pow(2.0, idx.alpha_max() * idx.beta())));
    const auto I = S.compose(S.inverse_map());
    for (double v : I.diagonal()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    const AnisoRect M(idx, {0, 0}, 0.3), M2(idx, {0, 0}, 0.6);
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(S.diagonal()[k] * M.half_width(k) == doctest::Approx(M2.half_width(k)).epsilon(1e-14));
    const Point p{0.1, 0.2};
    const auto q = S.inverse(S.apply(p));
    CHECK(q[0] == doctest::Approx(p[0]));
    CHECK(q[1] == doctest::Approx(p[1]));
}

TEST_CASE("cover reaches every point of the region") {
    const AnisotropyIndices idx({1.5, 0.5});
    const AnisoRect region(idx, {0, 0}, 0.5);
    const auto rects = cover(idx, region, 0.1);
    CHECK(!rects.empty());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int i = 0; i < 500; ++i) {
        const Point y{U(rng) * region.half_width(0), U(rng) * region.half_width(1)};
        bool hit = false;
        for (const auto& r : rects) hit = hit || r.contains(y);
        CHECK(hit);
    }
    CHECK_THROWS_AS((void)cover(idx, region, 0.3), Error);
}

TEST_CASE("radius validation") {
    const AnisotropyIndices idx({1.0});
    CHECK_THROWS_AS(AnisoRect(idx, {0.0}, 0.0), Error);
    CHECK_THROWS_AS(AnisoRect(idx, {0.0}, -1.0), Error);
}

TEST_CASE("stream seeds differ") {
    CHECK(stream_seed(1, 0) != stream_seed(1, 1));
    CHECK(stream_seed(1, 0) != stream_seed(2, 0));
    CHECK(stream_seed(1, 5) == stream_seed(1, 5));
}

TEST_CASE("least squares recovers a line") {
    const auto f = ols({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
}
