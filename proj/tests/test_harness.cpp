#include "oracles.hpp"

#include "anilap/error.hpp"
#include "anilap/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace anilap;

TEST_CASE("grid helpers") {
    const AnisotropyIndices idx({1.5, 0.5});
    const AnisoRect r(idx, {0, 0}, 0.5);
    const Grid c = cell_centred(r, {8, 8});
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(r.contains(c.point(i)));
    const Grid v = vertex_grid(r, {8, 8}, 1);
    CHECK(v.n(0) == 11);
    CHECK(nodes_in(v, r).size() == 49);
    CHECK(v.coord(0, 1) == doctest::Approx(r.lower(0)));
    const Grid p = padded(r, {8, 8}, 2);
    CHECK(p.n(1) == 12);
    CHECK(nodes_in(p, r).size() == 64);
}

TEST_CASE("sublevel measure against the exact volume") {
    for (const auto& al : std::vector<std::vector<double>>{{1.5, 0.5}, {1.0, 1.0}}) {
        const AnisotropyIndices idx(al);
        const auto m = weak_tail_measure(idx, {1.0, 0.5, 0.25});
        for (std::size_t i = 0; i < m.ts.size(); ++i) {
            const double ex = oracle::sublevel_volume(al, 1 / (m.ts[i] * m.ts[i]));
            CHECK(m.measures[i] == doctest::Approx(ex).epsilon(1e-4));
        }
        CHECK(std::abs(m.fit.slope + 2 * idx.beta()) <= 0.15);
    }
}

TEST_CASE("Sobolev ratio is invariant under the anisotropic scaling") {
    const AnisotropyIndices idx({1.5, 0.5});
    const Point c{0.05, -0.02};
    const std::vector<double> w{0.6, 0.8};
    const auto sweep = sobolev_scale_sweep(
        idx, [&](const Point& x) { return poly_bump(x, c, w); }, {0.65, 0.82}, {0.5, 1, 2, 4}, 48);
    CHECK(sweep.drift < 0.05);
    CHECK_THROWS_AS((void)sobolev_check(AnisotropyIndices({1.5}), {}), Error);
}

TEST_CASE("Poincare ratio scales like r^alpha_max") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    const std::vector<Pattern> patterns{
        [](const Point& x, const AnisoRect&) { return x[0]; },
        [](const Point& x, const AnisoRect& r) { return (x[1] - r.center()[1]) / r.half_width(1); },
        [](const Point& x, const AnisoRect& r) {
            return std::cos(3 * (x[0] - r.center()[0]) / r.half_width(0)) * ((x[1] - r.center()[1]) / r.half_width(1));
        }};
    for (const auto& p : patterns) {
        const auto res = poincare_check(K, p, {0.1, 0.2}, {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2}, 16);
        CHECK(std::abs(res.fit.slope - idx.alpha_max()) <= 0.1);
    }
    CHECK_THROWS_AS((void)poincare_check(K, patterns[0], {0, 0}, {2.0}, 8), Error);
}

TEST_CASE("log moment is invariant under u -> c u") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    const Grid g = cell_centred(AnisoRect(idx, {0, 0}, 1.0), {16, 16});
    const auto u = GridFunction::sample(g, [](const Point& x) { return 1 + x[0] * x[0] + 0.5 * std::sin(3 * x[1]); });
    GridFunction v = u;
    for (auto& x : v.values()) x *= 7.5;
    const AnisoRect r(idx, {0, 0}, 0.7);
    CHECK(log_moment_lhs(K, v, r) == doctest::Approx(log_moment_lhs(K, u, r)).epsilon(1e-12));
    GridFunction c(g);
    for (auto& x : c.values()) x = 2.0;
    CHECK(log_moment_lhs(K, c, r) == 0.0);
    GridFunction neg = u;
    neg[g.flat({8, 8})] = -1;
    CHECK_THROWS_AS((void)log_moment_lhs(K, neg, r), Error);
}

TEST_CASE("Moser sequence of a constant") {
    const AnisotropyIndices idx({1.5, 0.5});
    const Grid g = cell_centred(AnisoRect(idx, {0, 0}, 1.0), {32, 32});
    GridFunction u(g);
    for (auto& x : u.values()) x = 2.5;
    const auto t = moser_sequence(u, idx, {0, 0}, 0.4, 0.1, 6);
    CHECK(t.steps.size() == 7);
    for (const auto& s : t.steps) CHECK(s.value == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(t.ratio == doctest::Approx(1.0));
    CHECK(t.inf_u == 2.5);
}

TEST_CASE("Moser sequence grows with the exponent") {
    const AnisotropyIndices idx({1.5, 0.5});
    const Grid g = cell_centred(AnisoRect(idx, {0, 0}, 1.0), {32, 32});
    const auto u = GridFunction::sample(g, [](const Point& x) { return 1 + x[0] * x[0] + x[1] * x[1]; });
    const auto t = moser_sequence(u, idx, {0, 0}, 0.4, 0.1, 6);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        CHECK(t.steps[i].value >= t.inf_u * (1 - 1e-12));
        if (i > 0) CHECK(t.steps[i].p > t.steps[i - 1].p);
    }
}

TEST_CASE("flip product of a constant is one and grows with the spread") {
    const AnisotropyIndices idx({1.5, 0.5});
    const Grid g = cell_centred(AnisoRect(idx, {0, 0}, 1.0), {16, 16});
    GridFunction c(g);
    for (auto& x : c.values()) x = 4.0;
    const AnisoRect r(idx, {0, 0}, 0.8);
    CHECK(flip_product(c, r, 0.2) == 1.0);
    const auto u = GridFunction::sample(g, [](const Point& x) { return std::exp(x[0]); });
    const auto v = GridFunction::sample(g, [](const Point& x) { return std::exp(3 * x[0]); });
    CHECK(flip_product(u, r, 0.2) >= 1.0);
    CHECK(flip_product(v, r, 0.2) > flip_product(u, r, 0.2));
}

TEST_CASE("weak Harnack scan on a small family") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    const Grid g = vertex_grid(AnisoRect(idx, {0, 0}, 1.0), {32, 32}, 0);
    const auto fam = harnack_family(K, g, 8, 3);
    std::vector<HarnackTerms> terms;
    for (const auto& s : fam) {
        CHECK(s.certificate >= -1e-6);
        terms.push_back(harnack_terms(s, 3.0));
    }
    const auto scan = weak_harnack_check(terms, {0.1, 0.3});
    CHECK(scan.best_c > 0);
    for (double d : scan.deficits) CHECK(d <= 1e-12);
    // Monotonicity of the terms: a larger c only increases every deficit.
    for (const auto& t : terms)
        CHECK(harnack_deficit(t, 2 * scan.best_c, scan.best_p0) >= harnack_deficit(t, scan.best_c, scan.best_p0));
    CHECK_THROWS_AS((void)harnack_terms(fam[0], 2.0), Error);
}

TEST_CASE("theory delta identity") {
    for (double c : {1.0, 2.0, 5.0})
        for (double p : {0.05, 0.1, 0.5})
            for (double th : {2.0, 8.0}) {
                const auto t = theory_delta(c, p, th);
                CHECK(t.kappa == doctest::Approx(1 / (2 * c * std::pow(2.0, 1 / p))).epsilon(1e-15));
                CHECK(t.delta > 0);
                CHECK(t.identity_residual <= 1e-15);
            }
}

TEST_CASE("oscillation decay on a Hoelder profile") {
    const AnisotropyIndices idx({1.5, 0.5});
    const Grid g = cell_centred(AnisoRect(idx, {0, 0}, 1.0), {513, 65});
    // |x_1|^{1/2} has metric-oscillation r^{alpha_max/(2 alpha_1)} = r^{1/2} on M_r.
    const auto u = GridFunction::sample(g, [](const Point& x) { return std::sqrt(std::abs(x[0])); });
    const auto od = oscillation_decay(u, idx, {0, 0}, 1.0, 2.0, 6);
    CHECK(od.delta == doctest::Approx(0.5).epsilon(0.05));
    GridFunction c(g);
    CHECK(oscillation_decay(c, idx, {0, 0}, 1.0, 2.0).exact);
}

TEST_CASE("Hoelder fit of a linear function") {
    const AnisotropyIndices idx({1.5, 0.5});
    const Grid g = cell_centred(AnisoRect(idx, {0, 0}, 1.0), {64, 64});
    const auto u = GridFunction::sample(g, [](const Point& x) { return x[0]; });
    const auto h = holder_fit(u, idx, AnisoRect(idx, {0, 0}, 0.5), 0.0, 4000, 1);
    CHECK(h.gauge_ok);
    CHECK(h.per_axis[0].slope == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("elementary inequality suite") {
    const auto s = elementary_inequality_suite(100000, 5);
    CHECK(s.feasible);
    CHECK(s.tightest.c1 > 0);
    CHECK(s.tightest.c2 <= 100);
    for (std::size_t i = 1; i < s.frontier.size(); ++i) CHECK(s.frontier[i].c2 <= s.frontier[i - 1].c2);
}

TEST_CASE("interpolation inequality") {
    const AnisotropyIndices idx({1.5, 0.5});
    const Grid g = cell_centred(AnisoRect(idx, {0, 0}, 1.0), {20, 20});
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> E(1.0);
    GridFunction f(g);
    for (auto& v : f.values()) v = E(rng);
    for (double a : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        const auto ic = interpolation_check(f, idx.beta(), 3.5, a);
        CHECK(ic.lhs <= ic.rhs * (1 + 1e-12));
    }
    CHECK_THROWS_AS((void)interpolation_check(f, idx.beta(), 2.0, 1.0), Error);
}
