#include "oracles.hpp"

#include "anilap/error.hpp"
#include "anilap/harness.hpp"
#include "anilap/solver.hpp"
#include "anilap/stable_mc.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace anilap;

namespace {

DirichletProblem problem(const KernelFamily& K, const Grid& g, const AnisoRect& omega, double fval,
                         ExteriorPolicy ext) {
    GridFunction f(g);
    for (auto& v : f.values()) v = fval;
    GridFunction gg(g, std::move(ext));
    gg.fill_exterior(omega);
    return {K, omega, f, gg};
}

} // namespace

TEST_CASE("torsion converges to the closed form") {
    // -L u = 1 on (-1, 1): the discrete system (-2 L_h) u = 2.
    for (double a : {0.5, 1.0, 1.5}) {
        const AnisotropyIndices idx({a});
        const auto K = KernelFamily::axes(idx);
        const AnisoRect omega(idx, {0.0}, 1.0);
        std::vector<double> vals;
        for (std::size_t cells : {128, 256, 512}) {
            const Grid g = vertex_grid(omega, {cells}, 1);
            const auto s = solve_dirichlet(problem(K, g, omega, 2.0, ZeroExterior{}), 1e-10);
            CHECK(s.converged);
            vals.push_back(interpolate(s.u, {0.0}));
        }
        // Richardson extrapolation with the boundary-layer rate h^{alpha/2}.
        const double q = std::pow(2.0, a / 2);
        const double rich = (q * vals[2] - vals[1]) / (q - 1);
        const double exact = oracle::torsion(a, 0.0);
        CAPTURE(a);
        CHECK(std::abs(vals[2] - exact) < std::abs(vals[0] - exact));
        CHECK(std::abs(rich - exact) <= 0.01 * exact);
    }
}

TEST_CASE("constants are harmonic") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    const AnisoRect omega(idx, {0, 0}, 1.0);
    const Grid g = vertex_grid(omega, {32, 32}, 1);
    const auto s = solve_dirichlet(problem(K, g, omega, 0.0, ConstantExterior{3.0}), 1e-13);
    for (double v : s.u.values()) CHECK(std::abs(v - 3.0) <= 1e-11);
}

TEST_CASE("linearity in the data") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::modulated_axes(idx, checkerboard_coefficient(0.5));
    const AnisoRect omega(idx, {0, 0}, 1.0);
    const Grid g = vertex_grid(omega, {24, 24}, 1);
    const AxisBump b{0, 1.2, 2.0, 1.0, {0, 0}, {0, 0.5}};
    const auto s1 = solve_dirichlet(problem(K, g, omega, 1.0, ZeroExterior{}), 1e-13);
    const auto s2 = solve_dirichlet(problem(K, g, omega, 0.0, BumpExterior{{b}}), 1e-13);
    AxisBump b3 = b;
    b3.height = -2.0;
    const auto s3 = solve_dirichlet(problem(K, g, omega, 3.0, BumpExterior{{b3}}), 1e-13);
    for (std::size_t i : nodes_in(g, omega)) CHECK(s3.u[i] == doctest::Approx(3 * s1.u[i] - 2 * s2.u[i]).epsilon(1e-9));
}

TEST_CASE("maximum and comparison principles on random problems") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-1, 1), H(0.1, 2.0), A(0.4, 1.8);
    for (int t = 0; t < 12; ++t) {
        const AnisotropyIndices idx({A(rng), A(rng)});
        const auto K = KernelFamily::axes(idx);
        const AnisoRect omega(idx, {0, 0}, 1.0);
        const Grid g = vertex_grid(omega, {20, 20}, 1);
        const double h1 = H(rng) * (U(rng) > 0 ? 1 : -1), c = U(rng);
        const AxisBump b{static_cast<std::size_t>(t % 2), 1.1, 3.0, h1, {0, 0}, {0.6, 0.6}};
        BumpExterior ext{{b}};
        const auto s = solve_dirichlet(problem(K, g, omega, 0.0, ext), 1e-12);
        const double lo = std::min(0.0, h1), hi = std::max(0.0, h1);
        for (std::size_t i : nodes_in(g, omega)) {
            CHECK(s.u[i] >= lo - 1e-10);
            CHECK(s.u[i] <= hi + 1e-10);
        }
        // f >= 0 and larger exterior data give a larger solution.
        AxisBump b2 = b;
        b2.height = h1 + 0.5;
        const auto s2 = solve_dirichlet(problem(K, g, omega, std::abs(c), BumpExterior{{b2}}), 1e-12);
        for (std::size_t i : nodes_in(g, omega)) CHECK(s2.u[i] >= s.u[i] - 1e-10);
    }
}

TEST_CASE("weak defect of the solver output") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    const AnisoRect omega(idx, {0, 0}, 1.0);
    const Grid g = vertex_grid(omega, {32, 32}, 1);
    const double tol = 1e-10;
    const auto p = problem(K, g, omega, 1.0, ConstantExterior{0.5});
    const auto s = solve_dirichlet(p, tol);
    const auto wd = verify_weak_solution(K, omega, s.u, p.f);
    CHECK(wd.tested == nodes_in(g, omega).size());
    CHECK(wd.relative <= 10 * tol);
    // A perturbed function fails the same test.
    auto bad = s.u;
    bad[nodes_in(g, omega)[5]] += 0.1;
    CHECK(verify_weak_solution(K, omega, bad, p.f).relative > 1e-3);
}

TEST_CASE("test functions must live in the domain") {
    const AnisotropyIndices idx({1.0, 1.0});
    const auto K = KernelFamily::axes(idx);
    const AnisoRect omega(idx, {0, 0}, 1.0);
    const Grid g = vertex_grid(omega, {16, 16}, 1);
    const GridFunction u(g), f(g);
    GridFunction phi(g);
    phi[0] = 1.0;
    const std::vector<GridFunction> phis{phi};
    CHECK_THROWS_AS((void)verify_weak_solution(K, omega, u, f, &phis), Error);
}

TEST_CASE("solver refuses a domain that touches the window edge") {
    const AnisotropyIndices idx({1.0});
    const auto K = KernelFamily::axes(idx);
    const AnisoRect omega(idx, {0.0}, 1.0);
    const Grid g = Grid::spanning({-0.95}, {0.95}, {20});
    CHECK_THROWS_AS((void)solve_dirichlet(problem(K, g, omega, 1.0, ZeroExterior{})), Error);
}

TEST_CASE("supersolution certificate") {
    const AnisotropyIndices idx({1.5, 0.5});
    const auto K = KernelFamily::axes(idx);
    const AnisoRect omega(idx, {0, 0}, 1.0);
    const Grid g = vertex_grid(omega, {24, 24}, 0);
    const auto s = make_supersolution(problem(K, g, omega, 0.0, ConstantExterior{0.2}), 1.0, 1e-12);
    CHECK(s.solution.converged);
    CHECK(s.certificate > 0);
    for (std::size_t i : nodes_in(g, omega)) CHECK(s.solution.u[i] >= 0.2 - 1e-10);
}

TEST_CASE("weak defect with a discontinuous coefficient and bump data") {
    const AnisotropyIndices idx({0.4, 1.2});
    const auto K = KernelFamily::modulated_axes(idx, checkerboard_coefficient(0.37));
    const AnisoRect omega(idx, {0, 0}, 1.0);
    const Grid g = vertex_grid(omega, {24, 24}, 1);
    const AxisBump b1{0, 1.3, 3.0, 1.5, {0, 0}, {0, 0.8}};
    const AxisBump b2{1, -3.0, -1.6, -0.7, {0, 0}, {1.1, 0}};
    const double tol = 1e-10;
    const auto p = problem(K, g, omega, 0.0, BumpExterior{{b1, b2}});
    const auto s = solve_dirichlet(p, tol);
    CHECK(verify_weak_solution(K, omega, s.u, p.f).relative <= 10 * tol);
}
