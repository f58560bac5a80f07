#pragma once

// Reference computations that do not go through the library's closed forms
// or stencil code.

#include "anilap/grid.hpp"
#include "anilap/kernels.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace oracle {

using anilap::Point;

// alpha (2 - alpha) int_R (1 - cos t) |t|^{-1-alpha} dt by quadrature.
inline double symbol_constant(double alpha) {
    const double p = 1 + alpha;
    boost::math::quadrature::tanh_sinh<double> ts;
    const double near = ts.integrate([&](double t) { 
        if (t < 1e-6) return 0.5 * std::pow(t, 1 - alpha);
        const double s = std::sin(t / 2);
        return 2 * s * s * std::pow(t, -p);
    },
                                     0.0, 1.0);
    // int_1^inf t^{-p} dt minus the oscillatory part, period by period up to 2 pi N.
    const std::size_t periods = 4000;
    double osc = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double t) { return std::cos(t) * std::pow(t, -p); }, 1.0, 2 * std::numbers::pi, 0, 0);
    for (std::size_t m = 1; m < periods; ++m) {
        const double a = 2 * std::numbers::pi * static_cast<double>(m);
        osc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double t) { return std::cos(t) * std::pow(t, -p); }, a, a + 2 * std::numbers::pi, 0, 0);
    }
    // Remainder by two integrations by parts at T = 2 pi N, where sin T = 0.
    const double T = 2 * std::numbers::pi * static_cast<double>(periods);
    osc += p * std::pow(T, -p - 1);
    const double far = 1 / alpha - osc;
    return alpha * (2 - alpha) * 2 * (near + far);
}

// sum_j [ int_{j-1/2}^{j+1/2} s^{1-a} ds - j^2 int_{j-1/2}^{j+1/2} s^{-1-a} ds ], by direct summation
// with the leading-order remainder.
inline double near_cell_kappa(double a) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const std::size_t J = 100000;
    double sum = 0, comp = 0;
    for (std::size_t j = J; j >= 1; --j) {
        const double jd = static_cast<double>(j);
        const double term = GL::integrate(
            [&](double u) { return (2 * jd * u + u * u) * std::pow(jd + u, -1 - a); }, -0.5, 0.5);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum += -(1 + 2 * a) / (12 * a) * std::pow(static_cast<double>(J) + 0.5, -a);
    return sum;
}

// Cell weight of offset j at spacing h, assembled from first principles.
inline double cell_weight(double alpha, double h, std::size_t j, double kappa) {
    using GL = boost::math::quadrature::gauss<double, 30>;
    const double jd = static_cast<double>(j);
    const double rho = alpha * (2 - alpha);
    double w = rho * GL::integrate([&](double s) { return std::pow(s, -1 - alpha); }, jd - 0.5, jd + 0.5);
    if (j == 1) {
        boost::math::quadrature::tanh_sinh<double> ts;
        const double near = rho * ts.integrate([&](double s) { return std::pow(s, 1 - alpha); }, 0.0, 0.5);
        const double corr = rho * kappa;
        w += (w + near + corr > 0) ? near + corr : near;
    }
    return w * std::pow(h, -alpha);
}

// O(N^2) energy of the axes kernel with zero exterior data: every ordered
// node pair that differs along exactly one axis, plus the analytic far tails
// when `omega` is absent.
inline double energy(const anilap::KernelFamily& K, const std::optional<anilap::AnisoRect>& omega,
                     const anilap::GridFunction& u, const anilap::GridFunction& v) {
    const auto& g = u.grid();
    const std::size_t d = g.dim();
    std::vector<double> kappas(d);
    for (std::size_t k = 0; k < d; ++k) kappas[k] = near_cell_kappa(K.alpha(k));
    auto inside = [&](std::size_t i) { return !omega || omega->contains(g.point(i)); };
    long double total = 0;
    for (std::size_t x = 0; x < g.size(); ++x) {
        if (!inside(x)) continue;
        const Point px = g.point(x);
        for (std::size_t y = 0; y < g.size(); ++y) {
            if (y == x || !inside(y)) continue;
            std::size_t axis = d, differ = 0, off = 0;
            for (std::size_t k = 0; k < d; ++k) {
                const std::size_t a = g.index_along(x, k), b = g.index_along(y, k);
                if (a != b) {
                    ++differ;
                    axis = k;
                    off = a > b ? a - b : b - a;
                }
            }
            if (differ != 1) continue;
            const double w = cell_weight(K.alpha(axis), g.h(axis), off, kappas[axis]) * K.coeff(px, g.point(y));
            total += static_cast<long double>(w) * (u[y] - u[x]) * (v[y] - v[x]);
        }
        if (omega) continue;
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t i = g.index_along(x, k);
            for (double cells : {static_cast<double>(i), static_cast<double>(g.n(k) - 1 - i)}) {
                const double T = (cells + 0.5) * g.h(k);
                total += 2.0L * u[x] * v[x] * (2 - K.alpha(k)) * std::pow(T, -K.alpha(k));
            }
        }
    }
    return static_cast<double>(total * g.cell_volume());
}

// |{xi : sum_k |xi_k|^{alpha_k} <= s}|.
inline double sublevel_volume(const std::vector<double>& alpha, double s) {
    double num = 1, beta = 0;
    for (double a : alpha) {
        num *= 2 * std::tgamma(1 + 1 / a);
        beta += 1 / a;
    }
    return num / std::tgamma(1 + beta) * std::pow(s, beta);
}

// Torsion function of -L on (-1, 1) for the 1-d axis kernel: -L u = 1 inside, u = 0 outside.
inline double torsion(double alpha, double x) {
    const double c = std::tgamma(0.5) /
                     (std::pow(2.0, alpha) * std::tgamma(1 + alpha / 2) * std::tgamma(0.5 + alpha / 2));
    return c / symbol_constant(alpha) * std::pow(1 - x * x, alpha / 2);
}

} // namespace oracle
