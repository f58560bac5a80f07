#pragma once

#include "anilap/geometry.hpp"
#include "anilap/grid.hpp"
#include "anilap/grid_operator.hpp"
#include "anilap/kernels.hpp"

#include <optional>
#include <vector>

namespace anilap {

// Double-sum quadrature of int_Omega int_Omega (u(y)-u(x))(v(y)-v(x)) mu(x,dy) dx.
// With no rectangle the integral runs over all of R^d: every window node plus
// the analytic tails beyond the window.
[[nodiscard]] double energy_form(const KernelFamily& K, const std::optional<AnisoRect>& omega,
                                 const GridFunction& u, const GridFunction& v);

struct Norms {
    double v_seminorm2 = 0;  // int_Omega int_{R^d} (u(x)-u(y))^2 mu(x,dy) dx
    double h_norm2 = 0;      // ||u||^2_{L^2(Omega)} + int_{R^d} int_{R^d} (u(y)-u(x))^2 mu(x,dy) dx
    double l2_norm2 = 0;
    double tail_error = 0;   // neglected far-field mass for callable exterior data
};

// The H-norm requires u == 0 outside Omega (SupportViolation otherwise).
[[nodiscard]] Norms norms(const KernelFamily& K, const AnisoRect& omega, const GridFunction& u);

// 2 * (cell volume / N) * sum_xi m(xi) |DFT(u)(xi)|^2 on a periodic grid.
[[nodiscard]] double fourier_energy(const AnisotropyIndices& idx, const GridFunction& u);

struct CutoffSpec {
    Point center;
    double r = 0.5;
    double lambda = 1.5;
};

// sum_k (lambda^{alpha_max/alpha_k} - 1)^{-alpha_k}
[[nodiscard]] double cutoff_sum(const AnisotropyIndices& idx, double lambda);
// 2 / ((lambda^{alpha_max/alpha_k} - 1) r^{alpha_max/alpha_k})
[[nodiscard]] double cutoff_slope_bound(const AnisotropyIndices& idx, const CutoffSpec& spec, std::size_t k);

// One-axis profile: a trapezoid that is 1 on |s| <= inner + h/2, 0 on
// |s| >= outer - h/2, linear between, averaged over a window of width h.
// The result is C^1, equals 1 on |s| <= inner and 0 on |s| >= outer.
[[nodiscard]] double cutoff_profile(double s, double inner, double outer, double h);
// Product of per-axis profiles with the mollification widths h_k.
[[nodiscard]] double cutoff_at(const AnisotropyIndices& idx, const CutoffSpec& spec,
                               const std::vector<double>& h, const Point& x);

// Throws WindowError if a ramp is shorter than two cells or the grid does
// not reach past M_{lambda r}.
[[nodiscard]] GridFunction build_cutoff(const AnisotropyIndices& idx, const CutoffSpec& spec, const Grid& grid);

// x -> int (tau(y) - tau(x))^2 mu(x, dy) at one node; tau vanishes beyond the window.
[[nodiscard]] double carre_du_champ(const AxisStencil& st, const GridFunction& tau, std::size_t node);

struct CutoffBounds {
    double measured_sup = 0;
    double bound = 0;        // 8 r^{-alpha_max} cutoff_sum
    std::size_t argmax = 0;
    bool flagged = false;    // measured within 5% of the bound
};

[[nodiscard]] CutoffBounds cutoff_bounds(const KernelFamily& K, const CutoffSpec& spec, const GridFunction& tau);

struct QuadratCheck {
    double lhs = 0;         // int_{M_lr} int_{M_lr^c} u^2 tau^2 mu(x,dy) dx
    double base = 0;        // r^{-alpha_max} cutoff_sum ||u||^2_{L^2(M_lr)}
    double measured_c = 0;  // lhs / base
};

[[nodiscard]] QuadratCheck quadrat_check(const KernelFamily& K, const CutoffSpec& spec, const GridFunction& tau,
                                         const GridFunction& u);

} // namespace anilap
