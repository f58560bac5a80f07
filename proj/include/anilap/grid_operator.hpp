#pragma once

#include "anilap/geometry.hpp"
#include "anilap/grid.hpp"
#include "anilap/kernels.hpp"

#include <functional>
#include <mutex>
#include <vector>

namespace anilap {

// psi(xi) = sum_k |xi_k|^{alpha_k}.
[[nodiscard]] double multiplier(const AnisotropyIndices& idx, const Point& xi);
// m(xi) = sum_k C(alpha_k) |xi_k|^{alpha_k}, the symbol of the axes operator.
[[nodiscard]] double symbol(const AnisotropyIndices& idx, const Point& xi);

// Cell weight for offset j >= 1 at spacing h:
//   W_j = int_{(j-1/2)h}^{(j+1/2)h} alpha (2-alpha) t^{-1-alpha} dt,
// and W_1 additionally carries the near cell (0, h/2) through the curvature
// estimate (u(x+h) - 2u(x) + u(x-h)) / h^2, with a constant that makes the
// whole sum exact on quadratic increments. The correction is dropped when it
// would make W_1 negative (alpha close to 0).
[[nodiscard]] double axis_weight(double alpha, double h, std::size_t j);
[[nodiscard]] std::vector<double> axis_weights(double alpha, double h, std::size_t jmax);
// Weights of a periodic axis with n nodes, folded over all images; entry r
// couples offsets r (mod n) in both directions. Entry 0 is unused.
[[nodiscard]] std::vector<double> periodic_weights(double alpha, double h, std::size_t n);

// Per-axis weight tables for one grid.
class AxisStencil {
public:
    AxisStencil(const KernelFamily& K, const Grid& grid);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const KernelFamily& kernel() const noexcept { return K_; }
    [[nodiscard]] double weight(std::size_t k, std::size_t j) const { return w_[k][j]; }
    // Start of the analytic tail beyond the window, seen from node index i.
    [[nodiscard]] double tail_start(std::size_t k, std::size_t i, int dir) const;

    // (L u)(x) at node `flat`.
    [[nodiscard]] double apply(const GridFunction& u, std::size_t flat) const;

    // Calls fn(neighbour_flat, weight) for every in-window partner of node
    // `flat` along axis k; the weight includes the coefficient a(x, y).
    template <class F>
    void for_each_partner(std::size_t flat, std::size_t k, F&& fn) const;

private:
    KernelFamily K_;
    Grid grid_;
    std::vector<std::vector<double>> w_;
};

// (L u)(x) at an inner node. Boundary-layer nodes of a non-periodic grid throw
// BoundaryStencilError.
[[nodiscard]] double apply_operator(const KernelFamily& K, const GridFunction& u, std::size_t node);
// L u at every inner node; boundary-layer entries are NaN.
[[nodiscard]] GridFunction apply_operator_all(const KernelFamily& K, const GridFunction& u);

// FFTW planning is not thread-safe; every planner call takes this lock.
[[nodiscard]] std::mutex& fftw_plan_lock();

// Inverse DFT of -m(xi) * DFT(u) on a periodic grid.
[[nodiscard]] GridFunction spectral_apply(const AnisotropyIndices& idx, const GridFunction& u);

struct OrderStudy {
    std::vector<double> spacings;
    std::vector<double> errors;
    double order = 0;
    double r2 = 0;
    bool exact = false;  // every error below roundoff
};

// Refinement study of |L_h u(x0) - oracle| on grids spanning x0 +- half_extent;
// `u` also supplies the exterior data. Throws OrderFitUnreliable if the
// errors do not decrease monotonically.
[[nodiscard]] OrderStudy consistency_order(const KernelFamily& K, const std::function<double(const Point&)>& u,
                                           double oracle, const Point& x0,
                                           const std::vector<double>& spacings, double half_extent);

template <class F>
void AxisStencil::for_each_partner(std::size_t flat, std::size_t k, F&& fn) const {
    const std::size_t n = grid_.n(k);
    const std::size_t s = grid_.stride(k);
    const std::size_t i = grid_.index_along(flat, k);
    const std::size_t base = flat - i * s;
    const Coefficient* a = K_.coefficient();
    Point x, y;
    if (a) {
        x = grid_.point(flat);
        y = x;
    }
    auto coeff = [&](std::size_t jn) {
        if (!a) return 1.0;
        y[k] = grid_.coord(k, jn);
        return (*a)(x, y);
    };
    if (grid_.periodic()) {
        for (std::size_t r = 1; r < n; ++r) {
            const std::size_t jn = (i + r) % n;
            fn(base + jn * s, w_[k][r] * coeff(jn));
        }
        return;
    }
    for (std::size_t jn = 0; jn < n; ++jn) {
        if (jn == i) continue;
        const std::size_t off = jn > i ? jn - i : i - jn;
        fn(base + jn * s, w_[k][off] * coeff(jn));
    }
}

} // namespace anilap
