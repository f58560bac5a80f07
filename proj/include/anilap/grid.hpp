#pragma once

#include "anilap/geometry.hpp"
#include "anilap/numerics.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <variant>
#include <vector>

namespace anilap {

// Symmetric coefficient a(x, y); values are expected in [1, 2].
using Coefficient = std::function<double(const Point&, const Point&)>;

// Uniform tensor grid. Node i on axis k sits at lo_k + i h_k. A periodic grid
// wraps every axis with period n_k h_k.
class Grid {
public:
    Grid(std::vector<double> lo, std::vector<double> h, std::vector<std::size_t> n,
         bool periodic = false);

    // n_k nodes per axis, first node at lo_k and last at hi_k.
    static Grid spanning(const Point& lo, const Point& hi, const std::vector<std::size_t>& n);
    // n_k nodes per axis on [lo_k, lo_k + length_k), periodic.
    static Grid periodic_box(const Point& lo, const std::vector<double>& length,
                             const std::vector<std::size_t>& n);

    [[nodiscard]] std::size_t dim() const noexcept { return n_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::size_t n(std::size_t k) const { return n_.at(k); }
    [[nodiscard]] double h(std::size_t k) const { return h_.at(k); }
    [[nodiscard]] double lo(std::size_t k) const { return lo_.at(k); }
    [[nodiscard]] double hi(std::size_t k) const {
        return lo_.at(k) + h_.at(k) * static_cast<double>(n_.at(k) - 1);
    }
    [[nodiscard]] bool periodic() const noexcept { return periodic_; }
    [[nodiscard]] std::size_t stride(std::size_t k) const { return stride_.at(k); }
    [[nodiscard]] double cell_volume() const noexcept;
    [[nodiscard]] double coord(std::size_t k, std::size_t i) const {
        return lo_[k] + h_[k] * static_cast<double>(i);
    }
    [[nodiscard]] std::size_t index_along(std::size_t flat, std::size_t k) const {
        return (flat / stride_[k]) % n_[k];
    }
    [[nodiscard]] Point point(std::size_t flat) const;
    [[nodiscard]] std::size_t flat(const std::vector<std::size_t>& multi) const;
    // Largest extent of the represented window.
    [[nodiscard]] double truncation_radius() const noexcept;
    // True if the node has a neighbour on both sides of every axis.
    [[nodiscard]] bool is_inner(std::size_t flat) const;
    [[nodiscard]] bool same_layout(const Grid& other) const noexcept;

private:
    std::vector<double> lo_, h_;
    std::vector<std::size_t> n_, stride_;
    std::size_t size_ = 0;
    bool periodic_ = false;
};

struct ZeroExterior {};

struct ConstantExterior {
    double value = 0.0;
};

// Value `height` on {y : lo <= y_axis <= hi, |y_j - center_j| <= half_width_j, j != axis}.
struct AxisBump {
    std::size_t axis = 0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double height = 1.0;
    Point center;
    std::vector<double> half_width;
};

// Sum of axis bumps.
struct BumpExterior {
    std::vector<AxisBump> bumps;
};

struct CallableExterior {
    std::function<double(const Point&)> g;
};

using ExteriorPolicy = std::variant<ZeroExterior, ConstantExterior, BumpExterior, CallableExterior>;

[[nodiscard]] double exterior_value(const ExteriorPolicy& p, const Point& y);
[[nodiscard]] bool piecewise_constant(const ExteriorPolicy& p) noexcept;
// Policy of max(-g, 0).
[[nodiscard]] ExteriorPolicy negative_part(const ExteriorPolicy& p);

// Moments over the ray y(t) = x + dir t e_axis, t >= T, against the axis density
// rho(t) = alpha (2 - alpha) t^{-1-alpha} times the optional coefficient a(x, y):
// m0 = int a rho, m1 = int a g rho, m2 = int a g^2 rho.
struct TailMoments {
    double m0 = 0, m1 = 0, m2 = 0;
    double truncation = 0;  // bound on the neglected far mass for callable data
};

[[nodiscard]] TailMoments tail_moments(const ExteriorPolicy& p, const Point& x, std::size_t axis,
                                       int dir, double T, double alpha, const Coefficient* a);

// int_T^inf alpha (2 - alpha) t^{-1-alpha} dt.
[[nodiscard]] inline double axis_tail_mass(double alpha, double T) {
    return (2 - alpha) * std::pow(T, -alpha);
}

class GridFunction {
public:
    GridFunction(Grid grid, ExteriorPolicy exterior = ZeroExterior{});
    GridFunction(Grid grid, std::vector<double> values, ExteriorPolicy exterior = ZeroExterior{});

    static GridFunction sample(const Grid& grid, const std::function<double(const Point&)>& f,
                               ExteriorPolicy exterior = ZeroExterior{});

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::vector<double>& values() noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double& operator[](std::size_t i) { return values_[i]; }
    [[nodiscard]] const ExteriorPolicy& exterior() const noexcept { return exterior_; }
    void set_exterior(ExteriorPolicy p) { exterior_ = std::move(p); }
    // Overwrites every node outside `omega` with the exterior policy value.
    void fill_exterior(const AnisoRect& omega);

private:
    Grid grid_;
    std::vector<double> values_;
    ExteriorPolicy exterior_;
};

// Flat indices of the grid nodes strictly inside the rectangle.
[[nodiscard]] std::vector<std::size_t> nodes_in(const Grid& grid, const AnisoRect& r);

} // namespace anilap
