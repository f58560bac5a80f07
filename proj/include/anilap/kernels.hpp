#pragma once

#include "anilap/geometry.hpp"
#include "anilap/grid.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace anilap {

enum class KernelVariant { Axes, IsotropicCoeff, ModulatedAxes };

[[nodiscard]] std::string to_string(KernelVariant v);

class KernelFamily {
public:
    static KernelFamily axes(const AnisotropyIndices& idx);
    static KernelFamily modulated_axes(const AnisotropyIndices& idx, Coefficient a,
                                       bool symmetric = true);
    static KernelFamily isotropic(std::size_t d, double alpha, Coefficient a, bool symmetric = true);

    [[nodiscard]] KernelVariant variant() const noexcept { return variant_; }
    [[nodiscard]] bool is_axes_type() const noexcept { return variant_ != KernelVariant::IsotropicCoeff; }
    // For the isotropic variant every entry equals its single alpha.
    [[nodiscard]] const AnisotropyIndices& indices() const noexcept { return idx_; }
    [[nodiscard]] std::size_t dim() const noexcept { return idx_.dim(); }
    [[nodiscard]] double alpha(std::size_t k) const { return idx_.alpha(k); }
    // Null for the unmodulated axes kernel.
    [[nodiscard]] const Coefficient* coefficient() const noexcept { return coeff_.get(); }
    [[nodiscard]] double coeff(const Point& x, const Point& y) const {
        return coeff_ ? (*coeff_)(x, y) : 1.0;
    }
    [[nodiscard]] bool declared_symmetric() const noexcept { return symmetric_; }

private:
    KernelFamily(KernelVariant v, AnisotropyIndices idx, std::shared_ptr<const Coefficient> c, bool sym)
        : variant_(v), idx_(std::move(idx)), coeff_(std::move(c)), symmetric_(sym) {}

    KernelVariant variant_;
    AnisotropyIndices idx_;
    std::shared_ptr<const Coefficient> coeff_;
    bool symmetric_ = true;
};

// alpha (2 - alpha) |h|^{-1-alpha}.
[[nodiscard]] double axis_density(double alpha, double h);

// Axis-line density at offset h along `axis` (axes variants).
[[nodiscard]] double density_eval(const KernelFamily& K, const Point& x, std::size_t axis, double h);
// d-dimensional density a(x,y)|x-y|^{-d-alpha} (isotropic variant).
[[nodiscard]] double density_eval(const KernelFamily& K, const Point& x, const Point& y);

// Per-x value of int (|x-y|^2 ^ 1) mu(x, dy).
[[nodiscard]] std::vector<double> check_levy_integrability(const KernelFamily& K,
                                                           const std::vector<Point>& xs,
                                                           double cap = 1e8);

struct Box {
    Point lo, hi;
};

struct SymmetryCheck {
    double lhs = 0;  // int_A int_B mu(x, dy) dx
    double rhs = 0;  // int_B int_A mu(x, dy) dx
    double gap = 0;  // |lhs - rhs| / max(|lhs|, |rhs|)
};

[[nodiscard]] SymmetryCheck check_symmetry(const KernelFamily& K, const Box& A, const Box& B,
                                           std::size_t points_per_axis = 24);

struct Comparability {
    double lower = 0, upper = 0;
    std::vector<double> ratios;
    std::size_t skipped = 0;
    std::string note;
};

// Empirical interval of E^K_rect(w,w) / E^{axes}_rect(w,w) over the trial set.
// Evidence only: a finite trial set cannot certify the comparability bound.
[[nodiscard]] Comparability comparability_estimate(const KernelFamily& K, const AnisoRect& rect,
                                                   const std::vector<GridFunction>& trials);

// mu(x, R^d \ rect).
[[nodiscard]] double tail_mass(const KernelFamily& K, const Point& x, const AnisoRect& rect);

// Coefficient catalog. All are symmetric with values in [1, 2].
[[nodiscard]] Coefficient constant_coefficient(double c);
[[nodiscard]] Coefficient checkerboard_coefficient(double cell);
[[nodiscard]] Coefficient bump_coefficient(Point center, double width);

} // namespace anilap
