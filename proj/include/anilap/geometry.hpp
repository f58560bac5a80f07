#pragma once

#include "anilap/numerics.hpp"

#include <cstddef>
#include <vector>

namespace anilap {

class AnisotropyIndices {
public:
    explicit AnisotropyIndices(std::vector<double> alphas);

    [[nodiscard]] std::size_t dim() const noexcept { return alphas_.size(); }
    [[nodiscard]] double alpha(std::size_t k) const { return alphas_.at(k); }
    [[nodiscard]] const std::vector<double>& alphas() const noexcept { return alphas_; }
    [[nodiscard]] double alpha_max() const noexcept { return amax_; }
    [[nodiscard]] double alpha_min() const noexcept { return amin_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    // Throws SobolevExponentUndefined when beta <= 1.
    [[nodiscard]] double theta() const;
    // alpha_max / alpha_k, the per-axis scaling exponent.
    [[nodiscard]] double exponent(std::size_t k) const { return amax_ / alphas_.at(k); }

private:
    std::vector<double> alphas_;
    double amax_ = 0, amin_ = 0, beta_ = 0;
};

struct BetaTheta {
    double beta;
    double theta;
};

[[nodiscard]] BetaTheta beta_theta(const AnisotropyIndices& idx);

[[nodiscard]] double metric_dist(const AnisotropyIndices& idx, const Point& x, const Point& y);

// Open rectangle M_r(center) with half-widths r^{alpha_max/alpha_k}.
class AnisoRect {
public:
    AnisoRect(const AnisotropyIndices& idx, Point center, double r);

    [[nodiscard]] const Point& center() const noexcept { return center_; }
    [[nodiscard]] double radius() const noexcept { return r_; }
    [[nodiscard]] const std::vector<double>& half_widths() const noexcept { return hw_; }
    [[nodiscard]] double half_width(std::size_t k) const { return hw_.at(k); }
    [[nodiscard]] std::size_t dim() const noexcept { return hw_.size(); }
    [[nodiscard]] bool contains(const Point& y) const;
    [[nodiscard]] double volume() const noexcept;
    [[nodiscard]] double lower(std::size_t k) const { return center_.at(k) - hw_.at(k); }
    [[nodiscard]] double upper(std::size_t k) const { return center_.at(k) + hw_.at(k); }

private:
    Point center_;
    double r_;
    std::vector<double> hw_;
};

[[nodiscard]] AnisoRect rect(const AnisotropyIndices& idx, const Point& center, double r);

// Diagonal map x -> diag(lambda^{alpha_max/alpha_k}) x.
class ScaleMap {
public:
    explicit ScaleMap(std::vector<double> diag) : diag_(std::move(diag)) {}

    [[nodiscard]] Point apply(const Point& x) const;
    [[nodiscard]] Point inverse(const Point& x) const;
    [[nodiscard]] ScaleMap compose(const ScaleMap& other) const;
    [[nodiscard]] ScaleMap inverse_map() const;
    [[nodiscard]] double determinant() const noexcept;
    [[nodiscard]] const std::vector<double>& diagonal() const noexcept { return diag_; }

private:
    std::vector<double> diag_;
};

[[nodiscard]] ScaleMap scale_map(const AnisotropyIndices& idx, double lambda);

// Radius-rho rectangles on an axis-aligned lattice covering the region.
[[nodiscard]] std::vector<AnisoRect> cover(const AnisotropyIndices& idx, const AnisoRect& region,
                                           double rho);

} // namespace anilap
