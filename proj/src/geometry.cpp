#include "anilap/geometry.hpp"

#include "anilap/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace anilap {

AnisotropyIndices::AnisotropyIndices(std::vector<double> alphas) : alphas_(std::move(alphas)) {
    if (alphas_.empty()) throw Error(ErrorCode::InvalidIndex, "dimension must be positive");
    for (double a : alphas_) {
        if (!(a > 0 && a < 2)) {
            std::ostringstream os;
            os << "alpha " << a << " outside (0,2)";
            throw Error(ErrorCode::InvalidIndex, os.str());
        }
    }
    amax_ = *std::max_element(alphas_.begin(), alphas_.end());
    amin_ = *std::min_element(alphas_.begin(), alphas_.end());
    beta_ = 0;
    for (double a : alphas_) beta_ += 1.0 / a;
}

double AnisotropyIndices::theta() const {
    if (beta_ <= 1.0) {
        std::ostringstream os;
        os << "beta = " << beta_ << " <= 1";
        throw Error(ErrorCode::SobolevExponentUndefined, os.str());
    }
    return 2 * beta_ / (beta_ - 1);
}

BetaTheta beta_theta(const AnisotropyIndices& idx) { return {idx.beta(), idx.theta()}; }

double metric_dist(const AnisotropyIndices& idx, const Point& x, const Point& y) {
    if (x.size() != idx.dim() || y.size() != idx.dim())
        throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
    double d = 0;
    for (std::size_t k = 0; k < idx.dim(); ++k) {
        const double delta = std::abs(x[k] - y[k]);
        const double term = delta > 1 ? 1.0 : std::pow(delta, idx.alpha(k) / idx.alpha_max());
        d = std::max(d, term);
    }
    return d;
}

AnisoRect::AnisoRect(const AnisotropyIndices& idx, Point center, double r)
    : center_(std::move(center)), r_(r) {
    if (!(r > 0) || !std::isfinite(r)) {
        std::ostringstream os;
        os << "radius " << r << " must be positive";
        throw Error(ErrorCode::InvalidRadius, os.str());
    }
    if (center_.size() != idx.dim())
        throw Error(ErrorCode::InvalidArgument, "center dimension mismatch");
    hw_.resize(idx.dim());
    for (std::size_t k = 0; k < idx.dim(); ++k) hw_[k] = std::pow(r, idx.exponent(k));
}

bool AnisoRect::contains(const Point& y) const {
    for (std::size_t k = 0; k < hw_.size(); ++k)
        if (!(std::abs(y[k] - center_[k]) < hw_[k])) return false;
    return true;
}

double AnisoRect::volume() const noexcept {
    double v = 1;
    for (double w : hw_) v *= 2 * w;
    return v;
}

AnisoRect rect(const AnisotropyIndices& idx, const Point& center, double r) {
    return AnisoRect(idx, center, r);
}

Point ScaleMap::apply(const Point& x) const {
    Point y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = diag_[k] * x[k];
    return y;
}

Point ScaleMap::inverse(const Point& x) const {
    Point y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] / diag_[k];
    return y;
}

ScaleMap ScaleMap::compose(const ScaleMap& other) const {
    std::vector<double> d(diag_.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = diag_[k] * other.diag_[k];
    return ScaleMap(std::move(d));
}

ScaleMap ScaleMap::inverse_map() const {
    std::vector<double> d(diag_.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = 1.0 / diag_[k];
    return ScaleMap(std::move(d));
}

double ScaleMap::determinant() const noexcept {
    double p = 1;
    for (double v : diag_) p *= v;
    return p;
}

ScaleMap scale_map(const AnisotropyIndices& idx, double lambda) {
    if (!(lambda > 0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
    std::vector<double> d(idx.dim());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = std::pow(lambda, idx.exponent(k));
    return ScaleMap(std::move(d));
}

std::vector<AnisoRect> cover(const AnisotropyIndices& idx, const AnisoRect& region, double rho) {
    if (!(rho > 0 && rho < 0.25)) {
        std::ostringstream os;
        os << "cover radius " << rho << " outside (0,1/4)";
        throw Error(ErrorCode::InvalidRadius, os.str());
    }
    const std::size_t d = idx.dim();
    // Centers are spaced one half-width apart, so every point of the region
    // lies within half a half-width of some center along each axis.
    std::vector<std::vector<double>> axis_centers(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double w = std::pow(rho, idx.exponent(k));
        const double big = region.half_width(k);
        const double c = region.center()[k];
        if (big <= w) {
            axis_centers[k].push_back(c);
            continue;
        }
        const auto m = static_cast<std::size_t>(std::ceil(2 * big / w));
        const double first = c - 0.5 * static_cast<double>(m - 1) * w;
        for (std::size_t i = 0; i < m; ++i) axis_centers[k].push_back(first + static_cast<double>(i) * w);
    }
    std::vector<AnisoRect> out;
    std::vector<std::size_t> it(d, 0);
    while (true) {
        Point c(d);
        for (std::size_t k = 0; k < d; ++k) c[k] = axis_centers[k][it[k]];
        out.emplace_back(idx, std::move(c), rho);
        std::size_t k = 0;
        while (k < d && ++it[k] == axis_centers[k].size()) it[k++] = 0;
        if (k == d) break;
    }
    return out;
}

} // namespace anilap
