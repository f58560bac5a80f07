#include "anilap/grid.hpp"

#include "anilap/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace anilap {

Grid::Grid(std::vector<double> lo, std::vector<double> h, std::vector<std::size_t> n, bool periodic)
    : lo_(std::move(lo)), h_(std::move(h)), n_(std::move(n)), periodic_(periodic) {
    if (n_.empty() || lo_.size() != n_.size() || h_.size() != n_.size())
        throw Error(ErrorCode::InvalidArgument, "grid axis data must have equal positive length");
    stride_.assign(n_.size(), 1);
    size_ = 1;
    for (std::size_t k = n_.size(); k-- > 0;) {
        if (n_[k] < 1 || !(h_[k] > 0))
            throw Error(ErrorCode::InvalidArgument, "grid needs positive spacing and node counts");
        stride_[k] = size_;
        size_ *= n_[k];
    }
}

Grid Grid::spanning(const Point& lo, const Point& hi, const std::vector<std::size_t>& n) {
    std::vector<double> h(n.size());
    for (std::size_t k = 0; k < n.size(); ++k) {
        if (n[k] < 2) throw Error(ErrorCode::InvalidArgument, "spanning grid needs two nodes per axis");
        h[k] = (hi.at(k) - lo.at(k)) / static_cast<double>(n[k] - 1);
    }
    return Grid(lo, std::move(h), n, false);
}

Grid Grid::periodic_box(const Point& lo, const std::vector<double>& length,
                        const std::vector<std::size_t>& n) {
    std::vector<double> h(n.size());
    for (std::size_t k = 0; k < n.size(); ++k) h[k] = length.at(k) / static_cast<double>(n[k]);
    return Grid(lo, std::move(h), n, true);
}

double Grid::cell_volume() const noexcept {
    double v = 1;
    for (double x : h_) v *= x;
    return v;
}

Point Grid::point(std::size_t flat) const {
    Point p(n_.size());
    for (std::size_t k = 0; k < n_.size(); ++k) p[k] = coord(k, index_along(flat, k));
    return p;
}

std::size_t Grid::flat(const std::vector<std::size_t>& multi) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < n_.size(); ++k) f += multi.at(k) * stride_[k];
    return f;
}

double Grid::truncation_radius() const noexcept {
    double r = 0;
    for (std::size_t k = 0; k < n_.size(); ++k) r = std::max(r, h_[k] * static_cast<double>(n_[k] - 1));
    return r;
}

bool Grid::is_inner(std::size_t flat) const {
    if (periodic_) return true;
    for (std::size_t k = 0; k < n_.size(); ++k) {
        const std::size_t i = index_along(flat, k);
        if (i == 0 || i + 1 == n_[k]) return false;
    }
    return true;
}

bool Grid::same_layout(const Grid& o) const noexcept {
    return n_ == o.n_ && h_ == o.h_ && lo_ == o.lo_ && periodic_ == o.periodic_;
}

namespace {

double bump_value(const AxisBump& b, const Point& y) {
    const double ya = y[b.axis];
    if (ya < b.lo || ya > b.hi) return 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (j == b.axis) continue;
        const double c = j < b.center.size() ? b.center[j] : 0.0;
        const double w = j < b.half_width.size() ? b.half_width[j]
                                                 : std::numeric_limits<double>::infinity();
        if (std::abs(y[j] - c) > w) return 0.0;
    }
    return b.height;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// int over s in [s_lo, s_hi] of F(t(s)), t = s^{-1/alpha}; geometric panels toward s = 0.
template <class F>
double ray_integral(double s_lo, double s_hi, double alpha, F&& fn, double* neglected) {
    using Q = boost::math::quadrature::gauss<double, 15>;
    auto in_s = [&](double s) { return fn(std::pow(s, -1.0 / alpha)); };
    if (s_hi <= s_lo) return 0.0;
    if (s_lo > 0) {
        constexpr int panels = 4;
        double acc = 0;
        const double w = (s_hi - s_lo) / panels;
        for (int i = 0; i < panels; ++i) acc += Q::integrate(in_s, s_lo + i * w, s_lo + (i + 1) * w);
        return acc;
    }
    constexpr int depth = 26;
    double acc = 0;
    double top = s_hi;
    for (int m = 0; m < depth; ++m) {
        acc += Q::integrate(in_s, top / 2, top);
        top /= 2;
    }
    if (neglected) *neglected += top * std::abs(in_s(top));
    return acc;
}

// Breakpoints along the ray where a bump indicator can switch.
std::vector<double> ray_breakpoints(const BumpExterior& be, const Point& x, std::size_t axis, int dir,
                                    double T) {
    std::vector<double> br;
    auto push = [&](double coordinate) {
        const double t = (coordinate - x[axis]) * dir;
        if (std::isfinite(t) && t > T) br.push_back(t);
    };
    for (const auto& b : be.bumps) {
        if (b.axis == axis) {
            push(b.lo);
            push(b.hi);
        } else if (axis < b.half_width.size()) {
            const double c = axis < b.center.size() ? b.center[axis] : 0.0;
            push(c - b.half_width[axis]);
            push(c + b.half_width[axis]);
        }
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

} // namespace

double exterior_value(const ExteriorPolicy& p, const Point& y) {
    return std::visit(overloaded{
                          [](const ZeroExterior&) { return 0.0; },
                          [](const ConstantExterior& c) { return c.value; },
                          [&](const BumpExterior& b) {
                              double v = 0;
                              for (const auto& bump : b.bumps) v += bump_value(bump, y);
                              return v;
                          },
                          [&](const CallableExterior& c) { return c.g(y); },
                      },
                      p);
}

bool piecewise_constant(const ExteriorPolicy& p) noexcept {
    return !std::holds_alternative<CallableExterior>(p);
}

ExteriorPolicy negative_part(const ExteriorPolicy& p) {
    return std::visit(overloaded{
                          [](const ZeroExterior&) -> ExteriorPolicy { return ZeroExterior{}; },
                          [](const ConstantExterior& c) -> ExteriorPolicy {
                              return ConstantExterior{std::max(-c.value, 0.0)};
                          },
                          [&](const BumpExterior& b) -> ExteriorPolicy {
                              if (std::all_of(b.bumps.begin(), b.bumps.end(),
                                              [](const AxisBump& x) { return x.height >= 0; }))
                                  return ZeroExterior{};
                              return CallableExterior{[p](const Point& y) {
                                  return std::max(-exterior_value(p, y), 0.0);
                              }};
                          },
                          [](const CallableExterior& c) -> ExteriorPolicy {
                              auto g = c.g;
                              return CallableExterior{
                                  [g](const Point& y) { return std::max(-g(y), 0.0); }};
                          },
                      },
                      p);
}

TailMoments tail_moments(const ExteriorPolicy& p, const Point& x, std::size_t axis, int dir,
                         double T, double alpha, const Coefficient* a) {
    if (!(T > 0)) throw Error(ErrorCode::InvalidArgument, "tail must start at positive distance");
    TailMoments m;
    const double scale = 2 - alpha;  // int_T^inf rho dt = (2 - alpha) T^{-alpha}
    Point y = x;
    auto ray_point = [&](double t) -> const Point& {
        y[axis] = x[axis] + dir * t;
        return y;
    };
    auto mass = [&](double t0, double t1) {
        const double s_hi = std::pow(t0, -alpha);
        const double s_lo = std::isfinite(t1) ? std::pow(t1, -alpha) : 0.0;
        if (!a) return scale * (s_hi - s_lo);
        return scale * ray_integral(s_lo, s_hi, alpha,
                                    [&](double t) { return (*a)(x, ray_point(t)); }, nullptr);
    };

    if (const auto* bumps = std::get_if<BumpExterior>(&p)) {
        const auto br = ray_breakpoints(*bumps, x, axis, dir, T);
        std::vector<double> edges;
        edges.push_back(T);
        edges.insert(edges.end(), br.begin(), br.end());
        edges.push_back(std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double t0 = edges[i], t1 = edges[i + 1];
            const double mid = std::isfinite(t1) ? 0.5 * (t0 + t1) : t0 + std::max(1.0, t0);
            const double v = exterior_value(p, ray_point(mid));
            const double w = mass(t0, t1);
            m.m1 += v * w;
            m.m2 += v * v * w;
        }
        // Same quadrature as the other policies, so the diagonal does not depend on the data.
        m.m0 = mass(T, std::numeric_limits<double>::infinity());
        return m;
    }
    if (const auto* c = std::get_if<CallableExterior>(&p)) {
        const double s_hi = std::pow(T, -alpha);
        auto coeff = [&](double t) { return a ? (*a)(x, ray_point(t)) : 1.0; };
        double neglected = 0;
        m.m0 = a ? scale * ray_integral(0.0, s_hi, alpha, coeff, nullptr) : scale * s_hi;
        m.m1 = scale * ray_integral(
                           0.0, s_hi, alpha,
                           [&](double t) {
                               const double w = coeff(t);
                               return w * c->g(ray_point(t));
                           },
                           &neglected);
        m.m2 = scale * ray_integral(
                           0.0, s_hi, alpha,
                           [&](double t) {
                               const double w = coeff(t);
                               const double g = c->g(ray_point(t));
                               return w * g * g;
                           },
                           nullptr);
        m.truncation = scale * neglected;
        return m;
    }
    const double v = std::holds_alternative<ConstantExterior>(p) ? std::get<ConstantExterior>(p).value : 0.0;
    m.m0 = mass(T, std::numeric_limits<double>::infinity());
    m.m1 = v * m.m0;
    m.m2 = v * v * m.m0;
    return m;
}

GridFunction::GridFunction(Grid grid, ExteriorPolicy exterior)
    : grid_(std::move(grid)), values_(grid_.size(), 0.0), exterior_(std::move(exterior)) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values, ExteriorPolicy exterior)
    : grid_(std::move(grid)), values_(std::move(values)), exterior_(std::move(exterior)) {
    if (values_.size() != grid_.size())
        throw Error(ErrorCode::InvalidArgument, "value count does not match grid size");
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(const Point&)>& f,
                                  ExteriorPolicy exterior) {
    GridFunction u(grid, std::move(exterior));
    for (std::size_t i = 0; i < grid.size(); ++i) u.values_[i] = f(grid.point(i));
    return u;
}

void GridFunction::fill_exterior(const AnisoRect& omega) {
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const Point p = grid_.point(i);
        if (!omega.contains(p)) values_[i] = exterior_value(exterior_, p);
    }
}

std::vector<std::size_t> nodes_in(const Grid& grid, const AnisoRect& r) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (r.contains(grid.point(i))) out.push_back(i);
    return out;
}

} // namespace anilap
