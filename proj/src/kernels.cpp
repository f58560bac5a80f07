#include "anilap/kernels.hpp"

#include "anilap/energy.hpp"
#include "anilap/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace anilap {

std::string to_string(KernelVariant v) {
    switch (v) {
    case KernelVariant::Axes: return "axes";
    case KernelVariant::IsotropicCoeff: return "isotropic";
    case KernelVariant::ModulatedAxes: return "modulated_axes";
    }
    return "unknown";
}

KernelFamily KernelFamily::axes(const AnisotropyIndices& idx) {
    return KernelFamily(KernelVariant::Axes, idx, nullptr, true);
}

KernelFamily KernelFamily::modulated_axes(const AnisotropyIndices& idx, Coefficient a, bool symmetric) {
    if (!a) throw Error(ErrorCode::InvalidArgument, "modulated kernel needs a coefficient");
    return KernelFamily(KernelVariant::ModulatedAxes, idx,
                        std::make_shared<const Coefficient>(std::move(a)), symmetric);
}

KernelFamily KernelFamily::isotropic(std::size_t d, double alpha, Coefficient a, bool symmetric) {
    if (d == 0 || d > 3) throw Error(ErrorCode::InvalidArgument, "isotropic kernel supports d in {1,2,3}");
    if (!a) a = constant_coefficient(1.0);
    return KernelFamily(KernelVariant::IsotropicCoeff, AnisotropyIndices(std::vector<double>(d, alpha)),
                        std::make_shared<const Coefficient>(std::move(a)), symmetric);
}

double axis_density(double alpha, double h) {
    if (h == 0) throw Error(ErrorCode::SingularPoint, "zero offset");
    return alpha * (2 - alpha) * std::pow(std::abs(h), -1 - alpha);
}

double density_eval(const KernelFamily& K, const Point& x, std::size_t axis, double h) {
    if (!K.is_axes_type())
        throw Error(ErrorCode::InvalidQuery, "axis-line density requested for the isotropic kernel");
    if (axis >= K.dim()) throw Error(ErrorCode::InvalidQuery, "axis out of range");
    const double rho = axis_density(K.alpha(axis), h);
    if (!K.coefficient()) return rho;
    Point y = x;
    y[axis] += h;
    return K.coeff(x, y) * rho;
}

double density_eval(const KernelFamily& K, const Point& x, const Point& y) {
    if (K.is_axes_type())
        throw Error(ErrorCode::InvalidQuery, "d-dimensional density requested for an axes kernel");
    double r2 = 0;
    for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - y[k]) * (x[k] - y[k]);
    if (r2 == 0) throw Error(ErrorCode::SingularPoint, "x == y");
    const double d = static_cast<double>(K.dim());
    return K.coeff(x, y) * std::pow(r2, -(d + K.alpha(0)) / 2);
}

namespace {

using GL8 = boost::math::quadrature::gauss<double, 8>;

struct Direction {
    Point v;
    double w;
};

// Angular quadrature on the unit sphere in d <= 3.
std::vector<Direction> sphere_rule(std::size_t d) {
    std::vector<Direction> out;
    if (d == 1) {
        out.push_back({{1.0}, 1.0});
        out.push_back({{-1.0}, 1.0});
    } else if (d == 2) {
        constexpr int m = 1024;
        for (int i = 0; i < m; ++i) {
            const double th = 2 * std::numbers::pi * (i + 0.5) / m;
            out.push_back({{std::cos(th), std::sin(th)}, 2 * std::numbers::pi / m});
        }
    } else {
        constexpr int mz = 48, mphi = 96;
        const auto& zs = boost::math::quadrature::gauss<double, mz>::abscissa();
        const auto& ws = boost::math::quadrature::gauss<double, mz>::weights();
        for (std::size_t i = 0; i < zs.size(); ++i) {
            for (int sgn : {1, -1}) {
                if (zs[i] == 0 && sgn < 0) continue;
                const double z = sgn * zs[i];
                const double rho = std::sqrt(1 - z * z);
                for (int j = 0; j < mphi; ++j) {
                    const double ph = 2 * std::numbers::pi * (j + 0.5) / mphi;
                    out.push_back({{rho * std::cos(ph), rho * std::sin(ph), z},
                                   ws[i] * 2 * std::numbers::pi / mphi});
                }
            }
        }
    }
    return out;
}

// int_s^inf f(r) r^{-1-alpha} dr via u = r^{-alpha}, geometric panels toward 0.
template <class F>
double radial_tail(double s, double alpha, F&& f) {
    const double top0 = std::pow(s, -alpha);
    double top = top0, acc = 0;
    for (int m = 0; m < 30; ++m) {
        acc += GL8::integrate([&](double u) { return f(std::pow(u, -1 / alpha)); }, top / 2, top);
        top /= 2;
    }
    return acc / alpha;
}

double levy_axes(const KernelFamily& K, const Point& x) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0;
    for (std::size_t k = 0; k < K.dim(); ++k) {
        const double a = K.alpha(k);
        for (int dir : {-1, 1}) {
            Point y = x;
            auto near = [&](double t) {
                y[k] = x[k] + dir * t;
                return K.coeff(x, y) * a * (2 - a) * std::pow(t, 1 - a);
            };
            total += ts.integrate(near, 0.0, 1.0, 1e-12);
            total += tail_moments(ZeroExterior{}, x, k, dir, 1.0, a, K.coefficient()).m0;
        }
    }
    return total;
}

double levy_isotropic(const KernelFamily& K, const Point& x) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double a = K.alpha(0);
    const std::size_t d = K.dim();
    double total = 0;
    Point y(d);
    for (const auto& dir : sphere_rule(d)) {
        auto at = [&](double r) -> const Point& {
            for (std::size_t k = 0; k < d; ++k) y[k] = x[k] + r * dir.v[k];
            return y;
        };
        const double near = ts.integrate([&](double r) { return K.coeff(x, at(r)) * std::pow(r, 1 - a); },
                                         0.0, 1.0, 1e-12);
        const double far = radial_tail(1.0, a, [&](double r) { return K.coeff(x, at(r)); });
        total += dir.w * (near + far);
    }
    return total;
}

// Composite Gauss points on [lo, hi].
void gauss_points(double lo, double hi, std::size_t npts, std::vector<double>& xs, std::vector<double>& ws) {
    const std::size_t panels = std::max<std::size_t>(1, npts / 8);
    const auto& ab = GL8::abscissa();
    const auto& wt = GL8::weights();
    xs.clear();
    ws.clear();
    const double len = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double c = lo + (static_cast<double>(p) + 0.5) * len;
        for (std::size_t i = 0; i < ab.size(); ++i) {
            for (int sgn : {1, -1}) {
                if (ab[i] == 0 && sgn < 0) continue;
                xs.push_back(c + sgn * ab[i] * len / 2);
                ws.push_back(wt[i] * len / 2);
            }
        }
    }
}

// Tensor Gauss rule over a box; calls fn(point, weight).
template <class F>
void box_rule(const Box& b, std::size_t npts, F&& fn) {
    const std::size_t d = b.lo.size();
    std::vector<std::vector<double>> xs(d), ws(d);
    for (std::size_t k = 0; k < d; ++k) gauss_points(b.lo[k], b.hi[k], npts, xs[k], ws[k]);
    std::vector<std::size_t> it(d, 0);
    Point p(d);
    while (true) {
        double w = 1;
        for (std::size_t k = 0; k < d; ++k) {
            p[k] = xs[k][it[k]];
            w *= ws[k][it[k]];
        }
        fn(p, w);
        std::size_t k = 0;
        while (k < d && ++it[k] == xs[k].size()) it[k++] = 0;
        if (k == d) break;
    }
}

bool boxes_overlap(const Box& A, const Box& B) {
    for (std::size_t k = 0; k < A.lo.size(); ++k)
        if (!(A.lo[k] < B.hi[k] && B.lo[k] < A.hi[k])) return false;
    return true;
}

// int_A int_B mu(x, dy) dx for axes-type kernels.
double cross_mass_axes(const KernelFamily& K, const Box& A, const Box& B, std::size_t npts) {
    const std::size_t d = K.dim();
    NeumaierSum total;
    for (std::size_t k = 0; k < d; ++k) {
        Box R = A;
        bool empty = false;
        for (std::size_t j = 0; j < d; ++j) {
            if (j == k) continue;
            R.lo[j] = std::max(A.lo[j], B.lo[j]);
            R.hi[j] = std::min(A.hi[j], B.hi[j]);
            if (R.lo[j] >= R.hi[j]) empty = true;
        }
        if (empty) continue;
        const double a = K.alpha(k);
        box_rule(R, npts, [&](const Point& x, double w) {
            double h0 = B.lo[k] - x[k], h1 = B.hi[k] - x[k];
            if (h0 <= 0 && h1 >= 0) throw Error(ErrorCode::InvalidQuery, "boxes must be disjoint");
            if (!K.coefficient()) {
                const double n0 = std::min(std::abs(h0), std::abs(h1));
                const double n1 = std::max(std::abs(h0), std::abs(h1));
                total.add(w * (2 - a) * (std::pow(n0, -a) - std::pow(n1, -a)));
                return;
            }
            std::vector<double> hs, hw;
            gauss_points(h0, h1, npts, hs, hw);
            Point y = x;
            double inner = 0;
            for (std::size_t i = 0; i < hs.size(); ++i) {
                y[k] = x[k] + hs[i];
                inner += hw[i] * K.coeff(x, y) * axis_density(a, hs[i]);
            }
            total.add(w * inner);
        });
    }
    return total.value();
}

double cross_mass_isotropic(const KernelFamily& K, const Box& A, const Box& B, std::size_t npts) {
    NeumaierSum total;
    box_rule(A, npts, [&](const Point& x, double wx) {
        box_rule(B, npts, [&](const Point& y, double wy) { total.add(wx * wy * density_eval(K, x, y)); });
    });
    return total.value();
}

double levy_value(const KernelFamily& K, const Point& x) {
    return K.is_axes_type() ? levy_axes(K, x) : levy_isotropic(K, x);
}

} // namespace

std::vector<double> check_levy_integrability(const KernelFamily& K, const std::vector<Point>& xs, double cap) {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = levy_value(K, xs[i]);
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i]) || out[i] > cap) {
            std::ostringstream os;
            os << "Levy integral " << out[i] << " at sample " << i << " exceeds cap " << cap;
            throw Error(ErrorCode::IntegrabilityFailure, os.str());
        }
    }
    return out;
}

SymmetryCheck check_symmetry(const KernelFamily& K, const Box& A, const Box& B, std::size_t points_per_axis) {
    if (A.lo.size() != K.dim() || B.lo.size() != K.dim())
        throw Error(ErrorCode::InvalidArgument, "box dimension mismatch");
    if (boxes_overlap(A, B)) throw Error(ErrorCode::InvalidQuery, "boxes must be disjoint");
    std::size_t npts = points_per_axis;
    if (!K.is_axes_type() && K.dim() == 3) npts = std::min<std::size_t>(npts, 8);
    SymmetryCheck s;
    if (K.is_axes_type()) {
        s.lhs = cross_mass_axes(K, A, B, npts);
        s.rhs = cross_mass_axes(K, B, A, npts);
    } else {
        s.lhs = cross_mass_isotropic(K, A, B, npts);
        s.rhs = cross_mass_isotropic(K, B, A, npts);
    }
    if (!std::isfinite(s.lhs) || !std::isfinite(s.rhs))
        throw Error(ErrorCode::IntegrabilityFailure, "cross mass is not finite");
    const double scale = std::max(std::abs(s.lhs), std::abs(s.rhs));
    s.gap = scale > 0 ? std::abs(s.lhs - s.rhs) / scale : 0.0;
    return s;
}

Comparability comparability_estimate(const KernelFamily& K, const AnisoRect& r,
                                     const std::vector<GridFunction>& trials) {
    if (trials.empty()) throw Error(ErrorCode::InvalidArgument, "empty trial set");
    const KernelFamily ref = KernelFamily::axes(K.indices());
    Comparability c;
    for (const auto& w : trials) {
        const double base = energy_form(ref, r, w, w);
        if (!(base > 1e-300)) {
            ++c.skipped;
            continue;
        }
        c.ratios.push_back(energy_form(K, r, w, w) / base);
    }
    if (c.ratios.empty()) throw Error(ErrorCode::InvalidArgument, "every trial function has zero energy");
    c.lower = *std::min_element(c.ratios.begin(), c.ratios.end());
    c.upper = *std::max_element(c.ratios.begin(), c.ratios.end());
    if (c.skipped) c.note = std::to_string(c.skipped) + " zero-energy trial functions skipped";
    return c;
}

double tail_mass(const KernelFamily& K, const Point& x, const AnisoRect& r) {
    if (!r.contains(x)) throw Error(ErrorCode::InvalidQuery, "query point outside the rectangle");
    if (K.is_axes_type()) {
        double total = 0;
        for (std::size_t k = 0; k < K.dim(); ++k) {
            const double up = r.upper(k) - x[k];
            const double dn = x[k] - r.lower(k);
            total += tail_moments(ZeroExterior{}, x, k, 1, up, K.alpha(k), K.coefficient()).m0;
            total += tail_moments(ZeroExterior{}, x, k, -1, dn, K.alpha(k), K.coefficient()).m0;
        }
        return total;
    }
    const std::size_t d = K.dim();
    const double a = K.alpha(0);
    double total = 0;
    Point y(d);
    for (const auto& dir : sphere_rule(d)) {
        double s = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < d; ++k) {
            if (dir.v[k] > 0) s = std::min(s, (r.upper(k) - x[k]) / dir.v[k]);
            if (dir.v[k] < 0) s = std::min(s, (r.lower(k) - x[k]) / dir.v[k]);
        }
        total += dir.w * radial_tail(s, a, [&](double rad) {
                     for (std::size_t k = 0; k < d; ++k) y[k] = x[k] + rad * dir.v[k];
                     return K.coeff(x, y);
                 });
    }
    return total;
}

Coefficient constant_coefficient(double c) {
    return [c](const Point&, const Point&) { return c; };
}

Coefficient checkerboard_coefficient(double cell) {
    if (!(cell > 0)) throw Error(ErrorCode::InvalidArgument, "checkerboard cell must be positive");
    auto parity = [cell](const Point& z) {
        long s = 0;
        for (double v : z) s += static_cast<long>(std::floor(v / cell));
        return static_cast<double>(((s % 2) + 2) % 2);
    };
    return [parity](const Point& x, const Point& y) { return 1.0 + 0.5 * (parity(x) + parity(y)); };
}

Coefficient bump_coefficient(Point center, double width) {
    if (!(width > 0)) throw Error(ErrorCode::InvalidArgument, "bump width must be positive");
    auto b = [center, width](const Point& z) {
        double r2 = 0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double c = k < center.size() ? center[k] : 0.0;
            r2 += (z[k] - c) * (z[k] - c);
        }
        return std::exp(-r2 / (width * width));
    };
    return [b](const Point& x, const Point& y) { return 1.0 + 0.5 * (b(x) + b(y)); };
}

} // namespace anilap
