#include "anilap/grid_operator.hpp"

#include "anilap/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

namespace anilap {

double multiplier(const AnisotropyIndices& idx, const Point& xi) {
    double s = 0;
    for (std::size_t k = 0; k < idx.dim(); ++k) s += std::pow(std::abs(xi.at(k)), idx.alpha(k));
    return s;
}

double symbol(const AnisotropyIndices& idx, const Point& xi) {
    double s = 0;
    for (std::size_t k = 0; k < idx.dim(); ++k)
        s += symbol_constant(idx.alpha(k)) * std::pow(std::abs(xi.at(k)), idx.alpha(k));
    return s;
}

namespace {

// (j - 1/2)^{-a} - (j + 1/2)^{-a} without cancellation.
double cell_difference(double a, double j) {
    const double lo = j - 0.5;
    return -std::pow(lo, -a) * std::expm1(-a * std::log1p(1.0 / lo));
}

double near_cell_unit(double alpha) {
    const double base = (2 - alpha) * cell_difference(alpha, 1.0);
    const double near = alpha * std::pow(0.5, 2 - alpha);
    const double corr = alpha * (2 - alpha) * near_cell_kappa(alpha);
    return base + near + corr > 0 ? near + corr : near;
}

} // namespace

double axis_weight(double alpha, double h, std::size_t j) {
    if (j == 0) return 0.0;
    const double ha = std::pow(h, -alpha);
    double w = (2 - alpha) * cell_difference(alpha, static_cast<double>(j)) * ha;
    if (j == 1) w += near_cell_unit(alpha) * ha;
    return w;
}

std::vector<double> axis_weights(double alpha, double h, std::size_t jmax) {
    std::vector<double> w(jmax + 1, 0.0);
    const double ha = std::pow(h, -alpha);
    for (std::size_t j = 1; j <= jmax; ++j)
        w[j] = (2 - alpha) * cell_difference(alpha, static_cast<double>(j)) * ha;
    if (jmax >= 1) w[1] += near_cell_unit(alpha) * ha;
    return w;
}

std::vector<double> periodic_weights(double alpha, double h, std::size_t n) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "periodic axis needs two nodes");
    const std::size_t images = std::max<std::size_t>(256, (std::size_t{1} << 20) / n);
    std::vector<double> w(n, 0.0);
    const double nn = static_cast<double>(n);
    for (std::size_t r = 1; r < n; ++r) {
        NeumaierSum s;
        for (std::size_t m = images; m-- > 0;) {
            s.add(axis_weight(alpha, h, r + m * n));
            if (m >= 1) s.add(axis_weight(alpha, h, m * n - r));
        }
        // Remaining images, by the integral of the cell weights.
        const double rd = static_cast<double>(r);
        const double im = static_cast<double>(images);
        s.add((2 - alpha) * std::pow((rd + (im - 0.5) * nn) * h, -alpha) / nn);
        s.add((2 - alpha) * std::pow(((im + 0.5) * nn - rd) * h, -alpha) / nn);
        w[r] = s.value();
    }
    return w;
}

AxisStencil::AxisStencil(const KernelFamily& K, const Grid& grid) : K_(K), grid_(grid) {
    if (!K.is_axes_type())
        throw Error(ErrorCode::InvalidArgument, "grid operator supports axes-type kernels only");
    if (K.dim() != grid.dim()) throw Error(ErrorCode::InvalidArgument, "kernel and grid dimensions differ");
    if (grid.periodic() && K.coefficient())
        throw Error(ErrorCode::InvalidArgument, "modulated kernels need a non-periodic grid");
    w_.resize(grid.dim());
    for (std::size_t k = 0; k < grid.dim(); ++k) {
        w_[k] = grid.periodic() ? periodic_weights(K.alpha(k), grid.h(k), grid.n(k))
                                : axis_weights(K.alpha(k), grid.h(k), grid.n(k) - 1);
    }
}

double AxisStencil::tail_start(std::size_t k, std::size_t i, int dir) const {
    const double cells = dir > 0 ? static_cast<double>(grid_.n(k) - 1 - i) : static_cast<double>(i);
    return (cells + 0.5) * grid_.h(k);
}

double AxisStencil::apply(const GridFunction& u, std::size_t flat) const {
    if (!grid_.is_inner(flat)) {
        std::ostringstream os;
        os << "node " << flat << " lies in the boundary layer";
        throw Error(ErrorCode::BoundaryStencilError, os.str());
    }
    const auto& v = u.values();
    const double ux = v[flat];
    NeumaierSum acc;
    Point x;
    if (!grid_.periodic()) x = grid_.point(flat);
    for (std::size_t k = 0; k < grid_.dim(); ++k) {
        for_each_partner(flat, k, [&](std::size_t nb, double w) { acc.add(w * (v[nb] - ux)); });
        if (grid_.periodic()) continue;
        const std::size_t i = grid_.index_along(flat, k);
        for (int dir : {-1, 1}) {
            const auto m = tail_moments(u.exterior(), x, k, dir, tail_start(k, i, dir), K_.alpha(k),
                                        K_.coefficient());
            acc.add(m.m1 - ux * m.m0);
        }
    }
    return acc.value();
}

double apply_operator(const KernelFamily& K, const GridFunction& u, std::size_t node) {
    if (node >= u.grid().size()) throw Error(ErrorCode::InvalidQuery, "node index out of range");
    return AxisStencil(K, u.grid()).apply(u, node);
}

GridFunction apply_operator_all(const KernelFamily& K, const GridFunction& u) {
    const AxisStencil st(K, u.grid());
    GridFunction out(u.grid(), u.exterior());
    auto& o = out.values();
    parallel_for(u.grid().size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            o[i] = u.grid().is_inner(i) ? st.apply(u, i) : std::numeric_limits<double>::quiet_NaN();
    });
    return out;
}

std::mutex& fftw_plan_lock() {
    static std::mutex m;
    return m;
}

GridFunction spectral_apply(const AnisotropyIndices& idx, const GridFunction& u) {
    const Grid& g = u.grid();
    if (!g.periodic()) throw Error(ErrorCode::SpectralPathUnavailable, "spectral path needs a periodic grid");
    if (g.dim() != idx.dim()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
    const int d = static_cast<int>(g.dim());
    std::vector<int> dims(g.dim());
    for (std::size_t k = 0; k < g.dim(); ++k) dims[k] = static_cast<int>(g.n(k));
    const std::size_t last = g.n(g.dim() - 1) / 2 + 1;
    const std::size_t csize = g.size() / g.n(g.dim() - 1) * last;

    double* in = fftw_alloc_real(g.size());
    fftw_complex* spec = fftw_alloc_complex(csize);
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_lock());
        fwd = fftw_plan_dft_r2c(d, dims.data(), in, spec, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r(d, dims.data(), spec, in, FFTW_ESTIMATE);
    }
    std::copy(u.values().begin(), u.values().end(), in);
    fftw_execute(fwd);

    std::vector<double> cst(g.dim());
    for (std::size_t k = 0; k < g.dim(); ++k) cst[k] = symbol_constant(idx.alpha(k));
    std::vector<std::size_t> cstride(g.dim(), 1);
    for (std::size_t k = g.dim() - 1; k-- > 0;)
        cstride[k] = cstride[k + 1] * (k + 1 == g.dim() - 1 ? last : g.n(k + 1));
    for (std::size_t c = 0; c < csize; ++c) {
        double m = 0;
        for (std::size_t k = 0; k < g.dim(); ++k) {
            const std::size_t len = k + 1 == g.dim() ? last : g.n(k);
            const auto mi = static_cast<long>((c / cstride[k]) % len);
            const long n = static_cast<long>(g.n(k));
            const long f = mi <= n / 2 ? mi : mi - n;
            const double xi = 2 * std::numbers::pi * static_cast<double>(f) /
                              (static_cast<double>(n) * g.h(k));
            m += cst[k] * std::pow(std::abs(xi), idx.alpha(k));
        }
        const double scale = -m / static_cast<double>(g.size());
        spec[c][0] *= scale;
        spec[c][1] *= scale;
    }
    fftw_execute(bwd);
    GridFunction out(g, std::vector<double>(in, in + g.size()), u.exterior());
    {
        std::lock_guard<std::mutex> lock(fftw_plan_lock());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(in);
    fftw_free(spec);
    return out;
}

OrderStudy consistency_order(const KernelFamily& K, const std::function<double(const Point&)>& u, double oracle,
                             const Point& x0, const std::vector<double>& spacings, double half_extent) {
    if (spacings.size() < 3) throw Error(ErrorCode::InvalidArgument, "need at least three refinement levels");
    OrderStudy s;
    const std::size_t d = K.dim();
    for (double h : spacings) {
        const auto half = static_cast<std::size_t>(std::llround(half_extent / h));
        if (half < 2) throw Error(ErrorCode::InvalidArgument, "spacing too coarse for the window");
        const double he = half_extent / static_cast<double>(half);
        Point lo(d), hi(d);
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = x0[k] - half_extent;
            hi[k] = x0[k] + half_extent;
        }
        const Grid grid = Grid::spanning(lo, hi, std::vector<std::size_t>(d, 2 * half + 1));
        const GridFunction gu = GridFunction::sample(grid, u, CallableExterior{u});
        const std::size_t center = grid.flat(std::vector<std::size_t>(d, half));
        s.spacings.push_back(he);
        s.errors.push_back(std::abs(apply_operator(K, gu, center) - oracle));
    }
    const double floor = 1e-12 * (std::abs(oracle) + 1);
    s.exact = std::all_of(s.errors.begin(), s.errors.end(), [&](double e) { return e <= floor; });
    if (s.exact) return s;
    std::vector<std::size_t> order(s.spacings.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.spacings[a] > s.spacings[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (!(s.errors[order[i]] < s.errors[order[i - 1]])) {
            std::ostringstream os;
            os << "errors do not decrease under refinement:";
            for (std::size_t j : order) os << " h=" << s.spacings[j] << " err=" << s.errors[j];
            throw Error(ErrorCode::OrderFitUnreliable, os.str());
        }
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < s.spacings.size(); ++i) {
        lx.push_back(std::log(s.spacings[i]));
        ly.push_back(std::log(s.errors[i]));
    }
    const auto fit = ols(lx, ly);
    s.order = fit.slope;
    s.r2 = fit.r2;
    return s;
}

} // namespace anilap
