#include "anilap/energy.hpp"

#include "anilap/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace anilap {

namespace {

void require_same_grid(const GridFunction& u, const GridFunction& v) {
    if (!u.grid().same_layout(v.grid()))
        throw Error(ErrorCode::InvalidArgument, "grid functions live on different grids");
}

std::vector<char> membership(const Grid& g, const std::optional<AnisoRect>& omega) {
    std::vector<char> in(g.size(), 1);
    if (!omega) return in;
    for (std::size_t i = 0; i < g.size(); ++i) in[i] = omega->contains(g.point(i)) ? 1 : 0;
    return in;
}

void require_resolution(const Grid& g, const std::vector<char>& in) {
    for (std::size_t k = 0; k < g.dim(); ++k) {
        std::vector<char> seen(g.n(k), 0);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (in[i]) seen[g.index_along(i, k)] = 1;
        const auto count = std::count(seen.begin(), seen.end(), 1);
        if (count < 3) {
            std::ostringstream os;
            os << "domain holds " << count << " node layers along axis " << k << "; at least 3 are needed";
            throw Error(ErrorCode::QuadratureResolutionError, os.str());
        }
    }
}

// Sum of per-node contributions, accumulated in node order.
template <class F>
double node_sum(std::size_t n, F&& per_node) {
    std::vector<double> part(n, 0.0);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) part[i] = per_node(i);
    });
    return compensated_sum(part);
}

double isotropic_pairs(const KernelFamily& K, const GridFunction& u, const GridFunction& v,
                       const std::vector<std::size_t>& nodes) {
    const Grid& g = u.grid();
    const double cv = g.cell_volume();
    std::vector<Point> pts(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) pts[i] = g.point(nodes[i]);
    return node_sum(nodes.size(), [&](std::size_t i) {
        NeumaierSum s;
        const double ux = u[nodes[i]], vx = v[nodes[i]];
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (j == i) continue;
            const double du = u[nodes[j]] - ux;
            const double dv = v[nodes[j]] - vx;
            if (du == 0 || dv == 0) continue;
            s.add(du * dv * density_eval(K, pts[i], pts[j]));
        }
        return s.value() * cv * cv;
    });
}

// int over the ray beyond T of (g_u - ux)(g_v - vx) a rho.
double tail_product(const GridFunction& u, const GridFunction& v, bool same, const Point& x, std::size_t k,
                    int dir, double T, double alpha, const Coefficient* a, double ux, double vx, double* trunc) {
    const bool uz = std::holds_alternative<ZeroExterior>(u.exterior());
    const bool vz = std::holds_alternative<ZeroExterior>(v.exterior());
    const auto mu = tail_moments(u.exterior(), x, k, dir, T, alpha, a);
    if (trunc) *trunc += mu.truncation;
    if (same) return mu.m2 - (ux + vx) * mu.m1 + ux * vx * mu.m0;
    if (vz) return -vx * (mu.m1 - ux * mu.m0);
    const auto mv = tail_moments(v.exterior(), x, k, dir, T, alpha, a);
    if (uz) return -ux * (mv.m1 - vx * mv.m0);
    const ExteriorPolicy pu = u.exterior(), pv = v.exterior();
    const auto cross = tail_moments(
        CallableExterior{[pu, pv](const Point& y) { return exterior_value(pu, y) * exterior_value(pv, y); }},
        x, k, dir, T, alpha, a);
    return cross.m1 - vx * mu.m1 - ux * mv.m1 + ux * vx * mu.m0;
}

} // namespace

double energy_form(const KernelFamily& K, const std::optional<AnisoRect>& omega, const GridFunction& u,
                   const GridFunction& v) {
    require_same_grid(u, v);
    const Grid& g = u.grid();
    if (omega && g.periodic())
        throw Error(ErrorCode::InvalidArgument, "restricted energies need a non-periodic grid");
    const auto in = membership(g, omega);
    require_resolution(g, in);
    if (!K.is_axes_type()) {
        std::vector<std::size_t> nodes;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (in[i]) nodes.push_back(i);
        return isotropic_pairs(K, u, v, nodes);
    }
    const AxisStencil st(K, g);
    const double cv = g.cell_volume();
    const bool same = &u == &v;
    return node_sum(g.size(), [&](std::size_t x) {
        if (!in[x]) return 0.0;
        NeumaierSum s;
        const double ux = u[x], vx = v[x];
        for (std::size_t k = 0; k < g.dim(); ++k) {
            st.for_each_partner(x, k, [&](std::size_t y, double w) {
                if (in[y]) s.add(w * (u[y] - ux) * (v[y] - vx));
            });
            if (omega || g.periodic()) continue;
            const Point p = g.point(x);
            const std::size_t i = g.index_along(x, k);
            for (int dir : {-1, 1}) {
                // Pairs with one point beyond the window appear in both orders.
                s.add(2 * tail_product(u, v, same, p, k, dir, st.tail_start(k, i, dir), K.alpha(k),
                                       K.coefficient(), ux, vx, nullptr));
            }
        }
        return s.value() * cv;
    });
}

Norms norms(const KernelFamily& K, const AnisoRect& omega, const GridFunction& u) {
    const Grid& g = u.grid();
    if (g.periodic()) throw Error(ErrorCode::InvalidArgument, "norms need a non-periodic grid");
    const auto in = membership(g, omega);
    require_resolution(g, in);
    const double cv = g.cell_volume();
    Norms out;
    {
        NeumaierSum l2;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (in[i]) l2.add(u[i] * u[i] * cv);
        out.l2_norm2 = l2.value();
    }
    bool supported = std::holds_alternative<ZeroExterior>(u.exterior()) ||
                     (std::holds_alternative<ConstantExterior>(u.exterior()) &&
                      std::get<ConstantExterior>(u.exterior()).value == 0.0);
    for (std::size_t i = 0; i < g.size() && supported; ++i)
        if (!in[i] && u[i] != 0.0) supported = false;

    if (!K.is_axes_type()) {
        std::vector<std::size_t> all(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) all[i] = i;
        const double cv2 = cv * cv;
        std::vector<Point> pts(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) pts[i] = g.point(i);
        out.v_seminorm2 = node_sum(g.size(), [&](std::size_t x) {
            if (!in[x]) return 0.0;
            NeumaierSum s;
            for (std::size_t y = 0; y < g.size(); ++y) {
                if (y == x) continue;
                const double du = u[y] - u[x];
                if (du != 0) s.add(du * du * density_eval(K, pts[x], pts[y]));
            }
            return s.value() * cv2;
        });
        if (!supported) throw Error(ErrorCode::SupportViolation, "u does not vanish outside the domain");
        out.h_norm2 = out.l2_norm2 + isotropic_pairs(K, u, u, all);
        return out;
    }

    const AxisStencil st(K, g);
    std::vector<double> trunc(g.size(), 0.0);
    out.v_seminorm2 = node_sum(g.size(), [&](std::size_t x) {
        if (!in[x]) return 0.0;
        NeumaierSum s;
        const double ux = u[x];
        const Point p = g.point(x);
        for (std::size_t k = 0; k < g.dim(); ++k) {
            st.for_each_partner(x, k, [&](std::size_t y, double w) { s.add(w * (u[y] - ux) * (u[y] - ux)); });
            const std::size_t i = g.index_along(x, k);
            for (int dir : {-1, 1})
                s.add(tail_product(u, u, true, p, k, dir, st.tail_start(k, i, dir), K.alpha(k), K.coefficient(),
                                   ux, ux, &trunc[x]));
        }
        return s.value() * cv;
    });
    out.tail_error = compensated_sum(trunc) * cv;
    if (!supported) throw Error(ErrorCode::SupportViolation, "u does not vanish outside the domain");
    out.h_norm2 = out.l2_norm2 + energy_form(K, std::nullopt, u, u);
    return out;
}

double fourier_energy(const AnisotropyIndices& idx, const GridFunction& u) {
    const Grid& g = u.grid();
    if (!g.periodic()) throw Error(ErrorCode::SpectralPathUnavailable, "Fourier energy needs a periodic grid");
    const int d = static_cast<int>(g.dim());
    std::vector<int> dims(g.dim());
    for (std::size_t k = 0; k < g.dim(); ++k) dims[k] = static_cast<int>(g.n(k));
    const std::size_t nl = g.n(g.dim() - 1);
    const std::size_t last = nl / 2 + 1;
    const std::size_t csize = g.size() / nl * last;
    double* in = fftw_alloc_real(g.size());
    fftw_complex* spec = fftw_alloc_complex(csize);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_lock());
        plan = fftw_plan_dft_r2c(d, dims.data(), in, spec, FFTW_ESTIMATE);
    }
    std::copy(u.values().begin(), u.values().end(), in);
    fftw_execute(plan);
    std::vector<std::size_t> cstride(g.dim(), 1);
    for (std::size_t k = g.dim() - 1; k-- > 0;)
        cstride[k] = cstride[k + 1] * (k + 1 == g.dim() - 1 ? last : g.n(k + 1));
    NeumaierSum acc;
    for (std::size_t c = 0; c < csize; ++c) {
        Point xi(g.dim());
        std::size_t ml = 0;
        for (std::size_t k = 0; k < g.dim(); ++k) {
            const std::size_t len = k + 1 == g.dim() ? last : g.n(k);
            const auto mi = static_cast<long>((c / cstride[k]) % len);
            if (k + 1 == g.dim()) ml = static_cast<std::size_t>(mi);
            const long n = static_cast<long>(g.n(k));
            const long f = mi <= n / 2 ? mi : mi - n;
            xi[k] = 2 * std::numbers::pi * static_cast<double>(f) / (static_cast<double>(n) * g.h(k));
        }
        const double mult = (ml == 0 || (nl % 2 == 0 && ml == nl / 2)) ? 1.0 : 2.0;
        const double mag2 = spec[c][0] * spec[c][0] + spec[c][1] * spec[c][1];
        acc.add(mult * symbol(idx, xi) * mag2);
    }
    {
        std::lock_guard<std::mutex> lock(fftw_plan_lock());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(spec);
    return 2 * g.cell_volume() / static_cast<double>(g.size()) * acc.value();
}

double cutoff_sum(const AnisotropyIndices& idx, double lambda) {
    if (!(lambda > 1)) throw Error(ErrorCode::InvalidArgument, "lambda must exceed 1");
    double s = 0;
    for (std::size_t k = 0; k < idx.dim(); ++k)
        s += std::pow(std::pow(lambda, idx.exponent(k)) - 1, -idx.alpha(k));
    return s;
}

double cutoff_slope_bound(const AnisotropyIndices& idx, const CutoffSpec& spec, std::size_t k) {
    const double e = idx.exponent(k);
    return 2 / ((std::pow(spec.lambda, e) - 1) * std::pow(spec.r, e));
}

double cutoff_profile(double s, double inner, double outer, double h) {
    const double a = std::abs(s);
    if (a <= inner) return 1.0;
    if (a >= outer) return 0.0;
    const double c = inner + h / 2, e = outer - h / 2;
    auto Q = [&](double t) {
        const double at = std::abs(t);
        double q;
        if (at <= c)
            q = at;
        else if (at < e)
            q = c + (at - c) - (at - c) * (at - c) / (2 * (e - c));
        else
            q = c + (e - c) / 2;
        return t < 0 ? -q : q;
    };
    return std::clamp((Q(s + h / 2) - Q(s - h / 2)) / h, 0.0, 1.0);
}

double cutoff_at(const AnisotropyIndices& idx, const CutoffSpec& spec, const std::vector<double>& h, const Point& x) {
    double v = 1;
    for (std::size_t k = 0; k < idx.dim(); ++k) {
        const double inner = std::pow(spec.r, idx.exponent(k));
        const double outer = std::pow(spec.lambda * spec.r, idx.exponent(k));
        v *= cutoff_profile(x[k] - spec.center[k], inner, outer, h[k]);
        if (v == 0) break;
    }
    return v;
}

GridFunction build_cutoff(const AnisotropyIndices& idx, const CutoffSpec& spec, const Grid& grid) {
    if (!(spec.r > 0 && spec.r <= 1)) throw Error(ErrorCode::InvalidRadius, "cutoff radius must lie in (0,1]");
    if (!(spec.lambda > 1)) throw Error(ErrorCode::InvalidArgument, "lambda must exceed 1");
    if (spec.center.size() != idx.dim() || grid.dim() != idx.dim())
        throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
    for (double c : spec.center)
        if (!(std::abs(c) < 1)) throw Error(ErrorCode::InvalidArgument, "cutoff center must lie in M_1");
    if (grid.periodic()) throw Error(ErrorCode::WindowError, "cutoff needs a non-periodic window");
    std::vector<double> h(idx.dim());
    for (std::size_t k = 0; k < idx.dim(); ++k) {
        h[k] = grid.h(k);
        const double inner = std::pow(spec.r, idx.exponent(k));
        const double outer = std::pow(spec.lambda * spec.r, idx.exponent(k));
        if (outer - inner < 2 * h[k]) {
            std::ostringstream os;
            os << "ramp " << outer - inner << " on axis " << k << " is shorter than two cells (h=" << h[k] << ")";
            throw Error(ErrorCode::WindowError, os.str());
        }
        if (grid.lo(k) > spec.center[k] - outer || grid.hi(k) < spec.center[k] + outer) {
            std::ostringstream os;
            os << "window does not cover M_{lambda r} along axis " << k;
            throw Error(ErrorCode::WindowError, os.str());
        }
    }
    return GridFunction::sample(grid, [&](const Point& x) { return cutoff_at(idx, spec, h, x); }, ZeroExterior{});
}

double carre_du_champ(const AxisStencil& st, const GridFunction& tau, std::size_t node) {
    const Grid& g = st.grid();
    const double tx = tau[node];
    NeumaierSum s;
    const Point p = g.point(node);
    for (std::size_t k = 0; k < g.dim(); ++k) {
        st.for_each_partner(node, k, [&](std::size_t y, double w) { s.add(w * (tau[y] - tx) * (tau[y] - tx)); });
        if (g.periodic()) continue;
        const std::size_t i = g.index_along(node, k);
        for (int dir : {-1, 1}) {
            const auto m = tail_moments(tau.exterior(), p, k, dir, st.tail_start(k, i, dir),
                                        st.kernel().alpha(k), st.kernel().coefficient());
            s.add(m.m2 - 2 * tx * m.m1 + tx * tx * m.m0);
        }
    }
    return s.value();
}

CutoffBounds cutoff_bounds(const KernelFamily& K, const CutoffSpec& spec, const GridFunction& tau) {
    const AxisStencil st(K, tau.grid());
    const Grid& g = tau.grid();
    std::vector<double> vals(g.size(), 0.0);
    parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            if (g.is_inner(i)) vals[i] = carre_du_champ(st, tau, i);
    });
    CutoffBounds cb;
    cb.argmax = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    cb.measured_sup = vals[cb.argmax];
    cb.bound = 8 * std::pow(spec.r, -K.indices().alpha_max()) * cutoff_sum(K.indices(), spec.lambda);
    cb.flagged = cb.measured_sup >= 0.95 * cb.bound;
    return cb;
}

QuadratCheck quadrat_check(const KernelFamily& K, const CutoffSpec& spec, const GridFunction& tau,
                           const GridFunction& u) {
    require_same_grid(tau, u);
    const Grid& g = u.grid();
    const AnisoRect outer(K.indices(), spec.center, spec.lambda * spec.r);
    const double cv = g.cell_volume();
    NeumaierSum lhs, l2;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point p = g.point(i);
        if (!outer.contains(p)) continue;
        l2.add(u[i] * u[i] * cv);
        const double w = u[i] * u[i] * tau[i] * tau[i];
        if (w != 0) lhs.add(w * tail_mass(K, p, outer) * cv);
    }
    QuadratCheck q;
    q.lhs = lhs.value();
    q.base = std::pow(spec.r, -K.indices().alpha_max()) * cutoff_sum(K.indices(), spec.lambda) * l2.value();
    q.measured_c = q.base > 0 ? q.lhs / q.base : 0.0;
    return q;
}

} // namespace anilap
