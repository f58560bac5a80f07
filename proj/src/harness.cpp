#include "anilap/harness.hpp"

#include "anilap/error.hpp"
#include "anilap/grid_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace anilap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<char> members(const Grid& g, const AnisoRect& r) {
    std::vector<char> in(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) in[i] = r.contains(g.point(i)) ? 1 : 0;
    return in;
}

std::vector<std::size_t> require_nodes(const Grid& g, const AnisoRect& r, const char* what) {
    auto nodes = nodes_in(g, r);
    if (nodes.empty()) {
        std::ostringstream os;
        os << what << ": rectangle of radius " << r.radius() << " holds no grid nodes";
        throw Error(ErrorCode::QuadratureResolutionError, os.str());
    }
    return nodes;
}

bool rect_inside(const AnisoRect& inner, const AnisoRect& outer) {
    for (std::size_t k = 0; k < inner.dim(); ++k) {
        if (inner.lower(k) < outer.lower(k) - 1e-12 || inner.upper(k) > outer.upper(k) + 1e-12) return false;
    }
    return true;
}

// sum over x in r, y in r of cell volume * w(x, y) * F(x, y), axes-type kernels;
// isotropic kernels use the full pair sum.
template <class F>
double pair_sum(const KernelFamily& K, const Grid& g, const AnisoRect& r, F&& fn) {
    const auto in = members(g, r);
    const double cv = g.cell_volume();
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (in[i]) nodes.push_back(i);
    std::vector<double> part(nodes.size(), 0.0);
    if (K.is_axes_type()) {
        const AxisStencil st(K, g);
        parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t n = b; n < e; ++n) {
                NeumaierSum s;
                for (std::size_t k = 0; k < g.dim(); ++k) {
                    st.for_each_partner(nodes[n], k, [&](std::size_t y, double w) {
                        if (in[y]) s.add(w * fn(nodes[n], y));
                    });
                }
                part[n] = s.value() * cv;
            }
        });
    } else {
        std::vector<Point> pts(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) pts[i] = g.point(nodes[i]);
        parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                NeumaierSum s;
                for (std::size_t j = 0; j < nodes.size(); ++j) {
                    if (j != i) s.add(density_eval(K, pts[i], pts[j]) * fn(nodes[i], nodes[j]));
                }
                part[i] = s.value() * cv * cv;
            }
        });
    }
    return compensated_sum(part);
}

void require_certificate(const Supersolution& s) {
    const double tol = 1e-6;
    if (!s.solution.converged || s.certificate < -tol)
        throw Error(ErrorCode::PreconditionViolation, "supersolution certificate missing or negative");
}

} // namespace

Grid cell_centred(const AnisoRect& r, const std::vector<std::size_t>& n, double stagger) {
    if (n.size() != r.dim()) throw Error(ErrorCode::InvalidArgument, "node counts do not match the dimension");
    std::vector<double> lo(r.dim()), h(r.dim());
    for (std::size_t k = 0; k < r.dim(); ++k) {
        if (n[k] < 1) throw Error(ErrorCode::InvalidArgument, "need at least one node per axis");
        h[k] = 2 * r.half_width(k) / static_cast<double>(n[k]);
        lo[k] = r.lower(k) + (0.5 + stagger) * h[k];
    }
    return Grid(lo, h, n);
}

Grid padded(const AnisoRect& r, const std::vector<std::size_t>& n, std::size_t layers) {
    const Grid base = cell_centred(r, n);
    std::vector<double> lo(r.dim()), h(r.dim());
    std::vector<std::size_t> m(r.dim());
    for (std::size_t k = 0; k < r.dim(); ++k) {
        h[k] = base.h(k);
        lo[k] = base.lo(k) - static_cast<double>(layers) * h[k];
        m[k] = n[k] + 2 * layers;
    }
    return Grid(lo, h, m);
}

Grid vertex_grid(const AnisoRect& r, const std::vector<std::size_t>& cells, std::size_t padding) {
    if (cells.size() != r.dim()) throw Error(ErrorCode::InvalidArgument, "cell counts do not match the dimension");
    std::vector<double> lo(r.dim()), h(r.dim());
    std::vector<std::size_t> n(r.dim());
    for (std::size_t k = 0; k < r.dim(); ++k) {
        if (cells[k] < 2) throw Error(ErrorCode::InvalidArgument, "need at least two cells per axis");
        h[k] = 2 * r.half_width(k) / static_cast<double>(cells[k]);
        lo[k] = r.lower(k) - static_cast<double>(padding) * h[k];
        n[k] = cells[k] + 1 + 2 * padding;
    }
    return Grid(lo, h, n);
}

double lp_norm(const GridFunction& u, const std::optional<AnisoRect>& r, double p) {
    if (!(p > 0)) throw Error(ErrorCode::InvalidArgument, "L^p exponent must be positive");
    const Grid& g = u.grid();
    NeumaierSum s;
    double peak = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (r && !r->contains(g.point(i))) continue;
        peak = std::max(peak, std::abs(u[i]));
    }
    if (peak == 0) return 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (r && !r->contains(g.point(i))) continue;
        s.add(std::pow(std::abs(u[i]) / peak, p));
    }
    return peak * std::pow(s.value() * g.cell_volume(), 1.0 / p);
}

double node_mean(const GridFunction& u, const AnisoRect& r, const std::function<double(double)>& f) {
    const auto nodes = require_nodes(u.grid(), r, "node_mean");
    NeumaierSum s;
    for (std::size_t i : nodes) s.add(f(u[i]));
    return s.value() / static_cast<double>(nodes.size());
}

double node_min(const GridFunction& u, const AnisoRect& r) {
    double m = kInf;
    for (std::size_t i : require_nodes(u.grid(), r, "node_min")) m = std::min(m, u[i]);
    return m;
}

double node_max(const GridFunction& u, const AnisoRect& r) {
    double m = -kInf;
    for (std::size_t i : require_nodes(u.grid(), r, "node_max")) m = std::max(m, u[i]);
    return m;
}

double poly_bump(const Point& x, const Point& c, const std::vector<double>& w) {
    double v = 1;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double s = (x[k] - c[k]) / w[k];
        if (std::abs(s) >= 1) return 0;
        const double t = 1 - s * s;
        v *= t * t * t;
    }
    return v;
}

// ---- Sobolev -----------------------------------------------------------

SobolevResult sobolev_check(const AnisotropyIndices& idx, const std::vector<GridFunction>& trials) {
    const double theta = idx.theta();
    const auto K = KernelFamily::axes(idx);
    SobolevResult out;
    for (const auto& u : trials) {
        const double e = energy_form(K, std::nullopt, u, u);
        if (!(e > 0)) {
            ++out.skipped;
            continue;
        }
        const double n = lp_norm(u, std::nullopt, theta);
        out.ratios.push_back(n * n / e);
        out.max_ratio = std::max(out.max_ratio, out.ratios.back());
    }
    return out;
}

LocalSobolev sobolev_local_check(const KernelFamily& K, const CutoffSpec& spec, const GridFunction& u) {
    const auto& idx = K.indices();
    const AnisoRect inner(idx, spec.center, spec.r);
    const AnisoRect outer(idx, spec.center, spec.lambda * spec.r);
    LocalSobolev out;
    const double n = lp_norm(u, inner, idx.theta());
    out.lhs = n * n;
    out.energy = energy_form(K, outer, u, u);
    const double l2 = lp_norm(u, outer, 2.0);
    out.l2_term = std::pow(spec.r, -idx.alpha_max()) * cutoff_sum(idx, spec.lambda) * l2 * l2;
    const double den = out.energy + out.l2_term;
    out.measured_c = den > 0 ? out.lhs / den : 0.0;
    return out;
}

ScaleSweep sobolev_scale_sweep(const AnisotropyIndices& idx, const std::function<double(const Point&)>& u,
                               const std::vector<double>& support_half_width, const std::vector<double>& lambdas,
                               std::size_t nodes_per_axis) {
    const std::size_t d = idx.dim();
    if (support_half_width.size() != d) throw Error(ErrorCode::InvalidArgument, "support width per axis expected");
    if (nodes_per_axis < 8) throw Error(ErrorCode::InvalidArgument, "at least 8 nodes per axis");
    ScaleSweep out;
    out.lambdas = lambdas;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const auto psi = scale_map(idx, lambdas[i]);
        const double shift = 0.25 * static_cast<double>(i % 4);
        std::vector<double> lo(d), h(d);
        std::vector<std::size_t> n(d, nodes_per_axis);
        for (std::size_t k = 0; k < d; ++k) {
            const double half = 1.25 * support_half_width[k] * psi.diagonal()[k];
            h[k] = 2 * half / static_cast<double>(nodes_per_axis - 1);
            lo[k] = -half + shift * h[k];
        }
        const Grid g(lo, h, n);
        const auto ug = GridFunction::sample(g, [&](const Point& x) { return u(psi.inverse(x)); });
        const auto r = sobolev_check(idx, {ug});
        if (r.ratios.empty()) throw Error(ErrorCode::InvalidArgument, "trial function has zero energy");
        out.ratios.push_back(r.ratios.front());
    }
    const auto [mn, mx] = std::minmax_element(out.ratios.begin(), out.ratios.end());
    out.drift = *mx / *mn - 1;
    return out;
}

TailMeasure weak_tail_measure(const AnisotropyIndices& idx, const std::vector<double>& ts,
                              std::size_t points_per_axis) {
    if (ts.size() < 2) throw Error(ErrorCode::ExponentFitUnreliable, "need at least two levels");
    const std::size_t d = idx.dim();
    TailMeasure out;
    out.ts = ts;
    for (double t : ts) {
        if (!(t > 0 && t <= 1)) throw Error(ErrorCode::InvalidArgument, "levels must lie in (0, 1]");
        const double T = 1 / (t * t);
        const double last = idx.alpha(d - 1);
        if (d == 1) {
            out.measures.push_back(2 * std::pow(T, 1 / last));
            continue;
        }
        // Midpoint lattice over the first d-1 axes.
        std::vector<double> R(d - 1), step(d - 1);
        double cell = 1;
        for (std::size_t k = 0; k + 1 < d; ++k) {
            R[k] = std::pow(T, 1 / idx.alpha(k));
            step[k] = 2 * R[k] / static_cast<double>(points_per_axis);
            cell *= step[k];
        }
        std::size_t total = 1;
        for (std::size_t k = 0; k + 1 < d; ++k) total *= points_per_axis;
        std::vector<double> part(std::max<std::size_t>(1, total / 4096 + 1), 0.0);
        const std::size_t chunk = 4096;
        parallel_for(part.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t c = b; c < e; ++c) {
                NeumaierSum s;
                for (std::size_t flat = c * chunk; flat < std::min(total, (c + 1) * chunk); ++flat) {
                    std::size_t rest = flat;
                    double used = 0;
                    for (std::size_t k = 0; k + 1 < d; ++k) {
                        const std::size_t i = rest % points_per_axis;
                        rest /= points_per_axis;
                        const double xi = -R[k] + (static_cast<double>(i) + 0.5) * step[k];
                        used += std::pow(std::abs(xi), idx.alpha(k));
                    }
                    if (used < T) s.add(2 * std::pow(T - used, 1 / last));
                }
                part[c] = s.value();
            }
        });
        out.measures.push_back(compensated_sum(part) * cell);
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(out.measures[i] > 0)) throw Error(ErrorCode::ExponentFitUnreliable, "empty sublevel set");
        lx.push_back(std::log(ts[i]));
        ly.push_back(std::log(out.measures[i]));
    }
    try {
        out.fit = ols(lx, ly);
    } catch (const Error& e) {
        throw Error(ErrorCode::ExponentFitUnreliable, e.what());
    }
    if (!std::isfinite(out.fit.slope)) throw Error(ErrorCode::ExponentFitUnreliable, "non-finite slope");
    return out;
}

// ---- Poincare ----------------------------------------------------------

PoincareResult poincare_check(const KernelFamily& K, const Pattern& v, const Point& x0,
                              const std::vector<double>& radii, std::size_t nodes_per_axis) {
    const auto& idx = K.indices();
    PoincareResult out;
    for (double r : radii) {
        if (!(r > 0 && r <= 1)) throw Error(ErrorCode::InvalidRadius, "Poincare radii must lie in (0, 1]");
        const AnisoRect rect(idx, x0, r);
        const Grid g = cell_centred(rect, std::vector<std::size_t>(idx.dim(), nodes_per_axis));
        const auto vg = GridFunction::sample(g, [&](const Point& x) { return v(x, rect); });
        NeumaierSum mean;
        for (double x : vg.values()) mean.add(x);
        const double m = mean.value() / static_cast<double>(g.size());
        NeumaierSum num;
        for (double x : vg.values()) num.add((x - m) * (x - m));
        const double e = energy_form(K, rect, vg, vg);
        if (!(e > 0)) throw Error(ErrorCode::InvalidArgument, "pattern is constant on the rectangle");
        out.radii.push_back(r);
        out.ratios.push_back(num.value() * g.cell_volume() / e);
        out.prefactor = std::max(out.prefactor, out.ratios.back() / std::pow(r, idx.alpha_max()));
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < out.radii.size(); ++i) {
        lx.push_back(std::log(out.radii[i]));
        ly.push_back(std::log(out.ratios[i]));
    }
    out.fit = ols(lx, ly);
    return out;
}

// ---- Supersolution diagnostics -----------------------------------------

double log_moment_lhs(const KernelFamily& K, const GridFunction& u, const AnisoRect& r) {
    const Grid& g = u.grid();
    std::vector<double> lu(g.size(), 0.0);
    for (std::size_t i : require_nodes(g, r, "log_moment")) {
        if (!(u[i] > 0)) throw Error(ErrorCode::PreconditionViolation, "u must be positive on the rectangle");
        lu[i] = std::log(u[i]);
    }
    return pair_sum(K, g, r, [&](std::size_t x, std::size_t y) { return std::cosh(lu[y] - lu[x]) - 1; });
}

LogMoment log_moment_check(const Supersolution& s, const CutoffSpec& spec, double eps, double q) {
    require_certificate(s);
    if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (!(q > 2)) throw Error(ErrorCode::InvalidArgument, "q must exceed 2");
    const auto& K = s.problem.kernel;
    const auto& idx = K.indices();
    const AnisoRect inner(idx, spec.center, spec.r);
    const AnisoRect outer(idx, spec.center, spec.lambda * spec.r);
    if (!rect_inside(outer, s.problem.omega))
        throw Error(ErrorCode::PreconditionViolation, "M_{lambda r} must lie inside the supersolution domain");
    const auto& u = s.solution.u;
    if (node_min(u, outer) < eps) throw Error(ErrorCode::PreconditionViolation, "u < eps on M_{lambda r}");
    LogMoment out;
    out.lhs = log_moment_lhs(K, u, inner);
    out.base = cutoff_sum(idx, spec.lambda) * std::pow(spec.r, -idx.alpha_max()) * outer.volume();
    out.f_term = lp_norm(s.problem.f, outer, q) * std::pow(outer.volume(), q / (q - 1)) / eps;
    out.rhs_unit = out.base + out.f_term;
    out.measured_c = std::max(0.0, out.lhs - out.f_term) / out.base;
    return out;
}

double flip_product(const GridFunction& u, const AnisoRect& r, double pbar) {
    if (!(pbar > 0 && pbar < 1)) throw Error(ErrorCode::InvalidArgument, "pbar must lie in (0, 1)");
    const auto nodes = require_nodes(u.grid(), r, "flip_product");
    double lo = kInf, hi = -kInf;
    for (std::size_t i : nodes) {
        if (!(u[i] > 0)) throw Error(ErrorCode::PreconditionViolation, "u must be positive for negative powers");
        lo = std::min(lo, u[i]);
        hi = std::max(hi, u[i]);
    }
    if (lo == hi) return 1.0;
    // Both means relative to the geometric mean keep the powers bounded.
    NeumaierSum lm;
    for (std::size_t i : nodes) lm.add(std::log(u[i]));
    const double c = lm.value() / static_cast<double>(nodes.size());
    NeumaierSum plus, minus;
    for (std::size_t i : nodes) {
        const double z = std::log(u[i]) - c;
        plus.add(std::exp(pbar * z));
        minus.add(std::exp(-pbar * z));
    }
    const double n = static_cast<double>(nodes.size());
    return std::pow(plus.value() / n, 1 / pbar) * std::pow(minus.value() / n, 1 / pbar);
}

FlipResult flip_check(const std::vector<Supersolution>& family, const AnisoRect& r, const std::vector<double>& pbars) {
    FlipResult out;
    out.pbars = pbars;
    out.max_product.assign(pbars.size(), 0.0);
    for (const auto& s : family) {
        require_certificate(s);
        const auto& u = s.solution.u;
        for (std::size_t j = 0; j < pbars.size(); ++j)
            out.max_product[j] = std::max(out.max_product[j], flip_product(u, r, pbars[j]));
        const auto nodes = require_nodes(u.grid(), r, "flip_check");
        NeumaierSum m;
        for (std::size_t i : nodes) m.add(std::log(u[i]));
        const double mean = m.value() / static_cast<double>(nodes.size());
        NeumaierSum v;
        for (std::size_t i : nodes) {
            const double z = std::log(u[i]) - mean;
            v.add(z * z);
        }
        // ||.||^2_{L^2} / |M_r| with the node average standing in for the integral mean.
        out.max_log_bmo = std::max(out.max_log_bmo, v.value() / static_cast<double>(nodes.size()));
    }
    return out;
}

MoserTable moser_sequence(const GridFunction& u, const AnisotropyIndices& idx, const Point& x0, double r, double p0,
                          std::size_t steps, double p_cap) {
    if (!(p0 > 0)) throw Error(ErrorCode::InvalidArgument, "p0 must be positive");
    const double beta = idx.beta();
    if (!(beta > 1)) throw Error(ErrorCode::SobolevExponentUndefined, "Moser iteration needs beta > 1");
    const AnisoRect outer(idx, x0, 2 * r);
    for (std::size_t i : require_nodes(u.grid(), outer, "moser_sequence")) {
        if (!(u[i] > 0)) throw Error(ErrorCode::PreconditionViolation, "u must be positive on M_{2r}");
    }
    MoserTable out;
    out.inf_u = node_min(u, AnisoRect(idx, x0, r));
    double p = p0;
    for (std::size_t n = 0; n <= steps; ++n) {
        if (p > p_cap) {
            out.truncated = true;
            break;
        }
        const double rn = (static_cast<double>(n) + 2) / (static_cast<double>(n) + 1) * r;
        const AnisoRect rect(idx, x0, rn);
        const auto nodes = require_nodes(u.grid(), rect, "moser_sequence");
        double lo = kInf, hi = -kInf;
        for (std::size_t i : nodes) {
            lo = std::min(lo, u[i]);
            hi = std::max(hi, u[i]);
        }
        double value = lo;
        if (lo != hi) {
            // log mean exp(-p log u), shifted by its largest exponent.
            const double top = -p * std::log(lo);
            NeumaierSum s;
            for (std::size_t i : nodes) s.add(std::exp(-p * std::log(u[i]) - top));
            const double lme = top + std::log(s.value() / static_cast<double>(nodes.size()));
            value = std::exp(-lme / p);
        }
        out.steps.push_back({n, rn, p, value});
        p *= beta / (beta - 1);
    }
    if (!out.steps.empty()) out.ratio = out.inf_u / out.steps.back().value;
    return out;
}

MoserTable moser_sequence(const Supersolution& s, const Point& x0, double r, double p0, std::size_t steps,
                          double p_cap) {
    require_certificate(s);
    return moser_sequence(s.solution.u, s.problem.kernel.indices(), x0, r, p0, steps, p_cap);
}

// ---- Weak Harnack ------------------------------------------------------

HarnackTerms harnack_terms(const Supersolution& s, double q) {
    require_certificate(s);
    const auto& K = s.problem.kernel;
    const auto& idx = K.indices();
    const double beta = idx.beta();
    if (!(q > std::max(2.0, beta)))
        throw Error(ErrorCode::PreconditionViolation, "q must exceed max{2, beta}");
    const AnisoRect& dom = s.problem.omega;
    const double r = dom.radius();
    const auto& u = s.solution.u;
    const Grid& g = u.grid();
    const auto in_dom = members(g, dom);
    double scale_u = 0;
    for (double v : u.values()) scale_u = std::max(scale_u, std::abs(v));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (in_dom[i] && u[i] < -1e-9 * std::max(1.0, scale_u))
            throw Error(ErrorCode::PreconditionViolation, "u must be nonnegative in the domain");
    }
    HarnackTerms t{0, 0, 0, 0, false, u, dom, idx};
    const AnisoRect quarter(idx, dom.center(), r / 4);
    t.inf_quarter = node_min(u, quarter);
    t.sup_quarter = node_max(u, quarter);

    const AnisoRect mid(idx, dom.center(), 15 * r / 16);
    const auto nodes = require_nodes(g, mid, "harnack_terms");
    const AxisStencil st(K, g);
    const ExteriorPolicy neg = negative_part(u.exterior());
    std::vector<double> tail(nodes.size(), 0.0);
    parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            const std::size_t x = nodes[n];
            const Point p = g.point(x);
            NeumaierSum acc;
            for (std::size_t k = 0; k < g.dim(); ++k) {
                st.for_each_partner(x, k, [&](std::size_t y, double w) {
                    if (!in_dom[y] && u[y] < 0) acc.add(-w * u[y]);
                });
                const std::size_t i = g.index_along(x, k);
                for (int dir : {-1, 1})
                    acc.add(tail_moments(neg, p, k, dir, st.tail_start(k, i, dir), K.alpha(k), K.coefficient()).m1);
            }
            tail[n] = 2 * acc.value();
        }
    });
    const double sup_tail = *std::max_element(tail.begin(), tail.end());
    t.tail_infinite = !std::isfinite(sup_tail);
    t.tail = std::pow(r, idx.alpha_max()) * sup_tail;
    t.f_norm = std::pow(r, idx.alpha_max() * (1 - beta / q)) * lp_norm(s.problem.f, mid, q);
    return t;
}

double harnack_mean(const HarnackTerms& t, double p0) {
    if (!(p0 > 0)) throw Error(ErrorCode::InvalidArgument, "p0 must be positive");
    const AnisoRect half(t.idx, t.domain.center(), t.domain.radius() / 2);
    return std::pow(node_mean(t.u, half, [p0](double v) { return std::pow(std::max(v, 0.0), p0); }), 1 / p0);
}

double harnack_deficit(const HarnackTerms& t, double c, double p0) {
    return c * harnack_mean(t, p0) - t.inf_quarter - t.tail - t.f_norm;
}

HarnackScan weak_harnack_check(const std::vector<HarnackTerms>& family, const std::vector<double>& p0s) {
    if (family.empty() || p0s.empty()) throw Error(ErrorCode::InvalidArgument, "empty Harnack scan");
    HarnackScan out;
    out.p0s = p0s;
    for (double p0 : p0s) {
        double c = kInf;
        for (const auto& t : family) {
            if (t.tail_infinite) continue;  // the inequality holds trivially
            const double m = harnack_mean(t, p0);
            if (m > 0) c = std::min(c, (t.inf_quarter + t.tail + t.f_norm) / m);
        }
        out.c_max.push_back(c);
    }
    const auto best = std::max_element(out.c_max.begin(), out.c_max.end());
    out.best_c = *best;
    out.best_p0 = p0s[static_cast<std::size_t>(best - out.c_max.begin())];
    for (const auto& t : family)
        out.deficits.push_back(t.tail_infinite ? -kInf : harnack_deficit(t, out.best_c, out.best_p0));
    return out;
}

std::vector<Supersolution> harnack_family(const KernelFamily& K, const Grid& grid, std::size_t count,
                                          std::uint64_t seed, double tol) {
    const auto& idx = K.indices();
    const std::size_t d = idx.dim();
    const AnisoRect omega(idx, Point(d, 0.0), 1.0);
    std::vector<Supersolution> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(stream_seed(seed, i));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        auto uni = [&](double a, double b) { return a + (b - a) * U(rng); };
        auto bump = [&](std::size_t axis) {
            AxisBump b;
            b.axis = axis;
            const double start = uni(1.1, 2.5), width = uni(0.3, 1.5);
            if (U(rng) < 0.5) {
                b.lo = start;
                b.hi = start + width;
            } else {
                b.lo = -start - width;
                b.hi = -start;
            }
            b.height = uni(0.5, 3.0);
            b.center.assign(d, 0.0);
            b.half_width.assign(d, 0.0);
            for (std::size_t j = 0; j < d; ++j) {
                b.center[j] = uni(-0.3, 0.3);
                b.half_width[j] = uni(1.4, 2.0);
            }
            return b;
        };
        ExteriorPolicy policy = ZeroExterior{};
        double slack = 0;
        switch (i % 4) {
        case 0: policy = BumpExterior{{bump(rng() % d)}}; break;
        case 1: slack = uni(0.5, 2.0); break;
        case 2:
            policy = ConstantExterior{uni(0.1, 1.0)};
            slack = uni(0.0, 1.0);
            break;
        default: policy = BumpExterior{{bump(0), bump(d - 1)}}; break;
        }
        GridFunction g(grid, policy);
        g.fill_exterior(omega);
        DirichletProblem p{K, omega, GridFunction(grid), g};
        out.push_back(make_supersolution(p, slack, tol));
    }
    return out;
}

std::vector<ProbePoint> strong_harnack_probe(const KernelFamily& K, const Grid& grid,
                                             const std::vector<double>& distances, double c, double p0, double tol) {
    const auto& idx = K.indices();
    const std::size_t d = idx.dim();
    const AnisoRect omega(idx, Point(d, 0.0), 1.0);
    const double q = std::max(2.0, idx.beta()) + 0.5;
    std::vector<ProbePoint> out;
    for (double D : distances) {
        if (!(D > 1)) throw Error(ErrorCode::InvalidArgument, "probe distance must exceed 1");
        AxisBump b;
        b.axis = 0;
        b.lo = D;
        b.hi = D + 1;
        b.height = std::pow(D, 1 + idx.alpha(0));
        b.center.assign(d, 0.0);
        b.half_width.assign(d, 0.0);
        for (std::size_t j = 1; j < d; ++j) b.half_width[j] = 0.5 * grid.h(j);
        GridFunction g(grid, BumpExterior{{b}});
        g.fill_exterior(omega);
        const auto s = make_supersolution({K, omega, GridFunction(grid), g}, 0.0, tol);
        const auto t = harnack_terms(s, q);
        ProbePoint pt;
        pt.distance = D;
        pt.height = b.height;
        pt.sup_over_inf = t.inf_quarter > 0 ? t.sup_quarter / t.inf_quarter : kInf;
        pt.deficit = harnack_deficit(t, c, p0);
        out.push_back(pt);
    }
    return out;
}

// ---- Oscillation decay and Hoelder fits --------------------------------

TheoryDelta theory_delta(double c_a, double p, double theta) {
    if (!(c_a >= 1) || !(p > 0) || !(theta > 1))
        throw Error(ErrorCode::InvalidArgument, "need c_a >= 1, p > 0 and Theta > 1");
    TheoryDelta t;
    t.kappa = 1 / (2 * c_a * std::pow(2.0, 1 / p));
    t.delta = std::log(2 / (2 - t.kappa)) / std::log(theta);
    t.identity_residual = std::abs((1 - t.kappa / 2) - std::pow(theta, -t.delta));
    return t;
}

OscillationDecay oscillation_decay(const GridFunction& u, const AnisotropyIndices& idx, const Point& x0, double r,
                                   double theta, std::size_t max_scales) {
    if (!(theta > 1)) throw Error(ErrorCode::InvalidArgument, "Theta must exceed 1");
    const Grid& g = u.grid();
    OscillationDecay out;
    for (std::size_t n = 0; n < max_scales; ++n) {
        const double rn = r * std::pow(theta, -static_cast<double>(n));
        const AnisoRect rect(idx, x0, rn);
        const auto nodes = nodes_in(g, rect);
        if (nodes.size() < 2) break;
        double lo = kInf, hi = -kInf;
        for (std::size_t i : nodes) {
            lo = std::min(lo, u[i]);
            hi = std::max(hi, u[i]);
        }
        out.scales.push_back(n);
        out.radii.push_back(rn);
        out.osc.push_back(hi - lo);
    }
    out.exact = !out.osc.empty() && std::all_of(out.osc.begin(), out.osc.end(), [](double o) { return o == 0; });
    if (out.exact) return out;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < out.osc.size(); ++i) {
        if (out.osc[i] > 0) {
            x.push_back(static_cast<double>(out.scales[i]));
            y.push_back(std::log(out.osc[i]));
        }
    }
    if (x.size() < 3) {
        std::ostringstream os;
        os << "only " << x.size() << " usable scales";
        throw Error(ErrorCode::FitUnreliable, os.str());
    }
    out.fit = ols(x, y);
    out.delta = -out.fit.slope / std::log(theta);
    out.geometric = true;
    for (std::size_t i = 1; i < out.osc.size(); ++i)
        if (!(out.osc[i] < out.osc[i - 1])) out.geometric = false;
    return out;
}

HolderFit holder_fit(const GridFunction& u, const AnisotropyIndices& idx, const AnisoRect& region, double f_norm,
                     std::size_t samples, std::uint64_t seed) {
    const Grid& g = u.grid();
    const auto nodes = require_nodes(g, region, "holder_fit");
    if (nodes.size() < 2) throw Error(ErrorCode::FitUnreliable, "need at least two nodes");
    double sup = 0;
    for (double v : u.values()) sup = std::max(sup, std::abs(v));
    HolderFit out;
    const double floor = 1e-13 * std::max(sup, 1e-300);
    const double a = idx.alpha_min() / idx.alpha_max();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);

    std::vector<double> le, lm, ld;
    std::vector<std::pair<double, double>> pairs;  // (|x - y|, |du|)
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t i = nodes[pick(rng)], j = nodes[pick(rng)];
        if (i == j) continue;
        const Point x = g.point(i), y = g.point(j);
        double e2 = 0;
        for (std::size_t k = 0; k < x.size(); ++k) e2 += (x[k] - y[k]) * (x[k] - y[k]);
        const double e = std::sqrt(e2);
        const double m = metric_dist(idx, x, y);
        if (e <= 1 && m > std::pow(e, a) * (1 + 1e-12)) out.gauge_ok = false;
        const double du = std::abs(u[i] - u[j]);
        ++out.pairs;
        if (du <= floor || m >= 1) continue;
        le.push_back(std::log(e));
        lm.push_back(std::log(m));
        ld.push_back(std::log(du));
        pairs.emplace_back(e, du);
    }
    if (ld.size() < 3) {
        out.exact = true;
        return out;
    }
    out.euclid = ols(le, ld);
    out.metric = ols(lm, ld);
    const double scale = sup + f_norm;
    for (const auto& [e, du] : pairs)
        out.prefactor = std::max(out.prefactor, du / (std::pow(e, out.euclid.slope) * scale));

    for (std::size_t k = 0; k < g.dim(); ++k) {
        std::vector<double> lx, ly;
        std::uniform_int_distribution<std::size_t> along(0, g.n(k) - 1);
        for (std::size_t s = 0; s < samples / 4; ++s) {
            const std::size_t i = nodes[pick(rng)];
            const std::size_t a_i = g.index_along(i, k), b_i = along(rng);
            if (a_i == b_i) continue;
            const std::size_t j = i - a_i * g.stride(k) + b_i * g.stride(k);
            if (!region.contains(g.point(j))) continue;
            const double du = std::abs(u[i] - u[j]);
            if (du <= floor) continue;
            const double e = std::abs(g.coord(k, a_i) - g.coord(k, b_i));
            lx.push_back(std::log(e));
            ly.push_back(std::log(du));
        }
        if (lx.size() >= 3) {
            try {
                out.per_axis.push_back(ols(lx, ly));
                continue;
            } catch (const Error&) {
            }
        }
        out.per_axis.push_back(LinearFit{});
    }
    return out;
}

// ---- Elementary inequalities -------------------------------------------

namespace {

struct AbSample {
    double L, X, Y;  // normalised by the largest magnitude of the three terms
};

// Smallest c2 making every sample feasible for this c1, or infinity.
double min_c2(const std::vector<AbSample>& smp, double c1) {
    constexpr double tol = 1e-10;
    std::vector<double> part(std::max<std::size_t>(1, smp.size() / 65536 + 1), 0.0);
    const std::size_t chunk = 65536;
    parallel_for(part.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            double need = 0;
            for (std::size_t i = c * chunk; i < std::min(smp.size(), (c + 1) * chunk); ++i) {
                const auto& s = smp[i];
                const double excess = c1 * s.X - s.L - tol;
                if (excess <= 0) continue;
                need = s.Y > 0 ? std::max(need, excess / s.Y) : kInf;
            }
            part[c] = need;
        }
    });
    return *std::max_element(part.begin(), part.end());
}

} // namespace

AbSuite elementary_inequality_suite(std::size_t samples, std::uint64_t seed, double c2_box) {
    AbSuite out;
    out.samples = samples;
    std::vector<AbSample> smp(samples);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double ln = std::log(1e3);
    for (auto& s : smp) {
        const long double a = std::exp(ln * (2 * U(rng) - 1));
        const long double b = std::exp(ln * (2 * U(rng) - 1));
        const long double p = 1 + 19 * (1 - U(rng));
        const long double t1 = U(rng), t2 = U(rng);
        const long double L = (b - a) * (t1 * t1 * std::pow(a, -p) - t2 * t2 * std::pow(b, -p));
        const long double d = t1 * std::pow(a, (1 - p) / 2) - t2 * std::pow(b, (1 - p) / 2);
        const long double X = d * d;
        const long double Y = p / (p - 1) * (t1 - t2) * (t1 - t2) * (std::pow(b, 1 - p) + std::pow(a, 1 - p));
        const long double m = std::max({std::abs(L), X, Y, 1e-300L});
        s = {static_cast<double>(L / m), static_cast<double>(X / m), static_cast<double>(Y / m)};
    }
    for (int k = 0; k <= 12; ++k) {
        const double c1 = std::ldexp(1.0, -k);
        out.frontier.push_back({c1, min_c2(smp, c1)});
    }
    // Largest c1 with c2 inside the box, refined by bisection.
    double good = 0, bad = 0;
    for (const auto& pt : out.frontier) {
        if (pt.c2 <= c2_box) {
            good = pt.c1;
            break;
        }
        bad = pt.c1;
    }
    if (good == 0) return out;
    out.feasible = true;
    if (bad == 0) bad = 2 * good;
    for (int it = 0; it < 30 && min_c2(smp, bad) <= c2_box; ++it) {
        good = bad;
        bad *= 2;
    }
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (good + bad);
        if (min_c2(smp, mid) <= c2_box)
            good = mid;
        else
            bad = mid;
    }
    out.tightest = {good, min_c2(smp, good)};
    return out;
}

InterpolationCheck interpolation_check(const GridFunction& f, double beta, double q, double a) {
    if (!(beta > 1) || !(q > beta) || !(a > 0))
        throw Error(ErrorCode::InvalidArgument, "need beta > 1, q > beta and a > 0");
    InterpolationCheck out;
    out.lhs = lp_norm(f, std::nullopt, q / (q - 1));
    out.rhs = beta / q * a * lp_norm(f, std::nullopt, beta / (beta - 1)) +
              (q - beta) / q * std::pow(a, -beta / (q - beta)) * lp_norm(f, std::nullopt, 1.0);
    return out;
}

} // namespace anilap
