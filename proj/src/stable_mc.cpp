#include "anilap/stable_mc.hpp"

#include "anilap/error.hpp"
#include "anilap/harness.hpp"
#include "anilap/numerics.hpp"
#include "anilap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace anilap {

StablePathConfig path_config(const AnisotropyIndices& idx, double dt, std::uint64_t seed, std::size_t horizon) {
    if (!(dt > 0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
    StablePathConfig cfg{idx, dt, {}, seed, horizon};
    for (double a : idx.alphas()) cfg.sigma.push_back(std::pow(symbol_constant(a), 1 / a));
    return cfg;
}

double stable_variate(double alpha, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-std::numbers::pi / 2, std::numbers::pi / 2);
    std::exponential_distribution<double> E(1.0);
    double v = U(rng);
    while (std::abs(v) >= std::numbers::pi / 2) v = U(rng);
    if (alpha == 1) return std::tan(v);
    double w = E(rng);
    while (!(w > 0)) w = E(rng);
    return std::sin(alpha * v) / std::pow(std::cos(v), 1 / alpha) *
           std::pow(std::cos(v - alpha * v) / w, (1 - alpha) / alpha);
}

std::vector<double> sample_stable(double alpha, std::size_t n, std::uint64_t seed) {
    if (!(alpha > 0 && alpha < 2)) throw Error(ErrorCode::InvalidIndex, "stability index must lie in (0, 2)");
    std::vector<double> out(n);
    constexpr std::size_t block = 4096;
    const std::size_t blocks = (n + block - 1) / block;
    parallel_for(blocks, [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            std::mt19937_64 rng(stream_seed(seed, c));
            for (std::size_t i = c * block; i < std::min(n, (c + 1) * block); ++i) out[i] = stable_variate(alpha, rng);
        }
    });
    return out;
}

ExitSample simulate_exit(const StablePathConfig& cfg, const Point& x, const std::optional<AnisoRect>& rect,
                         std::size_t n) {
    const std::size_t d = cfg.idx.dim();
    if (x.size() != d) throw Error(ErrorCode::InvalidArgument, "start point has the wrong dimension");
    if (rect && !rect->contains(x)) throw Error(ErrorCode::InvalidArgument, "start point must lie in the rectangle");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one path");
    std::vector<double> step(d);
    for (std::size_t k = 0; k < d; ++k) step[k] = cfg.sigma[k] * std::pow(cfg.dt, 1 / cfg.idx.alpha(k));
    ExitSample out;
    out.positions.assign(n, x);
    out.times.assign(n, 0.0);
    out.exited.assign(n, 0);
    const std::size_t cap = rect ? cfg.horizon : std::min<std::size_t>(cfg.horizon, 1000);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            std::mt19937_64 rng(stream_seed(cfg.seed, i));
            Point& p = out.positions[i];
            std::size_t s = 0;
            while (s < cap) {
                ++s;
                for (std::size_t k = 0; k < d; ++k) p[k] += step[k] * stable_variate(cfg.idx.alpha(k), rng);
                if (rect && !rect->contains(p)) {
                    out.exited[i] = 1;
                    break;
                }
            }
            out.times[i] = static_cast<double>(s) * cfg.dt;
        }
    });
    NeumaierSum s1;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.exited[i]) {
            ++out.censored;
            continue;
        }
        s1.add(out.times[i]);
        ++m;
    }
    out.horizon_warning = static_cast<double>(out.censored) > 0.01 * static_cast<double>(n);
    if (m > 0) {
        out.mean_time = s1.value() / static_cast<double>(m);
        NeumaierSum s2;
        for (std::size_t i = 0; i < n; ++i)
            if (out.exited[i]) s2.add((out.times[i] - out.mean_time) * (out.times[i] - out.mean_time));
        const double var = m > 1 ? s2.value() / static_cast<double>(m - 1) : 0.0;
        out.stderr_time = std::sqrt(var / static_cast<double>(m));
        out.ci_lo = out.mean_time - 3 * out.stderr_time;
        out.ci_hi = out.mean_time + 3 * out.stderr_time;
    }
    return out;
}

double interpolate(const GridFunction& u, const Point& x) {
    const Grid& g = u.grid();
    const std::size_t d = g.dim();
    std::vector<std::size_t> base(d);
    std::vector<double> frac(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double s = (x[k] - g.lo(k)) / g.h(k);
        if (s < -1e-9 || s > static_cast<double>(g.n(k) - 1) + 1e-9)
            throw Error(ErrorCode::InvalidQuery, "interpolation point outside the grid");
        const double c = std::clamp(s, 0.0, static_cast<double>(g.n(k) - 1));
        base[k] = std::min<std::size_t>(static_cast<std::size_t>(std::floor(c)), g.n(k) - 1);
        frac[k] = c - static_cast<double>(base[k]);
    }
    double v = 0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
        double w = 1;
        std::vector<std::size_t> idx(d);
        for (std::size_t k = 0; k < d; ++k) {
            const bool up = (corner >> k) & 1;
            if (up && frac[k] == 0) {
                w = 0;
                break;
            }
            idx[k] = base[k] + (up ? 1 : 0);
            w *= up ? frac[k] : 1 - frac[k];
        }
        if (w != 0) v += w * u[g.flat(idx)];
    }
    return v;
}

HarmonicCompare harmonic_measure_compare(const StablePathConfig& cfg, const AnisoRect& rect, const ExteriorPolicy& g,
                                         const Point& x, std::size_t n, std::size_t cells_per_axis) {
    const auto sample = simulate_exit(cfg, x, rect, n);
    HarmonicCompare out;
    out.paths = n;
    out.dt = cfg.dt;
    NeumaierSum s1;
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Censored paths have not left the rectangle; their data value is unknown
        // and they are counted at the exterior value of the current point.
        vals[i] = exterior_value(g, sample.positions[i]);
        s1.add(vals[i]);
    }
    out.mc = s1.value() / static_cast<double>(n);
    NeumaierSum s2;
    for (double v : vals) s2.add((v - out.mc) * (v - out.mc));
    out.mc_stderr = std::sqrt(s2.value() / static_cast<double>(n - 1) / static_cast<double>(n));

    const auto K = KernelFamily::axes(cfg.idx);
    const Grid grid = padded(rect, std::vector<std::size_t>(cfg.idx.dim(), cells_per_axis), cells_per_axis / 2);
    GridFunction gd(grid, g);
    gd.fill_exterior(rect);
    const auto sol = solve_dirichlet({K, rect, GridFunction(grid), gd}, 1e-10);
    out.solver = interpolate(sol.u, x);
    const double se = out.mc_stderr > 0 ? out.mc_stderr : 1.0 / static_cast<double>(n);
    out.z = (out.mc - out.solver) / se;
    return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "KS test needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double D = 0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        D = std::max(D, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * D;
    if (lam < 1e-3) return {D, 1.0};
    double p = 0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2 * ((k % 2) ? 1 : -1) * std::exp(-2 * k * k * lam * lam);
        p += term;
        if (std::abs(term) < 1e-16) break;
    }
    return {D, std::clamp(p, 0.0, 1.0)};
}

double sign_flip_pvalue(const std::vector<double>& v) {
    std::size_t pos = 0, tot = 0;
    for (double x : v) {
        if (x == 0) continue;
        ++tot;
        if (x > 0) ++pos;
    }
    if (tot == 0) return 1.0;
    const double n = static_cast<double>(tot);
    const double z = (static_cast<double>(pos) - n / 2) / std::sqrt(n / 4);
    return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

} // namespace anilap
