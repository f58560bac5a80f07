#include "anilap/numerics.hpp"

#include "anilap/error.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace anilap {

void NeumaierSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

double compensated_sum(const std::vector<double>& xs) noexcept {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "ols needs at least two paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0)
        throw Error(ErrorCode::InvalidArgument, "ols with degenerate abscissae");
    LinearFit f;
    f.n = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        sse += e * e;
    }
    f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
    f.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    return f;
}

namespace {
std::atomic<unsigned> g_jobs{0};
}

void set_jobs(unsigned j) noexcept { g_jobs.store(j); }

unsigned jobs() noexcept {
    unsigned j = g_jobs.load();
    if (j == 0) j = std::max(1u, std::thread::hardware_concurrency());
    return j;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(jobs(), n);
    if (workers <= 1 || n < 64) {
        if (n > 0) body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto& t : pool) t.join();
}

double symbol_constant(double alpha) {
    if (!(alpha > 0 && alpha < 2))
        throw Error(ErrorCode::InvalidIndex, "alpha must lie in (0,2)");
    if (alpha == 1.0) return std::numbers::pi;
    return alpha * (2 - alpha) * std::numbers::pi /
           (boost::math::tgamma(1 + alpha) * std::sin(std::numbers::pi * alpha / 2));
}

double near_cell_kappa(double alpha) {
    if (!(alpha > 0 && alpha < 2))
        throw Error(ErrorCode::InvalidIndex, "alpha must lie in (0,2)");
    // kappa = sum_j [ int_{j-1/2}^{j+1/2} s^{1-a} ds - j^2 int s^{-1-a} ds ],
    // resummed through the Hurwitz zeta value zeta(a-1, 3/2).
    const double s = alpha - 1;
    const double hurwitz = (std::pow(2.0, s) - 1) * boost::math::zeta(s) - std::pow(2.0, s);
    return -std::pow(0.5, 2 - alpha) / (2 - alpha) - std::pow(2.0, alpha) / alpha -
           2 / alpha * hurwitz;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

} // namespace anilap
