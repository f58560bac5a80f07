#pragma once

#include "anilap/geometry.hpp"
#include "anilap/grid.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace anilap {

// Independent symmetric stable coordinates. Axis k moves by
// sigma_k dt^{1/alpha_k} S_k per step, S_k standard with E e^{i xi S} = e^{-|xi|^alpha},
// and sigma_k = C(alpha_k)^{1/alpha_k} so the generator is the axes operator L.
struct StablePathConfig {
    AnisotropyIndices idx;
    double dt = 1e-3;
    std::vector<double> sigma;
    std::uint64_t seed = 0;
    std::size_t horizon = 1000000;  // step cap per path
};

[[nodiscard]] StablePathConfig path_config(const AnisotropyIndices& idx, double dt, std::uint64_t seed,
                                           std::size_t horizon = 1000000);

// One Chambers-Mallows-Stuck variate.
[[nodiscard]] double stable_variate(double alpha, std::mt19937_64& rng);
[[nodiscard]] std::vector<double> sample_stable(double alpha, std::size_t n, std::uint64_t seed);

struct ExitSample {
    std::vector<Point> positions;  // post-jump position at exit
    std::vector<double> times;     // horizon * dt for censored paths
    std::vector<char> exited;
    double mean_time = 0, stderr_time = 0, ci_lo = 0, ci_hi = 0;  // exited paths, 3 sigma
    std::size_t censored = 0;
    bool horizon_warning = false;  // more than 1% censored
};

// rect = nullopt means the whole space: no path exits.
[[nodiscard]] ExitSample simulate_exit(const StablePathConfig& cfg, const Point& x,
                                       const std::optional<AnisoRect>& rect, std::size_t n);

struct HarmonicCompare {
    double mc = 0, mc_stderr = 0;
    double solver = 0;
    double z = 0;
    double dt = 0;
    std::size_t paths = 0;
};

// E_x g(X_tau) by Monte Carlo against the Dirichlet solve with f = 0 and
// exterior data g.
[[nodiscard]] HarmonicCompare harmonic_measure_compare(const StablePathConfig& cfg, const AnisoRect& rect,
                                                       const ExteriorPolicy& g, const Point& x, std::size_t n,
                                                       std::size_t cells_per_axis = 256);

// Multilinear interpolation of grid values.
[[nodiscard]] double interpolate(const GridFunction& u, const Point& x);

struct KsResult {
    double statistic = 0;
    double p_value = 0;
};

[[nodiscard]] KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// Two-sided p-value of the sign counts under a fair coin (normal approximation).
[[nodiscard]] double sign_flip_pvalue(const std::vector<double>& v);

} // namespace anilap
