#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace anilap {

using Point = std::vector<double>;

// Compensated summation (Neumaier).
class NeumaierSum {
public:
    void add(double x) noexcept;
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

[[nodiscard]] double compensated_sum(const std::vector<double>& xs) noexcept;

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares y = intercept + slope * x.
[[nodiscard]] LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

// Worker count for data-parallel loops. Results never depend on it.
void set_jobs(unsigned jobs) noexcept;
[[nodiscard]] unsigned jobs() noexcept;

// Runs body(begin, end) over disjoint chunks of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// 1-d symbol of the axis kernel:
// alpha (2 - alpha) int_R (1 - cos(xi t)) |t|^{-1-alpha} dt = C(alpha) |xi|^alpha.
[[nodiscard]] double symbol_constant(double alpha);

// Correction constant that makes the near-cell weight exact for quadratic
// increments; see grid_operator.hpp.
[[nodiscard]] double near_cell_kappa(double alpha);

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept;

} // namespace anilap
