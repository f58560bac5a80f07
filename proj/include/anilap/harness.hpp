#pragma once

#include "anilap/energy.hpp"
#include "anilap/geometry.hpp"
#include "anilap/grid.hpp"
#include "anilap/kernels.hpp"
#include "anilap/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace anilap {

// Grid helpers shared by the experiments.

// n_k nodes per axis at the cell centres of the rectangle, so every node lies
// strictly inside it; `stagger` shifts all nodes by stagger * h_k.
[[nodiscard]] Grid cell_centred(const AnisoRect& r, const std::vector<std::size_t>& n, double stagger = 0.0);
// cells_k + 1 nodes per axis from the lower to the upper edge of the
// rectangle (the edge nodes lie outside the open rectangle), plus `padding`
// further layers on every side.
[[nodiscard]] Grid vertex_grid(const AnisoRect& r, const std::vector<std::size_t>& cells, std::size_t padding);
// Cell-centred nodes on the rectangle plus `layers` extra nodes on every side.
[[nodiscard]] Grid padded(const AnisoRect& r, const std::vector<std::size_t>& n, std::size_t layers);

// (cell volume * sum |u|^p over nodes in r)^{1/p}; r = nullopt means all nodes.
[[nodiscard]] double lp_norm(const GridFunction& u, const std::optional<AnisoRect>& r, double p);
// Node average over r.
[[nodiscard]] double node_mean(const GridFunction& u, const AnisoRect& r, const std::function<double(double)>& f);
[[nodiscard]] double node_min(const GridFunction& u, const AnisoRect& r);
[[nodiscard]] double node_max(const GridFunction& u, const AnisoRect& r);

// Smooth bump prod_k (1 - s_k^2)^3 with s_k = (x_k - c_k) / w_k, zero outside.
[[nodiscard]] double poly_bump(const Point& x, const Point& c, const std::vector<double>& w);

// ---- Sobolev -----------------------------------------------------------

struct SobolevResult {
    std::vector<double> ratios;  // ||u||^2_{L^Theta} / E(u, u), one per non-skipped trial
    double max_ratio = 0;
    std::size_t skipped = 0;     // zero-energy trials
};

// Whole-space ratios for the axes kernel; trials vanish beyond their window.
[[nodiscard]] SobolevResult sobolev_check(const AnisotropyIndices& idx, const std::vector<GridFunction>& trials);

struct LocalSobolev {
    double lhs = 0;         // ||u||^2_{L^Theta(M_r)}
    double energy = 0;      // E over M_{lambda r} x M_{lambda r}
    double l2_term = 0;     // r^{-alpha_max} cutoff_sum ||u||^2_{L^2(M_{lambda r})}
    double measured_c = 0;  // lhs / (energy + l2_term)
};

[[nodiscard]] LocalSobolev sobolev_local_check(const KernelFamily& K, const CutoffSpec& spec, const GridFunction& u);

struct ScaleSweep {
    std::vector<double> lambdas, ratios;
    double drift = 0;  // max / min - 1
};

// Ratio of u o Psi(lambda)^{-1} on grids that follow the rescaling; the node
// count is fixed and the grid offset cycles through quarter cells so that
// the discretisation differs between scales.
[[nodiscard]] ScaleSweep sobolev_scale_sweep(const AnisotropyIndices& idx, const std::function<double(const Point&)>& u,
                                             const std::vector<double>& support_half_width,
                                             const std::vector<double>& lambdas, std::size_t nodes_per_axis);

struct TailMeasure {
    std::vector<double> ts, measures;
    LinearFit fit;  // log measure against log t
};

// |{xi : psi(xi) <= t^{-2}}| by column counting on a lattice; the last axis
// is integrated exactly along each column.
[[nodiscard]] TailMeasure weak_tail_measure(const AnisotropyIndices& idx, const std::vector<double>& ts,
                                            std::size_t points_per_axis = 2000);

// ---- Poincare ----------------------------------------------------------

struct PoincareResult {
    std::vector<double> radii, ratios;  // ||v - [v]||^2_{L^2(M_r)} / E_{M_r}(v, v)
    LinearFit fit;                      // log ratio against log r
    double prefactor = 0;               // max ratio / r^{alpha_max}
};

// The pattern may depend on the rectangle (normalised patterns).
using Pattern = std::function<double(const Point&, const AnisoRect&)>;

[[nodiscard]] PoincareResult poincare_check(const KernelFamily& K, const Pattern& v, const Point& x0,
                                            const std::vector<double>& radii, std::size_t nodes_per_axis);

// ---- Supersolution diagnostics -----------------------------------------

struct LogMoment {
    double lhs = 0;  // int_{M_r} int_{M_r} (cosh(log u(y) - log u(x)) - 1) mu(x, dy) dx
    double base = 0; // cutoff_sum r^{-alpha_max} |M_{lambda r}|
    double f_term = 0;
    double rhs_unit = 0;    // base + f_term, the bound with c_1 = 1
    double measured_c = 0;  // (lhs - f_term)^+ / base
};

// Requires the supersolution certificate, M_{lambda r} inside the domain and
// u >= eps on M_{lambda r}.
[[nodiscard]] LogMoment log_moment_check(const Supersolution& s, const CutoffSpec& spec, double eps, double q);
// Same left-hand side for any positive grid function (no certificate).
[[nodiscard]] double log_moment_lhs(const KernelFamily& K, const GridFunction& u, const AnisoRect& r);

struct FlipResult {
    std::vector<double> pbars;
    std::vector<double> max_product;  // per pbar, max over the family
    double max_log_bmo = 0;           // max ||log u - [log u]||^2_{L^2(M_r)} / |M_r|
};

[[nodiscard]] double flip_product(const GridFunction& u, const AnisoRect& r, double pbar);
[[nodiscard]] FlipResult flip_check(const std::vector<Supersolution>& family, const AnisoRect& r,
                                    const std::vector<double>& pbars);

struct MoserStep {
    std::size_t n = 0;
    double radius = 0, p = 0, value = 0;  // A_n
};

struct MoserTable {
    std::vector<MoserStep> steps;
    double inf_u = 0;   // min over the M_r nodes
    bool truncated = false;
    double ratio = 0;   // inf_u / A_N
};

// Steps stop early once p_n exceeds `p_cap`.
[[nodiscard]] MoserTable moser_sequence(const GridFunction& u, const AnisotropyIndices& idx, const Point& x0, double r,
                                        double p0, std::size_t steps, double p_cap = 1e3);
[[nodiscard]] MoserTable moser_sequence(const Supersolution& s, const Point& x0, double r, double p0,
                                        std::size_t steps, double p_cap = 1e3);

// ---- Weak Harnack ------------------------------------------------------

struct HarnackTerms {
    double inf_quarter = 0;  // inf over M_{r/4}
    double sup_quarter = 0;
    double tail = 0;         // r^{alpha_max} sup_{M_{15r/16}} 2 int_{M_r^c} u^- dmu
    double f_norm = 0;       // r^{alpha_max (1 - beta/q)} ||f||_{L^q(M_{15r/16})}
    bool tail_infinite = false;
    GridFunction u;
    AnisoRect domain;
    AnisotropyIndices idx;
};

// Terms of the weak Harnack inequality on the supersolution's domain M_r(x0).
[[nodiscard]] HarnackTerms harnack_terms(const Supersolution& s, double q);
// (mean over M_{r/2} of u^{p0})^{1/p0}.
[[nodiscard]] double harnack_mean(const HarnackTerms& t, double p0);
// c mean - inf - tail - f_norm.
[[nodiscard]] double harnack_deficit(const HarnackTerms& t, double c, double p0);

struct HarnackScan {
    std::vector<double> p0s;
    std::vector<double> c_max;  // per p0, largest c with D <= 0 on every member
    double best_p0 = 0, best_c = 0;
    std::vector<double> deficits;  // D at (best_c, best_p0), one per member
};

[[nodiscard]] HarnackScan weak_harnack_check(const std::vector<HarnackTerms>& family, const std::vector<double>& p0s);

// Nonnegative supersolutions on M_1(0) for the given grid: distant exterior
// bumps, constant exterior data and positive slack, mixed by the seed.
[[nodiscard]] std::vector<Supersolution> harnack_family(const KernelFamily& K, const Grid& grid, std::size_t count,
                                                        std::uint64_t seed, double tol = 1e-10);

struct ProbePoint {
    double distance = 0;
    double height = 0;
    double sup_over_inf = 0;
    double deficit = 0;  // D(u) at the supplied (c, p0)
};

// Exterior bump of one cell thickness around x_2 = ... = 0 on x_1 in
// [D, D + 1]; its height grows like D^{1 + alpha_1} so the mass seen from
// M_1 stays of order one.
[[nodiscard]] std::vector<ProbePoint> strong_harnack_probe(const KernelFamily& K, const Grid& grid,
                                                           const std::vector<double>& distances, double c, double p0,
                                                           double tol = 1e-10);

// ---- Oscillation decay and Hoelder fits --------------------------------

struct TheoryDelta {
    double kappa = 0, delta = 0;
    double identity_residual = 0;  // |(1 - kappa/2) - Theta^{-delta}|
};

[[nodiscard]] TheoryDelta theory_delta(double c_a, double p, double theta);

struct OscillationDecay {
    std::vector<std::size_t> scales;
    std::vector<double> radii, osc;
    bool exact = false;  // zero oscillation at every scale
    LinearFit fit;       // log osc against n
    double delta = 0;    // -slope / log Theta
    bool geometric = false;  // osc_n <= osc_0 Theta^{-n delta} (1 + 1e-9) at every usable scale
};

// Scales with fewer than two nodes are unusable; fewer than three usable
// scales throws FitUnreliable.
[[nodiscard]] OscillationDecay oscillation_decay(const GridFunction& u, const AnisotropyIndices& idx, const Point& x0,
                                                 double r, double theta, std::size_t max_scales = 12);

struct HolderFit {
    LinearFit euclid, metric;
    std::vector<LinearFit> per_axis;  // axis-restricted pairs, Euclidean gauge
    double prefactor = 0;             // max |du| / (|x-y|^delta_E (||u||_inf + f_norm))
    bool exact = false;               // u constant on the sample
    bool gauge_ok = true;             // d(x,y) <= |x-y|^{alpha_min/alpha_max} on every pair
    std::size_t pairs = 0;
};

[[nodiscard]] HolderFit holder_fit(const GridFunction& u, const AnisotropyIndices& idx, const AnisoRect& region,
                                   double f_norm, std::size_t samples, std::uint64_t seed);

// ---- Elementary inequalities -------------------------------------------

struct AbFrontierPoint {
    double c1 = 0;
    double c2 = 0;  // smallest feasible c2 for this c1, infinity if none
};

struct AbSuite {
    std::size_t samples = 0;
    std::vector<AbFrontierPoint> frontier;
    AbFrontierPoint tightest;  // largest c1 with a feasible c2 in the search box
    bool feasible = false;
};

// Samples (a, b, p, tau1, tau2) and searches the constants of
// (b-a)(tau1^2 a^{-p} - tau2^2 b^{-p})
//     >= c1 (tau1 a^{(1-p)/2} - tau2 b^{(1-p)/2})^2 - c2 p/(p-1) (tau1-tau2)^2 (a^{1-p} + b^{1-p}).
[[nodiscard]] AbSuite elementary_inequality_suite(std::size_t samples, std::uint64_t seed, double c2_box = 100.0);

struct InterpolationCheck {
    double lhs = 0, rhs = 0;
};

// ||f||_{q/(q-1)} <= (beta/q) a ||f||_{beta/(beta-1)} + ((q-beta)/q) a^{-beta/(q-beta)} ||f||_1.
[[nodiscard]] InterpolationCheck interpolation_check(const GridFunction& f, double beta, double q, double a);

} // namespace anilap
