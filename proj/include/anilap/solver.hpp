#pragma once

#include "anilap/error.hpp"
#include "anilap/geometry.hpp"
#include "anilap/grid.hpp"
#include "anilap/grid_operator.hpp"
#include "anilap/kernels.hpp"

#include <optional>
#include <vector>

namespace anilap {

// Weak form E(u, phi) = (f, phi) in Omega, u = g outside Omega. With
// E(u, v) = -2 <L u, v> the discrete system on the Omega nodes reads
// A u = b, A = -2 L_h restricted to Omega, b = f + 2 (coupling to g).
struct DirichletProblem {
    KernelFamily kernel;
    AnisoRect omega;
    GridFunction f;  // read on the Omega nodes
    GridFunction g;  // window values outside Omega plus the exterior policy
};

struct Solution {
    GridFunction u;
    double residual = 0;  // ||b - A u||_inf / ||b||_inf
    std::size_t iterations = 0;
    double tail_error = 0;
    bool converged = false;
};

class SolveFailure : public Error {
public:
    SolveFailure(const std::string& what, Solution best)
        : Error(ErrorCode::SolveFailure, what), best_(std::move(best)) {}
    [[nodiscard]] const Solution& best() const noexcept { return best_; }

private:
    Solution best_;
};

class InteriorSystem {
public:
    InteriorSystem(const KernelFamily& K, const AnisoRect& omega, const Grid& grid);

    [[nodiscard]] const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<double>& diagonal() const noexcept { return diag_; }
    // Total weight each Omega node puts on the exterior (window and tails).
    [[nodiscard]] const std::vector<double>& exterior_weight() const noexcept { return ext_; }
    // out = A v on the Omega nodes.
    void apply(const std::vector<double>& v, std::vector<double>& out) const;
    [[nodiscard]] std::vector<double> rhs(const GridFunction& f, const GridFunction& g, double* tail_error) const;

private:
    AxisStencil st_;
    AnisoRect omega_;
    std::vector<std::size_t> nodes_;
    std::vector<long> pos_;  // window index -> Omega index or -1
    std::vector<double> diag_, ext_;
};

// Jacobi-preconditioned conjugate gradients, stopped when
// ||b - A u||_inf <= tol ||b||_inf; cap 50 sqrt(N) iterations.
[[nodiscard]] Solution solve_dirichlet(const DirichletProblem& p, double tol = 1e-10);

struct WeakDefect {
    double max_abs = 0;   // max_phi |E(u, phi) - (f, phi)|
    double relative = 0;  // same, over |b|_inf * cell volume * |phi|_1
    std::size_t tested = 0;
};

// Default test set: the cell indicators of every Omega node.
[[nodiscard]] WeakDefect verify_weak_solution(const KernelFamily& K, const AnisoRect& omega, const GridFunction& u,
                                              const GridFunction& f,
                                              const std::vector<GridFunction>* phis = nullptr);

struct Supersolution {
    DirichletProblem problem;
    Solution solution;
    double slack = 0;
    // min over Omega cell indicators of (E(u, phi) - (f, phi)) / (|b|_inf * cell volume)
    double certificate = 0;
};

// Solves with right-hand side f + s, so E(u, phi) >= (f, phi) for phi >= 0.
[[nodiscard]] Supersolution make_supersolution(const DirichletProblem& p, double slack, double tol = 1e-10);

} // namespace anilap
