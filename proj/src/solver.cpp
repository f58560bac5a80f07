#include "anilap/solver.hpp"

#include "anilap/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace anilap {

InteriorSystem::InteriorSystem(const KernelFamily& K, const AnisoRect& omega, const Grid& grid)
    : st_(K, grid), omega_(omega) {
    if (grid.periodic()) throw Error(ErrorCode::InvalidArgument, "Dirichlet problems need a non-periodic grid");
    pos_.assign(grid.size(), -1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!omega.contains(grid.point(i))) continue;
        if (!grid.is_inner(i))
            throw Error(ErrorCode::BoundaryStencilError, "domain touches the boundary layer of the window");
        pos_[i] = static_cast<long>(nodes_.size());
        nodes_.push_back(i);
    }
    if (nodes_.empty()) throw Error(ErrorCode::InvalidArgument, "domain contains no grid nodes");
    diag_.assign(nodes_.size(), 0.0);
    ext_.assign(nodes_.size(), 0.0);
    parallel_for(nodes_.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            const std::size_t x = nodes_[n];
            const Point p = grid.point(x);
            NeumaierSum all, ext;
            for (std::size_t k = 0; k < grid.dim(); ++k) {
                st_.for_each_partner(x, k, [&](std::size_t y, double w) {
                    all.add(w);
                    if (pos_[y] < 0) ext.add(w);
                });
                const std::size_t i = grid.index_along(x, k);
                for (int dir : {-1, 1}) {
                    const double m0 = tail_moments(ZeroExterior{}, p, k, dir, st_.tail_start(k, i, dir),
                                                   K.alpha(k), K.coefficient())
                                          .m0;
                    all.add(m0);
                    ext.add(m0);
                }
            }
            diag_[n] = 2 * all.value();
            ext_[n] = ext.value();
        }
    });
}

void InteriorSystem::apply(const std::vector<double>& v, std::vector<double>& out) const {
    out.resize(nodes_.size());
    const Grid& g = st_.grid();
    parallel_for(nodes_.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            double off = 0;
            for (std::size_t k = 0; k < g.dim(); ++k) {
                st_.for_each_partner(nodes_[n], k, [&](std::size_t y, double w) {
                    const long j = pos_[y];
                    if (j >= 0) off += w * v[static_cast<std::size_t>(j)];
                });
            }
            out[n] = diag_[n] * v[n] - 2 * off;
        }
    });
}

std::vector<double> InteriorSystem::rhs(const GridFunction& f, const GridFunction& gfun, double* tail_error) const {
    const Grid& g = st_.grid();
    std::vector<double> b(nodes_.size());
    std::vector<double> trunc(nodes_.size(), 0.0);
    const auto& K = st_.kernel();
    parallel_for(nodes_.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t n = lo; n < hi; ++n) {
            const std::size_t x = nodes_[n];
            const Point p = g.point(x);
            NeumaierSum s;
            for (std::size_t k = 0; k < g.dim(); ++k) {
                st_.for_each_partner(x, k, [&](std::size_t y, double w) {
                    if (pos_[y] < 0) s.add(w * gfun[y]);
                });
                const std::size_t i = g.index_along(x, k);
                for (int dir : {-1, 1}) {
                    const auto m = tail_moments(gfun.exterior(), p, k, dir, st_.tail_start(k, i, dir), K.alpha(k),
                                                K.coefficient());
                    s.add(m.m1);
                    trunc[n] += m.truncation;
                }
            }
            b[n] = f[x] + 2 * s.value();
        }
    });
    if (tail_error) *tail_error = *std::max_element(trunc.begin(), trunc.end());
    return b;
}

namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_problem(const DirichletProblem& p) {
    if (!p.f.grid().same_layout(p.g.grid()))
        throw Error(ErrorCode::InvalidArgument, "f and g live on different grids");
    for (std::size_t i = 0; i < p.f.grid().size(); ++i) {
        if (!std::isfinite(p.f[i]) || !std::isfinite(p.g[i]))
            throw Error(ErrorCode::InvalidArgument, "problem data must be finite");
    }
}

} // namespace

Solution solve_dirichlet(const DirichletProblem& p, double tol) {
    if (!(tol > 0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    check_problem(p);
    const InteriorSystem sys(p.kernel, p.omega, p.g.grid());
    const auto& nodes = sys.nodes();
    const std::size_t N = nodes.size();
    Solution sol{p.g, 0, 0, 0, false};
    const auto b = sys.rhs(p.f, p.g, &sol.tail_error);
    const double bnorm = inf_norm(b);
    const double target = tol * (bnorm > 0 ? bnorm : 1.0);
    const double scale = bnorm > 0 ? bnorm : 1.0;

    // Start from the exterior-weighted average of g; exact for constant data.
    std::vector<double> x(N);
    const auto& diag = sys.diagonal();
    const auto& ext = sys.exterior_weight();
    for (std::size_t n = 0; n < N; ++n) {
        const double gf = b[n] - p.f[nodes[n]];
        x[n] = ext[n] > 0 ? gf / (2 * ext[n]) : 0.0;
    }
    std::vector<double> Ax, r(N), z(N), pdir(N), Ap;
    sys.apply(x, Ax);
    for (std::size_t n = 0; n < N; ++n) r[n] = b[n] - Ax[n];

    auto write_back = [&](const std::vector<double>& xv, double res, std::size_t it, bool ok) {
        Solution s{p.g, res, it, sol.tail_error, ok};
        for (std::size_t n = 0; n < N; ++n) s.u[nodes[n]] = xv[n];
        return s;
    };

    double rn = inf_norm(r);
    std::vector<double> best = x;
    double best_res = rn;
    if (rn <= target) return write_back(x, rn / scale, 0, true);

    const auto cap = static_cast<std::size_t>(std::max(50.0, 50.0 * std::sqrt(static_cast<double>(N))));
    for (std::size_t n = 0; n < N; ++n) z[n] = r[n] / diag[n];
    pdir = z;
    double rz = dot(r, z);
    std::size_t it = 0;
    while (it < cap) {
        ++it;
        sys.apply(pdir, Ap);
        const double pAp = dot(pdir, Ap);
        if (!(pAp > 0)) break;
        const double a = rz / pAp;
        for (std::size_t n = 0; n < N; ++n) {
            x[n] += a * pdir[n];
            r[n] -= a * Ap[n];
        }
        rn = inf_norm(r);
        if (rn < best_res) {
            best_res = rn;
            best = x;
        }
        if (rn <= target) break;
        for (std::size_t n = 0; n < N; ++n) z[n] = r[n] / diag[n];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t n = 0; n < N; ++n) pdir[n] = z[n] + beta * pdir[n];
    }
    // Report the true residual of the best iterate.
    sys.apply(best, Ax);
    double true_res = 0;
    for (std::size_t n = 0; n < N; ++n) true_res = std::max(true_res, std::abs(b[n] - Ax[n]));
    Solution out = write_back(best, true_res / scale, it, true_res <= 10 * target);
    if (!out.converged) {
        std::ostringstream os;
        os << "CG stopped after " << it << " iterations at relative residual " << out.residual;
        throw SolveFailure(os.str(), out);
    }
    return out;
}

WeakDefect verify_weak_solution(const KernelFamily& K, const AnisoRect& omega, const GridFunction& u,
                                const GridFunction& f, const std::vector<GridFunction>* phis) {
    const Grid& g = u.grid();
    const InteriorSystem sys(K, omega, g);
    const auto& nodes = sys.nodes();
    const AxisStencil st(K, g);
    const double cv = g.cell_volume();

    // b = f + 2 L(u restricted to the exterior) on the Omega nodes.
    GridFunction uext = u;
    for (std::size_t x : nodes) uext[x] = 0;
    std::vector<double> resid(g.size(), 0.0), bvals(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t n = lo; n < hi; ++n) {
            const std::size_t x = nodes[n];
            resid[x] = -2 * st.apply(u, x) - f[x];
            bvals[n] = f[x] + 2 * st.apply(uext, x);
        }
    });
    double bnorm = inf_norm(bvals);
    if (bnorm == 0) bnorm = 1;

    WeakDefect wd;
    if (!phis) {
        for (std::size_t x : nodes) wd.max_abs = std::max(wd.max_abs, cv * std::abs(resid[x]));
        wd.tested = nodes.size();
        wd.relative = wd.max_abs / (cv * bnorm);
        return wd;
    }
    std::vector<char> in(g.size(), 0);
    for (std::size_t x : nodes) in[x] = 1;
    for (const auto& phi : *phis) {
        if (!phi.grid().same_layout(g)) throw Error(ErrorCode::InvalidArgument, "test function on another grid");
        NeumaierSum d;
        double l1 = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (phi[i] == 0) continue;
            if (!in[i]) throw Error(ErrorCode::SupportViolation, "test function not supported in the domain");
            d.add(cv * phi[i] * resid[i]);
            l1 += std::abs(phi[i]);
        }
        const double a = std::abs(d.value());
        wd.max_abs = std::max(wd.max_abs, a);
        if (l1 > 0) wd.relative = std::max(wd.relative, a / (cv * bnorm * l1));
        ++wd.tested;
    }
    return wd;
}

Supersolution make_supersolution(const DirichletProblem& p, double slack, double tol) {
    if (!(slack >= 0)) throw Error(ErrorCode::InvalidArgument, "slack must be nonnegative");
    DirichletProblem shifted = p;
    for (auto& v : shifted.f.values()) v += slack;
    Supersolution s{p, solve_dirichlet(shifted, tol), slack, 0};
    const Grid& g = p.g.grid();
    const InteriorSystem sys(p.kernel, p.omega, g);
    const AxisStencil st(p.kernel, g);
    std::vector<double> margin(sys.nodes().size());
    const auto b = sys.rhs(shifted.f, p.g, nullptr);
    double bnorm = inf_norm(b);
    if (bnorm == 0) bnorm = 1;
    parallel_for(margin.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t n = lo; n < hi; ++n) {
            const std::size_t x = sys.nodes()[n];
            margin[n] = (-2 * st.apply(s.solution.u, x) - p.f[x]) / bnorm;
        }
    });
    s.certificate = *std::min_element(margin.begin(), margin.end());
    return s;
}

} // namespace anilap
