#include "minksurf/solver.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace minksurf {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double residual_floor(const Eigen::VectorXd& F) { return 1e-12 * F.sum(); }

double max_rel_residual(const Eigen::VectorXd& A, const Eigen::VectorXd& F) {
    const double floor = residual_floor(F);
    double m = 0.0;
    for (Eigen::Index i = 0; i < F.size(); ++i)
        m = std::max(m, std::abs(A[i] - F[i]) / std::max(F[i], floor));
    return m;
}

Eigen::VectorXd areas_of(const ConvexPolytope& P) {
    Eigen::VectorXd A(static_cast<Eigen::Index>(P.facets.size()));
    for (std::size_t i = 0; i < P.facets.size(); ++i) A[i] = P.facets[i].area;
    return A;
}

/// Exact area Jacobian: dA_i/dh_j = l_ij / sin t_ij for adjacent facets,
/// dA_i/dh_i = -sum_j l_ij cos t_ij / sin t_ij. Symmetric; translations span
/// its kernel.
Eigen::SparseMatrix<double> area_jacobian(const ConvexPolytope& P,
                                          const QuadratureGrid& grid) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(4 * P.edges.size());
    for (const auto& e : P.edges) {
        const double c = grid.nodes[e.facet_a].vec().dot(grid.nodes[e.facet_b].vec());
        const double s = std::sqrt(std::max(1e-30, 1.0 - c * c));
        const double off = e.length / s;
        trips.emplace_back(e.facet_a, e.facet_b, off);
        trips.emplace_back(e.facet_b, e.facet_a, off);
        trips.emplace_back(e.facet_a, e.facet_a, -off * c);
        trips.emplace_back(e.facet_b, e.facet_b, -off * c);
    }
    Eigen::SparseMatrix<double> J(static_cast<int>(grid.size()),
                                  static_cast<int>(grid.size()));
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

/// Pull empty facets back onto the body so their Jacobian rows are live.
bool activate_empty(SupportVector& h, const ConvexPolytope& P) {
    bool changed = false;
    const double delta = 1e-4 * h.values.maxCoeff();
    for (std::size_t i = 0; i < h.grid->size(); ++i) {
        if (P.facets[i].vertex_loop.size() >= 3) continue;
        h.values[i] = support_eval(P, h.grid->nodes[i]) - delta;
        changed = true;
    }
    return changed;
}

}  // namespace

MinkowskiProblem::MinkowskiProblem(std::shared_ptr<const QuadratureGrid> g,
                                   Eigen::VectorXd F)
    : grid(std::move(g)), targets(std::move(F)) {
    if (!grid) fail(ErrorKind::Input, "MinkowskiProblem: null grid");
    if (static_cast<std::size_t>(targets.size()) != grid->size())
        fail(ErrorKind::Input, "MinkowskiProblem: target size does not match grid");
    for (Eigen::Index i = 0; i < targets.size(); ++i)
        if (!(targets[i] > 0.0) || !std::isfinite(targets[i]))
            fail(ErrorKind::Input,
                 "MinkowskiProblem: target " + std::to_string(i) + " is not positive");
    Vec3 closure = Vec3::Zero();
    for (std::size_t i = 0; i < grid->size(); ++i)
        closure += targets[i] * grid->nodes[i].vec();
    if (closure.norm() > 1e-8 * targets.sum())
        fail(ErrorKind::Input, "MinkowskiProblem: closure condition violated, |sum F u| = " +
                                   std::to_string(closure.norm()));
    for (const auto& w : probe_directions()) {
        double mass = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i)
            if (grid->nodes[i].vec().dot(w.vec()) > 0.0) mass += targets[i];
        if (!(mass > 0.0))
            fail(ErrorKind::Input, "MinkowskiProblem: empty open hemisphere detected");
    }
}

std::pair<SupportVector, SolveReport> solve(const MinkowskiProblem& problem,
                                            const SolveOptions& options) {
    if (!(options.tol_rel > 0) || options.max_iters < 1 ||
        !(options.line_search_shrink > 0 && options.line_search_shrink < 1))
        fail(ErrorKind::Input, "solve: invalid options");

    const auto t0 = std::chrono::steady_clock::now();
    const QuadratureGrid& grid = *problem.grid;
    const Eigen::VectorXd& F = problem.targets;
    const auto N = static_cast<Eigen::Index>(grid.size());

    SupportVector h{problem.grid, Eigen::VectorXd::Constant(N, std::sqrt(F.sum() / kFourPi))};
    if (options.initial) {
        if (options.initial->values.size() != N)
            fail(ErrorKind::Input, "solve: initial support vector has wrong size");
        h.values = options.initial->values;
    }

    SolveReport report;
    ConvexPolytope P = realize(h);
    if (activate_empty(h, P)) P = realize(h);
    Eigen::VectorXd A = areas_of(P);
    {
        // Global rescale toward matched total area (areas scale as s^2).
        const double s = std::sqrt(F.sum() / A.sum());
        h.values *= s;
        A *= s * s;
        P = realize(h);
        A = areas_of(P);
    }

    double res = max_rel_residual(A, F);
    report.residual_history.push_back(res);
    double mu = 1e-8;

    while (res > options.tol_rel) {
        if (report.iterations >= options.max_iters) {
            report.wall_time =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            fail(ErrorKind::Solver,
                 "solve: no convergence after " + std::to_string(report.iterations) +
                     " iterations, residual " + std::to_string(res));
        }
        ++report.iterations;

        Eigen::SparseMatrix<double> J = area_jacobian(P, grid);
        const Eigen::VectorXd r = A - F;
        const Eigen::VectorXd g = J.transpose() * r;
        Eigen::SparseMatrix<double> JtJ = (J.transpose() * J).pruned();
        Eigen::SparseMatrix<double> I(N, N);
        I.setIdentity();
        const double diag_scale = std::max(1e-30, JtJ.diagonal().maxCoeff());

        bool accepted = false;
        double alpha = 1.0;
        while (!accepted) {
            Eigen::SparseMatrix<double> M = JtJ;
            M += (mu * diag_scale) * I;
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(M);
            if (ldlt.info() != Eigen::Success)
                fail(ErrorKind::Solver, "solve: Jacobian factorization failed");
            Eigen::VectorXd step = ldlt.solve(-g);

            // Cap the step at a tenth of the body scale.
            const double cap = 0.1 * h.values.cwiseAbs().maxCoeff();
            const double smax = step.cwiseAbs().maxCoeff();
            if (smax > cap) step *= cap / smax;

            SupportVector h_try = h;
            h_try.values += alpha * step;
            ConvexPolytope P_try;
            bool realized = true;
            try {
                P_try = realize(h_try);
            } catch (const Error&) {
                realized = false;
            }
            if (realized) {
                if (activate_empty(h_try, P_try)) P_try = realize(h_try);
                Eigen::VectorXd A_try = areas_of(P_try);
                if ((A_try - F).norm() < r.norm()) {
                    h = h_try;
                    P = std::move(P_try);
                    A = std::move(A_try);
                    accepted = true;
                    mu = std::max(1e-12, mu * (alpha == 1.0 ? 0.25 : 1.0));
                    break;
                }
            }
            alpha *= options.line_search_shrink;
            mu *= 4.0;
            if (alpha < 1e-14)
                fail(ErrorKind::Solver, "solve: line search stalled (conditioning)");
        }

        res = max_rel_residual(A, F);
        report.residual_history.push_back(res);
    }

    // Fix the translation gauge: volume centroid at the origin.
    auto [Pc, t] = recenter(P);
    for (Eigen::Index i = 0; i < N; ++i) h.values[i] += t.dot(grid.nodes[i].vec());
    report.normalization = t;

    // Invariant: the reported residual comes from a fresh realization.
    report.final_residual = max_rel_residual(areas_of(realize(h)), F);
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(h), std::move(report)};
}

ResidualSummary verify_solution(const SupportVector& h, const MinkowskiProblem& problem) {
    if (h.grid.get() != problem.grid.get() &&
        h.grid->size() != problem.grid->size())
        fail(ErrorKind::Input, "verify_solution: grid mismatch");
    const Eigen::VectorXd A = areas_of(realize(h));
    const Eigen::VectorXd& F = problem.targets;
    const double floor = residual_floor(F);
    ResidualSummary s;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < F.size(); ++i) {
        const double rel = std::abs(A[i] - F[i]) / std::max(F[i], floor);
        s.max_rel = std::max(s.max_rel, rel);
        acc += rel;
        s.achieved_closure += A[i] * problem.grid->nodes[i].vec();
    }
    s.mean_rel = acc / static_cast<double>(F.size());
    return s;
}

double uniqueness_probe(const MinkowskiProblem& problem, const SolveOptions& options,
                        int trials) {
    if (trials < 2) fail(ErrorKind::Input, "uniqueness_probe: need at least 2 trials");
    const auto N = static_cast<Eigen::Index>(problem.grid->size());
    const double r0 = std::sqrt(problem.targets.sum() / kFourPi);

    std::vector<ConvexPolytope> bodies;
    for (int k = 0; k < trials; ++k) {
        SolveOptions opt = options;
        // Rescaled and tilted spheres. The tilt (a translation of the body)
        // must matter: a pure rescale would be undone by the solver's initial
        // global area normalization, making the trials identical.
        const double scale = k % 3 == 1 ? 0.5 : (k % 3 == 2 ? 2.0 : 1.0);
        const Vec3 c = k == 0 ? Vec3::Zero()
                              : Vec3(0.1 * r0 * probe_directions()[k % 62].vec());
        SupportVector init{problem.grid, Eigen::VectorXd::Constant(N, scale * r0)};
        for (Eigen::Index i = 0; i < N; ++i)
            init.values[i] += c.dot(problem.grid->nodes[i].vec());
        opt.initial = std::move(init);
        bodies.push_back(realize(solve(problem, opt).first));
    }

    double worst = 0.0;
    for (std::size_t a = 0; a < bodies.size(); ++a)
        for (std::size_t b = a + 1; b < bodies.size(); ++b)
            worst = std::max(worst, hausdorff_distance(bodies[a], bodies[b], *problem.grid));
    return worst;
}

}  // namespace minksurf
