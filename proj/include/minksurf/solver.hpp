#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "minksurf/polytope.hpp"

namespace minksurf {

/// Discrete Minkowski data: positive target areas F_i per grid normal with
/// ‖Σ F_i u_i‖ ≤ 1e-8 Σ F_i and positive mass in every open probe hemisphere.
struct MinkowskiProblem {
    std::shared_ptr<const QuadratureGrid> grid;
    Eigen::VectorXd targets;

    MinkowskiProblem(std::shared_ptr<const QuadratureGrid> g, Eigen::VectorXd F);
};

struct SolveOptions {
    double tol_rel = 1e-6;
    int max_iters = 2000;
    double line_search_shrink = 0.5;
    std::optional<SupportVector> initial;
};

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0;  // max_i |A_i - F_i| / max(F_i, floor)
    std::vector<double> residual_history;
    double wall_time = 0.0;
    Vec3 normalization = Vec3::Zero();  // applied recentering translation
};

/// Damped Newton iteration on the area map A(h) = F using the exact sparse
/// area Jacobian dA_i/dh_j = l_ij / sin t_ij. Deterministic; the returned
/// support numbers describe the recentered body (volume centroid at the
/// origin). Throws ErrorKind::Solver on non-convergence or stalled steps.
std::pair<SupportVector, SolveReport> solve(const MinkowskiProblem& problem,
                                            const SolveOptions& options = {});

struct ResidualSummary {
    double max_rel = 0.0;
    double mean_rel = 0.0;
    Vec3 achieved_closure = Vec3::Zero();  // Σ A_i u_i of the realized body
};

/// Recomputes facet areas from scratch and compares against the targets.
ResidualSummary verify_solution(const SupportVector& h, const MinkowskiProblem& problem);

/// Solves the same problem from `trials` distinct deterministic
/// initializations (rescaled and tilted spheres) and returns the maximum
/// pairwise Hausdorff distance of the recentered bodies.
double uniqueness_probe(const MinkowskiProblem& problem, const SolveOptions& options,
                        int trials);

}  // namespace minksurf
