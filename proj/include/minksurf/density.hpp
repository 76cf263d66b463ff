#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "minksurf/grid.hpp"
#include "minksurf/sphere.hpp"

namespace minksurf {

/// Equilibrium puncture data: directions p_j with positive weights a_j
/// satisfying ‖sum a_j p_j‖ <= 1e-10. Requires m >= 2 and pairwise distinct
/// directions (angle > 1e-6).
struct PunctureSet {
    std::vector<UnitVector> points;
    std::vector<double> weights;

    PunctureSet(std::vector<UnitVector> pts, std::vector<double> w);
    std::size_t size() const { return points.size(); }
};

/// Canonical positive weights a_j > 0 with sum a_j p_j = 0, normalized so
/// min a_j = 1. Deterministic minimum-norm construction. Throws
/// ErrorKind::Infeasible when no strictly positive solution exists.
std::vector<double> find_equilibrium_weights(const std::vector<UnitVector>& points);

/// Certificate of infeasibility: a direction w with <p_j, w> >= 0 for all j
/// and > 0 for some j, when one exists.
std::optional<Vec3> separating_direction(const std::vector<UnitVector>& points);

/// Smallest n such that (a) 1/n^2 < 3 a_j / (4 pi) for all j and (b) the caps
/// B(p_j, 2/n) are pairwise disjoint with a 10% angular margin.
int minimum_n(const PunctureSet& punctures);

/// Radial transition profile on the annulus A(q, r): the one-parameter family
///   f_theta(s) = 1 + (lambda - 1) * S(clamp((2r - s)/r))^theta
/// with S the quintic smoothstep. Equals lambda on [0, r], 1 on [2r, 2r+eps],
/// monotone non-increasing in s.
struct TransitionProfile {
    double r = 0;
    double lambda = 1;
    double mu = 0;           // target axial annulus flux
    double shape_param = 1;  // solved theta
    double epsilon = 0;      // outer flat margin, fixed to r/4

    double operator()(double s) const;
};

/// Discrete axial flux of a radial profile over the annulus A(q, r):
///   sum_{u_i in A} w_i f(sin angle(u_i, q)) <u_i, q>.
double annulus_flux(const QuadratureGrid& grid, const UnitVector& q, double r,
                    const std::function<double(double)>& profile);

/// Solves the shape parameter so the discrete axial annulus flux matches mu
/// to within 1e-8 * mu. mu must lie strictly inside the discretely achievable
/// range [flux(f=1), flux(f=lambda)].
TransitionProfile solve_transition(double r, double lambda, double mu,
                                   const QuadratureGrid& grid, const UnitVector& q);

/// The curvature density f_n sampled on the grid; kappa_n = 1 / values.
/// values >= 1 with equality attained; values = a_j n^2 / pi on the cap nodes
/// of B(p_j, 1/n).
struct DensityField {
    std::shared_ptr<const QuadratureGrid> grid;
    Eigen::VectorXd values;
    int n = 0;
    std::shared_ptr<const PunctureSet> punctures;  // null for the m = 0 control
};

/// Assembles f_n from per-puncture transition profiles and applies the
/// discrete closure correction so that
/// ‖sum w_i f_n(u_i) u_i‖ <= 1e-9 * sum w_i f_n(u_i).
/// punctures may be null (round-sphere control, f = 1).
DensityField build_density(std::shared_ptr<const QuadratureGrid> grid,
                           std::shared_ptr<const PunctureSet> punctures, int n);

/// The discrete closure vector  sum w_i f_n(u_i) u_i.
Vec3 closure_defect(const DensityField& field);

/// Total discrete mass  sum w_i f_n(u_i).
double total_mass(const DensityField& field);

}  // namespace minksurf
