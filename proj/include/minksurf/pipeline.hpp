#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minksurf/density.hpp"
#include "minksurf/solver.hpp"

namespace minksurf {

struct ConstructionConfig {
    std::shared_ptr<const PunctureSet> punctures;  // null: round-sphere control
    std::vector<int> n_values;                     // strictly ascending, each >= minimum_n
    int grid_level = 4;
    SolveOptions solver;
    std::map<std::string, double> tolerances;
};

struct RegionLabel {
    enum Kind { KRegion, Annulus, Disc } kind = KRegion;
    int j = -1;  // puncture index for Annulus/Disc
};

struct DiscPlane {
    Vec3 normal = Vec3::Zero();  // unit, aligned with p_j
    double offset = 0.0;
    double rms = 0.0;  // rms vertex distance to the fitted plane
};

/// Facet labelling of a solved body: disc(j) iff the facet normal lies in
/// B(p_j, 1/n), annulus(j) iff in A(p_j, 1/n), K-region otherwise.
struct SurfaceDecomposition {
    ConvexPolytope body;
    int n = 0;
    std::shared_ptr<const QuadratureGrid> grid;
    std::shared_ptr<const PunctureSet> punctures;
    std::vector<RegionLabel> region_of_facet;
    std::vector<DiscPlane> disc_planes;  // one per puncture

    double disc_area(int j) const;
    double annulus_area(int j) const;
};

/// One construction step: density -> targets F_i = f(u_i) w_i -> Minkowski
/// solve -> realized, recentered, labelled body.
std::pair<SupportVector, SurfaceDecomposition> construct(
    std::shared_ptr<const QuadratureGrid> grid,
    std::shared_ptr<const PunctureSet> punctures, int n, const SolveOptions& solver_opts,
    SolveReport* report_out = nullptr);

struct DiscMetrics {
    double area = 0.0;
    double plane_rms = 0.0;
    double normal_angle = 0.0;  // angle(fitted normal, p_j)
    double boundary_convexity_defect = 0.0;  // max inward deviation / loop diameter
};

DiscMetrics disc_metrics(const SurfaceDecomposition& d, int j);

/// Discrete flux identity of the flat pieces: sum_j disc_area(j) p_j.
Vec3 equilibrium_check(const SurfaceDecomposition& d);

/// Second-difference probe of det(Hess h + h I) - 1 at a smooth direction.
/// step must lie in [1, 5] mean grid spacings; geodesic offsets along an
/// orthonormal tangent frame and its diagonals.
struct HessianProbe {
    double det_residual = 0.0;  // det(M) - 1
    double rho1 = 0.0, rho2 = 0.0;  // eigenvalues of M (curvature radii)
    double step_ratio = 0.0;        // step / mean grid spacing
};

HessianProbe hessian_probe(const SupportVector& h, const ConvexPolytope& P,
                           const UnitVector& at, double step);

double hessian_residual(const SupportVector& h, const ConvexPolytope& P,
                        const UnitVector& at, double step);

/// Mean curvature defect of the outer parallel surface at distance 1:
/// ((1+rho1)^-1 + (1+rho2)^-1)/2 - 1/2. Empty when an eigenvalue is
/// non-positive (non-convex finite-difference artifact).
std::optional<double> parallel_H_check(const SupportVector& h, const ConvexPolytope& P,
                                       const UnitVector& at, double step);

/// Fraction of K-region grid normals whose facet is realized (non-empty).
double gauss_coverage(const SurfaceDecomposition& d);

/// Boundary point recovery X = grad h + h p by central differences on the
/// exact support function. Empty when the direction is non-smooth at the
/// probing scale (step and step/2 disagree).
std::optional<Vec3> recover_point(const SupportVector& h, const ConvexPolytope& P,
                                  const UnitVector& at, double step);

struct SweepRecord {
    int n = 0;
    bool solved = false;
    std::string failure;  // non-empty when solved == false
    std::vector<double> disc_areas;
    std::vector<double> annulus_areas;
    double total_area = 0.0;
    double volume = 0.0;
    double diameter = 0.0;
    double inradius = 0.0;
    Vec3 equilibrium_defect = Vec3::Zero();
    double equilibrium_rel = 0.0;
    double hessian_median = 0.0;  // median |det - 1| over K-region probes
    int hessian_probes = 0;
    double parallel_H_median = 0.0;
    int parallel_H_excluded = 0;
    int iterations = 0;
    bool area_bound_ok = false;
    bool inradius_ok = false;
    bool diameter_ok = false;
};

struct ConvergenceReport {
    std::vector<SweepRecord> records;
    std::vector<double> hausdorff;  // between consecutive solved bodies, recentered
};

ConvergenceReport run_sweep(const ConstructionConfig& config);

}  // namespace minksurf
