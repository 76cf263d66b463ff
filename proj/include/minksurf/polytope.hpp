#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "minksurf/grid.hpp"
#include "minksurf/sphere.hpp"

namespace minksurf {

/// Support numbers h_i over the grid normals.
struct SupportVector {
    std::shared_ptr<const QuadratureGrid> grid;
    Eigen::VectorXd values;
};

/// One facet per grid normal. Empty facets (the plane does not touch the
/// body) have an empty vertex loop and zero area.
struct Facet {
    int normal_index = -1;
    std::vector<int> vertex_loop;  // CCW seen from outside
    double area = 0.0;
    double plane_offset = 0.0;
};

/// Primal edge shared by two facets; used by the solver's area Jacobian.
struct PolytopeEdge {
    int facet_a = -1;
    int facet_b = -1;
    double length = 0.0;
};

struct ConvexPolytope {
    std::vector<Vec3> vertices;
    std::vector<Facet> facets;       // aligned with facet_normals
    std::vector<Vec3> facet_normals;
    std::vector<PolytopeEdge> edges;
};

/// Strict interior point of { x : <x, u_i> <= h_i }; throws when the body is
/// empty or the normals do not positively span.
Vec3 interior_point(const SupportVector& h);

/// Halfspace intersection by dualization: dual points u_i / h_i (after
/// recentering), 3-D convex hull, hull facets <-> primal vertices. Output is
/// in the original coordinates.
ConvexPolytope realize(const SupportVector& h);

/// Planar polygon area per grid normal (shoelace in the facet plane).
std::vector<double> facet_areas(const ConvexPolytope& P);

/// Volume via (1/3) sum offset_i * area_i in an interior frame,
/// cross-checked against a signed-tetrahedra decomposition (1e-10 relative).
double volume(const ConvexPolytope& P);

/// Support function value max_v <u, v> (exact for polytopes).
double support_eval(const ConvexPolytope& P, const UnitVector& u);

/// Sampled Hausdorff distance: max_i |h_P(u_i) - h_Q(u_i)| over the sample
/// grid (exact in the dense-sampling limit for convex bodies).
double hausdorff_distance(const ConvexPolytope& P, const ConvexPolytope& Q,
                          const QuadratureGrid& sample);

/// Support numbers of the outer parallel body at distance t (h + t).
SupportVector parallel_support(const SupportVector& h, double t);

/// Translates the volume centroid to the origin; returns the translated body
/// and the applied translation.
std::pair<ConvexPolytope, Vec3> recenter(const ConvexPolytope& P);

Vec3 volume_centroid(const ConvexPolytope& P);

/// Maximum pairwise vertex distance (exact polytope diameter).
double diameter(const ConvexPolytope& P);

/// Radius of the largest ball centered at the origin inscribed in the body:
/// min_i (plane_offset_i - 0) over non-degenerate facets, for a body already
/// containing the origin. A lower bound for the true inradius.
double centered_inball_radius(const ConvexPolytope& P);

}  // namespace minksurf
