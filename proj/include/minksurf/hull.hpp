#pragma once

#include <array>
#include <vector>

#include "minksurf/sphere.hpp"

namespace minksurf {

/// Triangular face of a 3-D convex hull. Vertices are indices into the input
/// point set, ordered counterclockwise seen from outside; nb[k] is the face
/// across edge (v[k], v[(k+1)%3]).
struct HullFace {
    std::array<int, 3> v;
    std::array<int, 3> nb;
    Vec3 normal;    // outward unit normal
    double offset;  // plane <normal, x> = offset
};

struct ConvexHull3 {
    std::vector<HullFace> faces;
    std::vector<char> is_vertex;  // per input point: lies on the hull
};

/// Incremental quickhull with conflict lists. Throws ErrorKind::Degenerate
/// when the points are affinely degenerate (all coplanar or fewer than 4).
ConvexHull3 convex_hull(const std::vector<Vec3>& pts);

}  // namespace minksurf
