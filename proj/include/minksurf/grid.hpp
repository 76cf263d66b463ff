#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "minksurf/sphere.hpp"

namespace minksurf {

/// Quadrature nodes u_i with positive weights w_i partitioning the sphere:
/// sum w_i = 4*pi (1e-10) and sum w_i u_i = 0 (1e-9).
struct QuadratureGrid {
    std::vector<UnitVector> nodes;
    std::vector<double> weights;
    int level;  // subdivision depth; -1 for grids not built from an icosphere

    std::size_t size() const { return nodes.size(); }

    /// Validates the partition invariants on externally supplied data.
    static QuadratureGrid from_nodes(std::vector<UnitVector> nodes,
                                     std::vector<double> weights);
};

/// Geodesic icosphere grid with 20*4^level faces. Nodes are normalized face
/// centroids; weights are the exact spherical areas of the radially projected
/// faces. Deterministic: the same level yields the identical grid.
/// level must be <= 8 (resource guard).
QuadratureGrid build_grid(int level);

/// Companion grid on the icosphere vertices (12, 42, 162, ... nodes); each
/// vertex carries one third of the spherical area of its incident faces.
QuadratureGrid build_vertex_grid(int level);

/// Discrete vector-valued integral  sum_i w_i g(u_i) u_i.
/// Throws if g evaluates to a non-finite value at some node.
Vec3 integrate_vector(const QuadratureGrid& grid,
                      const std::function<double(const UnitVector&)>& g);

/// Mean angular spacing between neighbouring nodes, sqrt(4*pi / N).
double mean_angular_spacing(const QuadratureGrid& grid);

/// Fixed 62-direction probe set: icosahedron vertices, edge midpoints and
/// face centers. Used for discrete open-hemisphere positivity checks.
const std::vector<UnitVector>& probe_directions();

}  // namespace minksurf
