#include "minksurf/grid.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace minksurf {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

struct IcoMesh {
    std::vector<Vec3> verts;                    // unit vectors
    std::vector<std::array<int, 3>> faces;      // CCW from outside
};

// Icosahedron in polar orientation: vertices at (0,0,+-1) and two
// pentagonal rings at latitude +-atan(1/2).
IcoMesh icosahedron() {
    IcoMesh m;
    const double lat = std::atan(0.5);
    const double cl = std::cos(lat), sl = std::sin(lat);
    m.verts.push_back(Vec3(0, 0, 1));
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 5.0;
        m.verts.push_back(Vec3(cl * std::cos(a), cl * std::sin(a), sl));
    }
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 5.0 + std::numbers::pi / 5.0;
        m.verts.push_back(Vec3(cl * std::cos(a), cl * std::sin(a), -sl));
    }
    m.verts.push_back(Vec3(0, 0, -1));
    for (int k = 0; k < 5; ++k) {
        const int k1 = (k + 1) % 5;
        m.faces.push_back({0, 1 + k, 1 + k1});
        m.faces.push_back({11, 6 + k1, 6 + k});
        m.faces.push_back({1 + k, 6 + k, 1 + k1});
        m.faces.push_back({1 + k1, 6 + k, 6 + k1});
    }
    return m;
}

IcoMesh subdivide(const IcoMesh& in) {
    IcoMesh out;
    out.verts = in.verts;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        out.verts.push_back((out.verts[a] + out.verts[b]).normalized());
        const int idx = static_cast<int>(out.verts.size()) - 1;
        midpoint.emplace(key, idx);
        return idx;
    };
    for (const auto& f : in.faces) {
        const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
        out.faces.push_back({f[0], ab, ca});
        out.faces.push_back({ab, f[1], bc});
        out.faces.push_back({ca, bc, f[2]});
        out.faces.push_back({ab, bc, ca});
    }
    return out;
}

IcoMesh icosphere(int level) {
    IcoMesh m = icosahedron();
    for (int l = 0; l < level; ++l) m = subdivide(m);
    return m;
}

// Spherical triangle area via the van Oosterom-Strackee tangent formula
// (equivalent to Girard/l'Huilier, better conditioned for small triangles).
double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(std::abs(num), den);
}

void check_invariants(const QuadratureGrid& g) {
    double wsum = 0.0;
    Vec3 vsum = Vec3::Zero();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g.weights[i] > 0.0))
            fail(ErrorKind::Input, "QuadratureGrid: weights must be strictly positive");
        wsum += g.weights[i];
        vsum += g.weights[i] * g.nodes[i].vec();
    }
    if (std::abs(wsum - kFourPi) > 1e-10)
        fail(ErrorKind::Input, "QuadratureGrid: weights do not sum to 4*pi");
    if (vsum.norm() > 1e-9)
        fail(ErrorKind::Input, "QuadratureGrid: weighted node sum is not zero");
}

}  // namespace

QuadratureGrid QuadratureGrid::from_nodes(std::vector<UnitVector> nodes,
                                          std::vector<double> weights) {
    if (nodes.size() != weights.size() || nodes.empty())
        fail(ErrorKind::Input, "QuadratureGrid: nodes/weights size mismatch");
    QuadratureGrid g{std::move(nodes), std::move(weights), -1};
    check_invariants(g);
    return g;
}

QuadratureGrid build_grid(int level) {
    if (level < 0) fail(ErrorKind::Input, "build_grid: level must be non-negative");
    if (level > 8) fail(ErrorKind::Resource, "build_grid: level exceeds the guard (8)");
    const IcoMesh m = icosphere(level);
    QuadratureGrid g;
    g.level = level;
    g.nodes.reserve(m.faces.size());
    g.weights.reserve(m.faces.size());
    for (const auto& f : m.faces) {
        const Vec3& a = m.verts[f[0]];
        const Vec3& b = m.verts[f[1]];
        const Vec3& c = m.verts[f[2]];
        g.nodes.push_back(UnitVector(a + b + c));
        g.weights.push_back(spherical_triangle_area(a, b, c));
    }
    check_invariants(g);
    return g;
}

QuadratureGrid build_vertex_grid(int level) {
    if (level < 0) fail(ErrorKind::Input, "build_vertex_grid: level must be non-negative");
    if (level > 8) fail(ErrorKind::Resource, "build_vertex_grid: level exceeds the guard (8)");
    const IcoMesh m = icosphere(level);
    std::vector<double> w(m.verts.size(), 0.0);
    for (const auto& f : m.faces) {
        const double third =
            spherical_triangle_area(m.verts[f[0]], m.verts[f[1]], m.verts[f[2]]) / 3.0;
        w[f[0]] += third;
        w[f[1]] += third;
        w[f[2]] += third;
    }
    QuadratureGrid g;
    g.level = level;
    for (std::size_t i = 0; i < m.verts.size(); ++i) {
        g.nodes.push_back(UnitVector(m.verts[i]));
        g.weights.push_back(w[i]);
    }
    check_invariants(g);
    return g;
}

Vec3 integrate_vector(const QuadratureGrid& grid,
                      const std::function<double(const UnitVector&)>& g) {
    Vec3 sum = Vec3::Zero();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = g(grid.nodes[i]);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "integrate_vector: non-finite field value at node " << i << " ("
               << grid.nodes[i].x() << ", " << grid.nodes[i].y() << ", "
               << grid.nodes[i].z() << ")";
            fail(ErrorKind::Evaluation, os.str());
        }
        sum += grid.weights[i] * v * grid.nodes[i].vec();
    }
    return sum;
}

double mean_angular_spacing(const QuadratureGrid& grid) {
    return std::sqrt(kFourPi / static_cast<double>(grid.size()));
}

const std::vector<UnitVector>& probe_directions() {
    static const std::vector<UnitVector> dirs = [] {
        const IcoMesh m = icosahedron();
        std::vector<UnitVector> d;
        for (const auto& v : m.verts) d.push_back(UnitVector(v));
        std::map<std::pair<int, int>, bool> seen;
        for (const auto& f : m.faces) {
            for (int e = 0; e < 3; ++e) {
                const auto key = std::minmax(f[e], f[(e + 1) % 3]);
                if (!seen.emplace(key, true).second) continue;
                d.push_back(UnitVector(m.verts[key.first] + m.verts[key.second]));
            }
        }
        for (const auto& f : m.faces)
            d.push_back(UnitVector(m.verts[f[0]] + m.verts[f[1]] + m.verts[f[2]]));
        return d;
    }();
    return dirs;
}

}  // namespace minksurf
