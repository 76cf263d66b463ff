#include "minksurf/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "minksurf/density.hpp"
#include "minksurf/hull.hpp"

namespace minksurf {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double support_scale(const SupportVector& h) {
    return std::max(1e-30, h.values.cwiseAbs().maxCoeff());
}

double min_margin(const SupportVector& h, const Vec3& c) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < h.grid->size(); ++i)
        m = std::min(m, h.values[i] - c.dot(h.grid->nodes[i].vec()));
    return m;
}

}  // namespace

Vec3 interior_point(const SupportVector& h) {
    const QuadratureGrid& g = *h.grid;
    // Weighted heuristic: exact for sphere-plus-linear support data.
    Vec3 c = Vec3::Zero();
    for (std::size_t i = 0; i < g.size(); ++i)
        c += g.weights[i] * h.values[i] * g.nodes[i].vec();
    c *= 3.0 / kFourPi;

    const double scale = support_scale(h);
    double m = min_margin(h, c);
    if (m > 1e-9 * scale) return c;

    // Subgradient ascent on the minimum margin (deterministic).
    double step = 0.25 * scale;
    for (int it = 0; it < 400 && m <= 1e-9 * scale; ++it) {
        std::size_t worst = 0;
        double mw = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double mi = h.values[i] - c.dot(g.nodes[i].vec());
            if (mi < mw) {
                mw = mi;
                worst = i;
            }
        }
        const Vec3 trial = c - step * g.nodes[worst].vec();
        if (min_margin(h, trial) > mw) {
            c = trial;
        } else {
            step *= 0.7;
        }
        m = min_margin(h, c);
    }
    if (m <= 1e-12 * scale) {
        if (separating_direction(g.nodes))
            fail(ErrorKind::Degenerate, "realize: normals do not positively span");
        fail(ErrorKind::Degenerate, "realize: body is empty (no strict interior point)");
    }
    return c;
}

ConvexPolytope realize(const SupportVector& h) {
    const QuadratureGrid& g = *h.grid;
    const std::size_t N = g.size();
    const Vec3 shift = interior_point(h);

    std::vector<Vec3> duals(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double hi = h.values[i] - shift.dot(g.nodes[i].vec());
        duals[i] = g.nodes[i].vec() / hi;
    }

    const ConvexHull3 hull = convex_hull(duals);

    // Hull face -> primal vertex: the plane <m, x> = 1 through the three dual
    // points has m = n / d; near-identical planes collapse to one vertex.
    const std::size_t F = hull.faces.size();
    std::vector<Vec3> raw(F);
    double vscale = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
        const double d = hull.faces[f].offset;
        if (!(d > 1e-14))
            fail(ErrorKind::Degenerate, "realize: normals do not positively span");
        raw[f] = hull.faces[f].normal / d;
        vscale = std::max(vscale, raw[f].norm());
    }

    ConvexPolytope P;
    const double merge_tol = 1e-9 * vscale;
    std::vector<int> cluster(F, -1);
    {
        // Greedy clustering on a quantized spatial hash.
        std::map<std::array<long long, 3>, std::vector<int>> buckets;
        const double q = std::max(merge_tol, 1e-300);
        auto key_of = [&](const Vec3& v, int dx, int dy, int dz) {
            return std::array<long long, 3>{
                static_cast<long long>(std::floor(v.x() / q)) + dx,
                static_cast<long long>(std::floor(v.y() / q)) + dy,
                static_cast<long long>(std::floor(v.z() / q)) + dz};
        };
        for (std::size_t f = 0; f < F; ++f) {
            int found = -1;
            for (int dx = -1; dx <= 1 && found < 0; ++dx)
                for (int dy = -1; dy <= 1 && found < 0; ++dy)
                    for (int dz = -1; dz <= 1 && found < 0; ++dz) {
                        auto it = buckets.find(key_of(raw[f], dx, dy, dz));
                        if (it == buckets.end()) continue;
                        for (int v : it->second)
                            if ((P.vertices[v] - raw[f]).norm() <= merge_tol) {
                                found = v;
                                break;
                            }
                    }
            if (found < 0) {
                found = static_cast<int>(P.vertices.size());
                P.vertices.push_back(raw[f]);
                buckets[key_of(raw[f], 0, 0, 0)].push_back(found);
            }
            cluster[f] = found;
        }
    }

    // Facets: one per grid normal; incident hull faces of the dual vertex
    // give the primal vertex set.
    std::vector<std::vector<int>> incident(N);
    for (std::size_t f = 0; f < F; ++f)
        for (int k = 0; k < 3; ++k) incident[hull.faces[f].v[k]].push_back(cluster[f]);

    P.facets.resize(N);
    P.facet_normals.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        Facet& fc = P.facets[i];
        fc.normal_index = static_cast<int>(i);
        fc.plane_offset = h.values[i];
        P.facet_normals[i] = g.nodes[i].vec();
        if (!hull.is_vertex[i]) continue;

        auto& ids = incident[i];
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (ids.size() < 3) continue;

        Vec3 centroid = Vec3::Zero();
        for (int v : ids) centroid += P.vertices[v];
        centroid /= static_cast<double>(ids.size());
        Vec3 t1, t2;
        tangent_frame(g.nodes[i], t1, t2);
        std::vector<std::pair<double, int>> order;
        order.reserve(ids.size());
        for (int v : ids) {
            const Vec3 d = P.vertices[v] - centroid;
            order.emplace_back(std::atan2(d.dot(t2), d.dot(t1)), v);
        }
        std::sort(order.begin(), order.end());
        fc.vertex_loop.reserve(order.size());
        for (auto& [ang, v] : order) fc.vertex_loop.push_back(v);

        double twice_area = 0.0;
        const std::size_t L = fc.vertex_loop.size();
        for (std::size_t k = 0; k < L; ++k) {
            const Vec3 a = P.vertices[fc.vertex_loop[k]] - centroid;
            const Vec3 b = P.vertices[fc.vertex_loop[(k + 1) % L]] - centroid;
            twice_area += a.cross(b).dot(g.nodes[i].vec());
        }
        fc.area = 0.5 * std::abs(twice_area);
    }

    // Primal edges from dual hull adjacency (one per dual edge).
    std::map<std::pair<int, int>, std::pair<int, int>> edge_faces;  // dual edge -> two hull faces
    for (std::size_t f = 0; f < F; ++f) {
        for (int k = 0; k < 3; ++k) {
            const auto key = std::minmax(hull.faces[f].v[k], hull.faces[f].v[(k + 1) % 3]);
            auto it = edge_faces.find(key);
            if (it == edge_faces.end())
                edge_faces.emplace(key, std::make_pair(static_cast<int>(f), -1));
            else
                it->second.second = static_cast<int>(f);
        }
    }
    for (const auto& [key, fs] : edge_faces) {
        if (fs.second < 0) continue;
        const int ca = cluster[fs.first], cb = cluster[fs.second];
        if (ca == cb) continue;
        P.edges.push_back({key.first, key.second, (P.vertices[ca] - P.vertices[cb]).norm()});
    }

    // Back to the original frame.
    for (auto& v : P.vertices) v += shift;
    return P;
}

std::vector<double> facet_areas(const ConvexPolytope& P) {
    std::vector<double> a(P.facets.size());
    for (std::size_t i = 0; i < P.facets.size(); ++i) a[i] = P.facets[i].area;
    return a;
}

namespace {

// Signed volume from the oriented facet loops, independent of areas/offsets.
double volume_from_loops(const ConvexPolytope& P) {
    double six_v = 0.0;
    for (const auto& f : P.facets) {
        const std::size_t L = f.vertex_loop.size();
        if (L < 3) continue;
        const Vec3& v0 = P.vertices[f.vertex_loop[0]];
        for (std::size_t k = 1; k + 1 < L; ++k) {
            const Vec3& a = P.vertices[f.vertex_loop[k]];
            const Vec3& b = P.vertices[f.vertex_loop[k + 1]];
            six_v += v0.dot(a.cross(b));
        }
    }
    return six_v / 6.0;
}

}  // namespace

double volume(const ConvexPolytope& P) {
    if (P.vertices.empty()) return 0.0;
    Vec3 c = Vec3::Zero();
    for (const auto& v : P.vertices) c += v;
    c /= static_cast<double>(P.vertices.size());
    double v3 = 0.0;
    for (std::size_t i = 0; i < P.facets.size(); ++i) {
        if (P.facets[i].vertex_loop.size() < 3) continue;
        v3 += (P.facets[i].plane_offset - c.dot(P.facet_normals[i])) * P.facets[i].area;
    }
    const double v_support = v3 / 3.0;
    const double v_tetra = volume_from_loops(P);
    if (std::abs(v_support - v_tetra) > 1e-10 * std::max(std::abs(v_tetra), 1e-30) + 1e-14)
        fail(ErrorKind::Degenerate, "volume: support-form and tetrahedra volumes disagree");
    return v_tetra;
}

double support_eval(const ConvexPolytope& P, const UnitVector& u) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : P.vertices) best = std::max(best, u.vec().dot(v));
    return best;
}

double hausdorff_distance(const ConvexPolytope& P, const ConvexPolytope& Q,
                          const QuadratureGrid& sample) {
    double d = 0.0;
    for (const auto& u : sample.nodes)
        d = std::max(d, std::abs(support_eval(P, u) - support_eval(Q, u)));
    return d;
}

SupportVector parallel_support(const SupportVector& h, double t) {
    SupportVector out = h;
    out.values.array() += t;
    return out;
}

Vec3 volume_centroid(const ConvexPolytope& P) {
    double six_v = 0.0;
    Vec3 moment = Vec3::Zero();  // 24 * integral of x dV, accumulated per tet
    for (const auto& f : P.facets) {
        const std::size_t L = f.vertex_loop.size();
        if (L < 3) continue;
        const Vec3& v0 = P.vertices[f.vertex_loop[0]];
        for (std::size_t k = 1; k + 1 < L; ++k) {
            const Vec3& a = P.vertices[f.vertex_loop[k]];
            const Vec3& b = P.vertices[f.vertex_loop[k + 1]];
            const double sv = v0.dot(a.cross(b));
            six_v += sv;
            moment += sv * (v0 + a + b);  // + origin
        }
    }
    if (std::abs(six_v) < 1e-300)
        fail(ErrorKind::Degenerate, "volume_centroid: zero-volume body");
    return moment / (4.0 * six_v);
}

std::pair<ConvexPolytope, Vec3> recenter(const ConvexPolytope& P) {
    const Vec3 c = volume_centroid(P);
    ConvexPolytope Q = P;
    for (auto& v : Q.vertices) v -= c;
    for (auto& f : Q.facets)
        f.plane_offset -= c.dot(Q.facet_normals[f.normal_index]);
    return {std::move(Q), -c};
}

double diameter(const ConvexPolytope& P) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < P.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < P.vertices.size(); ++j)
            d2 = std::max(d2, (P.vertices[i] - P.vertices[j]).squaredNorm());
    return std::sqrt(d2);
}

double centered_inball_radius(const ConvexPolytope& P) {
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < P.facets.size(); ++i) {
        if (P.facets[i].vertex_loop.size() >= 3)
            r = std::min(r, P.facets[i].plane_offset);
        else
            r = std::min(r, support_eval(P, UnitVector(P.facet_normals[i])));
    }
    return r;
}

}  // namespace minksurf
