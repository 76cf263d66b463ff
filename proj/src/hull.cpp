#include "minksurf/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace minksurf {

namespace {

// Working face record. Conflict points are input points strictly outside the
// face plane; furthest drives the insertion order.
struct Face {
    std::array<int, 3> v{};
    std::array<int, 3> nb{};
    Vec3 normal = Vec3::Zero();
    double offset = 0.0;
    std::vector<int> conflict;
    int furthest = -1;
    double furthest_dist = 0.0;
    bool alive = true;
};

struct Builder {
    const std::vector<Vec3>& pts;
    std::vector<Face> faces;
    double eps;

    explicit Builder(const std::vector<Vec3>& p) : pts(p) {
        double scale = 0.0;
        for (const auto& q : p) scale = std::max(scale, q.cwiseAbs().maxCoeff());
        eps = std::max(scale, 1.0) * 1e-10;
    }

    void set_plane(Face& f) {
        const Vec3& a = pts[f.v[0]];
        const Vec3 n = (pts[f.v[1]] - a).cross(pts[f.v[2]] - a);
        const double len = n.norm();
        f.normal = len > 0 ? Vec3(n / len) : Vec3::Zero();
        f.offset = f.normal.dot(a);
    }

    // Signed distance of point p above face f; recomputed in extended
    // precision when the double result is within the tolerance band.
    double dist(const Face& f, int p) const {
        const double d = f.normal.dot(pts[p]) - f.offset;
        if (std::abs(d) > 8.0 * eps) return d;
        const Vec3& a = pts[f.v[0]];
        const Vec3& b = pts[f.v[1]];
        const Vec3& c = pts[f.v[2]];
        const Vec3& q = pts[p];
        long double det = 0.0L;
        const long double ax = b.x() - a.x(), ay = b.y() - a.y(), az = b.z() - a.z();
        const long double bx = c.x() - a.x(), by = c.y() - a.y(), bz = c.z() - a.z();
        const long double cx = q.x() - a.x(), cy = q.y() - a.y(), cz = q.z() - a.z();
        det = ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) + az * (bx * cy - by * cx);
        const long double area2 = std::sqrt((ay * bz - az * by) * (ay * bz - az * by) +
                                            (az * bx - ax * bz) * (az * bx - ax * bz) +
                                            (ax * by - ay * bx) * (ax * by - ay * bx));
        if (area2 <= 0.0L) return 0.0;
        return static_cast<double>(det / area2);
    }

    void add_conflict(Face& f, int p) {
        const double d = dist(f, p);
        if (d <= eps) return;
        f.conflict.push_back(p);
        if (d > f.furthest_dist) {
            f.furthest_dist = d;
            f.furthest = p;
        }
    }

    int make_face(int a, int b, int c) {
        Face f;
        f.v = {a, b, c};
        set_plane(f);
        faces.push_back(std::move(f));
        return static_cast<int>(faces.size()) - 1;
    }

    // Initial simplex from extreme points; throws on affine degeneracy.
    void init_simplex(std::vector<int>& remaining) {
        const int n = static_cast<int>(pts.size());
        if (n < 4) fail(ErrorKind::Degenerate, "convex_hull: fewer than four points");

        int lo = 0, hi = 0;
        for (int axis = 0; axis < 3; ++axis) {
            int a = 0, b = 0;
            for (int i = 1; i < n; ++i) {
                if (pts[i][axis] < pts[a][axis]) a = i;
                if (pts[i][axis] > pts[b][axis]) b = i;
            }
            if ((pts[b] - pts[a]).norm() > (pts[hi] - pts[lo]).norm()) {
                lo = a;
                hi = b;
            }
        }
        if ((pts[hi] - pts[lo]).norm() <= eps)
            fail(ErrorKind::Degenerate, "convex_hull: all points coincide");

        const Vec3 dir = (pts[hi] - pts[lo]).normalized();
        int far_line = -1;
        double best = eps;
        for (int i = 0; i < n; ++i) {
            const Vec3 d = pts[i] - pts[lo];
            const double dist_line = (d - d.dot(dir) * dir).norm();
            if (dist_line > best) {
                best = dist_line;
                far_line = i;
            }
        }
        if (far_line < 0) fail(ErrorKind::Degenerate, "convex_hull: points are collinear");

        const Vec3 pn = (pts[hi] - pts[lo]).cross(pts[far_line] - pts[lo]).normalized();
        const double poff = pn.dot(pts[lo]);
        int far_plane = -1;
        best = eps;
        for (int i = 0; i < n; ++i) {
            const double d = std::abs(pn.dot(pts[i]) - poff);
            if (d > best) {
                best = d;
                far_plane = i;
            }
        }
        if (far_plane < 0) fail(ErrorKind::Degenerate, "convex_hull: points are coplanar");

        int a = lo, b = hi, c = far_line, d = far_plane;
        // Orient so d is below face (a, b, c).
        {
            Face probe;
            probe.v = {a, b, c};
            set_plane(probe);
            if (probe.normal.dot(pts[d]) - probe.offset > 0) std::swap(b, c);
        }
        const int f0 = make_face(a, b, c);
        const int f1 = make_face(a, c, d);
        const int f2 = make_face(c, b, d);
        const int f3 = make_face(b, a, d);
        faces[f0].nb = {f3, f2, f1};
        faces[f1].nb = {f0, f2, f3};
        faces[f2].nb = {f0, f3, f1};
        faces[f3].nb = {f0, f1, f2};

        std::vector<char> used(n, 0);
        used[a] = used[b] = used[c] = used[d] = 1;
        for (int i = 0; i < n; ++i)
            if (!used[i]) remaining.push_back(i);
    }

    void run() {
        std::vector<int> remaining;
        init_simplex(remaining);
        for (int p : remaining) {
            double bestd = eps;
            int bestf = -1;
            for (int fi = 0; fi < 4; ++fi) {
                const double d = dist(faces[fi], p);
                if (d > bestd) {
                    bestd = d;
                    bestf = fi;
                }
            }
            if (bestf >= 0) add_conflict(faces[bestf], p);
        }

        std::vector<int> stack;
        for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi)
            if (!faces[fi].conflict.empty()) stack.push_back(fi);

        std::vector<int> visible, horizon_face, horizon_edge;
        while (!stack.empty()) {
            const int fi = stack.back();
            stack.pop_back();
            if (!faces[fi].alive || faces[fi].conflict.empty()) continue;
            const int apex = faces[fi].furthest;

            // Grow the visible region by BFS.
            visible.clear();
            horizon_face.clear();
            horizon_edge.clear();
            std::vector<int> queue{fi};
            faces[fi].alive = false;
            visible.push_back(fi);
            while (!queue.empty()) {
                const int cf = queue.back();
                queue.pop_back();
                for (int e = 0; e < 3; ++e) {
                    const int nf = faces[cf].nb[e];
                    if (!faces[nf].alive) continue;
                    if (dist(faces[nf], apex) > eps) {
                        faces[nf].alive = false;
                        visible.push_back(nf);
                        queue.push_back(nf);
                    } else {
                        horizon_face.push_back(cf);
                        horizon_edge.push_back(e);
                    }
                }
            }

            // New cone of faces from the horizon to the apex.
            std::map<std::pair<int, int>, std::pair<int, int>> open_edge;  // edge -> (face, slot)
            std::vector<int> created;
            for (std::size_t k = 0; k < horizon_face.size(); ++k) {
                const int cf = horizon_face[k];
                const int e = horizon_edge[k];
                const int va = faces[cf].v[e];
                const int vb = faces[cf].v[(e + 1) % 3];
                const int outside = faces[cf].nb[e];
                const int nf = make_face(va, vb, apex);
                created.push_back(nf);
                faces[nf].nb[0] = outside;
                // Relink the surviving neighbour across the horizon edge.
                for (int s = 0; s < 3; ++s)
                    if (faces[outside].nb[s] == cf) faces[outside].nb[s] = nf;
                // Side edges (vb, apex) and (apex, va) pair up with siblings.
                auto link = [&](int x, int y, int slot) {
                    const auto key = std::minmax(x, y);
                    auto it = open_edge.find(key);
                    if (it == open_edge.end()) {
                        open_edge.emplace(key, std::make_pair(nf, slot));
                    } else {
                        faces[nf].nb[slot] = it->second.first;
                        faces[it->second.first].nb[it->second.second] = nf;
                        open_edge.erase(it);
                    }
                };
                link(vb, apex, 1);
                link(apex, va, 2);
            }
            if (!open_edge.empty())
                fail(ErrorKind::Degenerate, "convex_hull: horizon failed to close");

            // Redistribute the orphaned conflict points.
            for (int vf : visible) {
                for (int p : faces[vf].conflict) {
                    if (p == apex) continue;
                    double bestd = eps;
                    int bestf = -1;
                    for (int nf : created) {
                        const double d = dist(faces[nf], p);
                        if (d > bestd) {
                            bestd = d;
                            bestf = nf;
                        }
                    }
                    if (bestf >= 0) {
                        Face& g = faces[bestf];
                        g.conflict.push_back(p);
                        if (bestd > g.furthest_dist) {
                            g.furthest_dist = bestd;
                            g.furthest = p;
                        }
                    }
                }
                faces[vf].conflict.clear();
            }
            for (int nf : created)
                if (!faces[nf].conflict.empty()) stack.push_back(nf);
        }
    }
};

}  // namespace

ConvexHull3 convex_hull(const std::vector<Vec3>& pts) {
    Builder builder(pts);
    builder.run();

    // Compact alive faces and remap neighbour indices.
    std::vector<int> remap(builder.faces.size(), -1);
    ConvexHull3 hull;
    hull.is_vertex.assign(pts.size(), 0);
    for (std::size_t i = 0; i < builder.faces.size(); ++i) {
        if (!builder.faces[i].alive) continue;
        remap[i] = static_cast<int>(hull.faces.size());
        HullFace hf;
        hf.v = builder.faces[i].v;
        hf.nb = builder.faces[i].nb;
        hf.normal = builder.faces[i].normal;
        hf.offset = builder.faces[i].offset;
        hull.faces.push_back(hf);
    }
    for (auto& f : hull.faces) {
        for (int e = 0; e < 3; ++e) {
            f.nb[e] = remap[f.nb[e]];
            if (f.nb[e] < 0)
                fail(ErrorKind::Degenerate, "convex_hull: dangling face adjacency");
        }
        for (int k = 0; k < 3; ++k) hull.is_vertex[f.v[k]] = 1;
    }
    if (hull.faces.size() < 4)
        fail(ErrorKind::Degenerate, "convex_hull: degenerate output");
    return hull;
}

}  // namespace minksurf
