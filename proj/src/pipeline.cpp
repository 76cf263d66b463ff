#include "minksurf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace minksurf {

namespace {

constexpr double kPi = std::numbers::pi;

double homogeneous_support(const ConvexPolytope& P, const Vec3& x) {
    const double nrm = x.norm();
    return nrm * support_eval(P, UnitVector(x));
}

/// Tangential Hessian of the 1-homogeneous support extension, which equals
/// Hess h + h I on the sphere. A plain 8-point second-difference stencil is
/// biased by the faceting of the sampled body (the center sample sits at a
/// bulge minimum whenever `at` is a facet normal), so instead a quadric is
/// least-squares fitted through samples on three rings of radius s/2, 3s/4
/// and s in the tangent plane; the ring average cancels the facet-scale
/// oscillation to first order.
Eigen::Matrix2d probe_matrix(const ConvexPolytope& P, const UnitVector& at, double s) {
    Vec3 t1, t2;
    tangent_frame(at, t1, t2);
    const Vec3 p = at.vec();
    constexpr int kAngles = 12;
    constexpr double kRadii[] = {0.5, 0.75, 1.0};
    constexpr int kSamples = 1 + 3 * kAngles;
    Eigen::Matrix<double, kSamples, 6> A;
    Eigen::Matrix<double, kSamples, 1> b;
    int row = 0;
    auto add = [&](double x, double y) {
        A.row(row) << 1.0, x, y, 0.5 * x * x, x * y, 0.5 * y * y;
        b[row] = homogeneous_support(P, p + x * t1 + y * t2);
        ++row;
    };
    add(0.0, 0.0);
    for (int ri = 0; ri < 3; ++ri)
        for (int k = 0; k < kAngles; ++k) {
            // Stagger the middle ring so samples interleave.
            const double a = 2.0 * kPi * (k + 0.5 * (ri == 1)) / kAngles;
            add(s * kRadii[ri] * std::cos(a), s * kRadii[ri] * std::sin(a));
        }
    const Eigen::Matrix<double, 6, 1> c = A.colPivHouseholderQr().solve(b);
    Eigen::Matrix2d M;
    M << c[3], c[4], c[4], c[5];
    return M;
}

void fit_disc_plane(const SurfaceDecomposition& d, int j, DiscPlane& out,
                    std::vector<Vec3>* boundary_out) {
    std::vector<int> verts;
    std::vector<char> in_disc(d.body.facets.size(), 0);
    for (std::size_t i = 0; i < d.body.facets.size(); ++i)
        if (d.region_of_facet[i].kind == RegionLabel::Disc && d.region_of_facet[i].j == j) {
            in_disc[i] = 1;
            for (int v : d.body.facets[i].vertex_loop) verts.push_back(v);
        }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    if (verts.size() < 3)
        fail(ErrorKind::Resolution,
             "disc region " + std::to_string(j) + " is unresolved (fewer than 3 vertices)");

    Vec3 c = Vec3::Zero();
    for (int v : verts) c += d.body.vertices[v];
    c /= static_cast<double>(verts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int v : verts) {
        const Vec3 r = d.body.vertices[v] - c;
        cov += r * r.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Vec3 nrm = eig.eigenvectors().col(0);
    if (nrm.dot(d.punctures->points[j].vec()) < 0) nrm = -nrm;
    out.normal = nrm;
    out.offset = nrm.dot(c);
    double ss = 0;
    for (int v : verts) {
        const double dist = nrm.dot(d.body.vertices[v]) - out.offset;
        ss += dist * dist;
    }
    out.rms = std::sqrt(ss / static_cast<double>(verts.size()));

    if (boundary_out) {
        // A boundary vertex touches both a disc(j) facet and an outside facet.
        std::vector<char> in(d.body.vertices.size(), 0), outb(d.body.vertices.size(), 0);
        for (std::size_t i = 0; i < d.body.facets.size(); ++i)
            for (int v : d.body.facets[i].vertex_loop) (in_disc[i] ? in : outb)[v] = 1;
        for (std::size_t v = 0; v < d.body.vertices.size(); ++v)
            if (in[v] && outb[v]) boundary_out->push_back(d.body.vertices[v]);
    }
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// 2-D convex hull (monotone chain), returns CCW polygon.
std::vector<Eigen::Vector2d> hull2d(std::vector<Eigen::Vector2d> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                    const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Eigen::Vector2d> h;
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t base = h.size();
        for (const auto& p : pts) {
            while (h.size() >= base + 2 && cross(h[h.size() - 2], h.back(), p) <= 0)
                h.pop_back();
            h.push_back(p);
        }
        h.pop_back();
        std::reverse(pts.begin(), pts.end());
    }
    return h;
}

double dist_to_polygon_boundary(const std::vector<Eigen::Vector2d>& poly,
                                const Eigen::Vector2d& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Eigen::Vector2d a = poly[i], b = poly[(i + 1) % poly.size()];
        const Eigen::Vector2d ab = b - a;
        const double t = std::clamp(ab.dot(p - a) / std::max(1e-300, ab.squaredNorm()), 0.0, 1.0);
        best = std::min(best, (a + t * ab - p).norm());
    }
    return best;
}

}  // namespace

double SurfaceDecomposition::disc_area(int j) const {
    double a = 0;
    for (std::size_t i = 0; i < body.facets.size(); ++i)
        if (region_of_facet[i].kind == RegionLabel::Disc && region_of_facet[i].j == j)
            a += body.facets[i].area;
    return a;
}

double SurfaceDecomposition::annulus_area(int j) const {
    double a = 0;
    for (std::size_t i = 0; i < body.facets.size(); ++i)
        if (region_of_facet[i].kind == RegionLabel::Annulus && region_of_facet[i].j == j)
            a += body.facets[i].area;
    return a;
}

std::pair<SupportVector, SurfaceDecomposition> construct(
    std::shared_ptr<const QuadratureGrid> grid,
    std::shared_ptr<const PunctureSet> punctures, int n,
    const SolveOptions& solver_opts, SolveReport* report_out) {
    DensityField f = build_density(grid, punctures, n);
    Eigen::VectorXd F(static_cast<Eigen::Index>(grid->size()));
    for (std::size_t i = 0; i < grid->size(); ++i) F[i] = f.values[i] * grid->weights[i];

    MinkowskiProblem problem(grid, F);
    auto [h, report] = solve(problem, solver_opts);
    if (report_out) *report_out = report;

    SurfaceDecomposition d;
    d.body = realize(h);
    d.n = n;
    d.grid = grid;
    d.punctures = punctures;
    d.region_of_facet.assign(grid->size(), RegionLabel{});
    if (punctures) {
        const double r = 1.0 / n;
        for (std::size_t i = 0; i < grid->size(); ++i)
            for (std::size_t j = 0; j < punctures->size(); ++j) {
                if (SphericalCap(punctures->points[j], r).contains(grid->nodes[i]))
                    d.region_of_facet[i] = {RegionLabel::Disc, static_cast<int>(j)};
                else if (SphericalAnnulus(punctures->points[j], r).contains(grid->nodes[i]))
                    d.region_of_facet[i] = {RegionLabel::Annulus, static_cast<int>(j)};
            }
        d.disc_planes.resize(punctures->size());
        for (std::size_t j = 0; j < punctures->size(); ++j)
            fit_disc_plane(d, static_cast<int>(j), d.disc_planes[j], nullptr);
    }
    return {std::move(h), std::move(d)};
}

DiscMetrics disc_metrics(const SurfaceDecomposition& d, int j) {
    if (!d.punctures || j < 0 || j >= static_cast<int>(d.punctures->size()))
        fail(ErrorKind::Input, "disc_metrics: puncture index out of range");
    DiscMetrics m;
    m.area = d.disc_area(j);
    DiscPlane plane;
    std::vector<Vec3> boundary;
    fit_disc_plane(d, j, plane, &boundary);
    m.plane_rms = plane.rms;
    m.normal_angle = spherical_angle(UnitVector(plane.normal), d.punctures->points[j]);

    if (boundary.size() >= 3) {
        Vec3 t1, t2;
        tangent_frame(UnitVector(plane.normal), t1, t2);
        Vec3 c = Vec3::Zero();
        for (const auto& p : boundary) c += p;
        c /= static_cast<double>(boundary.size());
        std::vector<Eigen::Vector2d> flat;
        double diam = 0;
        for (const auto& p : boundary) flat.emplace_back(t1.dot(p - c), t2.dot(p - c));
        for (std::size_t a = 0; a < flat.size(); ++a)
            for (std::size_t b = a + 1; b < flat.size(); ++b)
                diam = std::max(diam, (flat[a] - flat[b]).norm());
        const auto hull = hull2d(flat);
        if (hull.size() >= 3 && diam > 0) {
            double worst = 0;
            for (const auto& p : flat)
                worst = std::max(worst, dist_to_polygon_boundary(hull, p));
            m.boundary_convexity_defect = worst / diam;
        }
    }
    return m;
}

Vec3 equilibrium_check(const SurfaceDecomposition& d) {
    Vec3 s = Vec3::Zero();
    if (!d.punctures) return s;
    for (std::size_t j = 0; j < d.punctures->size(); ++j)
        s += d.disc_area(static_cast<int>(j)) * d.punctures->points[j].vec();
    return s;
}

HessianProbe hessian_probe(const SupportVector& h, const ConvexPolytope& P,
                           const UnitVector& at, double step) {
    const double spacing = mean_angular_spacing(*h.grid);
    if (!(step >= spacing && step <= 5.0 * spacing))
        fail(ErrorKind::Input, "hessian_probe: step outside [1, 5] grid spacings");
    const Eigen::Matrix2d M = probe_matrix(P, at, step);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(M);
    HessianProbe out;
    out.det_residual = M.determinant() - 1.0;
    out.rho1 = eig.eigenvalues()[0];
    out.rho2 = eig.eigenvalues()[1];
    out.step_ratio = step / spacing;
    return out;
}

double hessian_residual(const SupportVector& h, const ConvexPolytope& P,
                        const UnitVector& at, double step) {
    return hessian_probe(h, P, at, step).det_residual;
}

std::optional<double> parallel_H_check(const SupportVector& h, const ConvexPolytope& P,
                                       const UnitVector& at, double step) {
    const HessianProbe pr = hessian_probe(h, P, at, step);
    if (pr.rho1 <= 0.0 || pr.rho2 <= 0.0) return std::nullopt;
    return 0.5 * (1.0 / (1.0 + pr.rho1) + 1.0 / (1.0 + pr.rho2)) - 0.5;
}

double gauss_coverage(const SurfaceDecomposition& d) {
    std::size_t total = 0, covered = 0;
    for (std::size_t i = 0; i < d.body.facets.size(); ++i) {
        if (d.region_of_facet[i].kind != RegionLabel::KRegion) continue;
        ++total;
        covered += d.body.facets[i].vertex_loop.size() >= 3;
    }
    return total ? static_cast<double>(covered) / static_cast<double>(total) : 1.0;
}

std::optional<Vec3> recover_point(const SupportVector& h, const ConvexPolytope& P,
                                  const UnitVector& at, double step) {
    Vec3 t1, t2;
    tangent_frame(at, t1, t2);
    auto estimate = [&](double s) {
        const Vec3 p = at.vec();
        Vec3 x = support_eval(P, at) * p;
        for (const Vec3& t : {t1, t2}) {
            const double plus = support_eval(P, UnitVector(std::cos(s) * p + std::sin(s) * t));
            const double minus = support_eval(P, UnitVector(std::cos(s) * p - std::sin(s) * t));
            x += ((plus - minus) / (2.0 * std::sin(s))) * t;
        }
        return x;
    };
    const Vec3 full = estimate(step), half = estimate(0.5 * step);
    const double scale = std::max(1e-30, support_eval(P, at));
    if ((full - half).norm() > 0.05 * scale) return std::nullopt;  // kink at this scale
    return half;
}

ConvergenceReport run_sweep(const ConstructionConfig& config) {
    for (std::size_t k = 1; k < config.n_values.size(); ++k)
        if (config.n_values[k] <= config.n_values[k - 1])
            fail(ErrorKind::Input, "run_sweep: n_values must be strictly ascending");
    auto grid = std::make_shared<QuadratureGrid>(build_grid(config.grid_level));
    if (config.punctures) {
        const int n0 = minimum_n(*config.punctures);
        for (int n : config.n_values)
            if (n < n0)
                fail(ErrorKind::Input, "run_sweep: n = " + std::to_string(n) +
                                           " below minimum " + std::to_string(n0));
    }

    const double spacing = mean_angular_spacing(*grid);
    double step_ratio = 5.0;
    if (auto it = config.tolerances.find("hessian_step_ratio"); it != config.tolerances.end())
        step_ratio = it->second;
    const double step = step_ratio * spacing;

    ConvergenceReport report;
    std::vector<ConvexPolytope> solved_bodies;
    double first_inradius = -1.0, first_diameter = -1.0;

    for (int n : config.n_values) {
        SweepRecord rec;
        rec.n = n;
        try {
            SolveReport sr;
            auto [h, d] = construct(grid, config.punctures, n, config.solver, &sr);
            rec.solved = true;
            rec.iterations = sr.iterations;

            const std::size_t m = config.punctures ? config.punctures->size() : 0;
            double disc_total = 0;
            for (std::size_t j = 0; j < m; ++j) {
                rec.disc_areas.push_back(d.disc_area(static_cast<int>(j)));
                rec.annulus_areas.push_back(d.annulus_area(static_cast<int>(j)));
                disc_total += rec.disc_areas.back();
            }
            for (const auto& f : d.body.facets) rec.total_area += f.area;
            rec.volume = volume(d.body);
            rec.diameter = diameter(d.body);
            rec.inradius = centered_inball_radius(d.body);
            rec.equilibrium_defect = equilibrium_check(d);
            rec.equilibrium_rel =
                disc_total > 0 ? rec.equilibrium_defect.norm() / disc_total : 0.0;

            // K-region probes well clear of every annulus.
            std::vector<std::size_t> candidates;
            for (std::size_t i = 0; i < grid->size(); ++i) {
                if (d.region_of_facet[i].kind != RegionLabel::KRegion) continue;
                bool clear = true;
                for (std::size_t j = 0; j < m; ++j) {
                    const double outer =
                        std::asin(std::min(1.0, 2.0 / n));
                    if (spherical_angle(grid->nodes[i], config.punctures->points[j]) <
                        outer + 3.0 * step)
                        clear = false;
                }
                if (clear) candidates.push_back(i);
            }
            const std::size_t want = 50;
            const std::size_t stride = std::max<std::size_t>(1, candidates.size() / want);
            SupportVector hs = h;
            std::vector<double> dets, hdefs;
            for (std::size_t k = 0; k < candidates.size() && dets.size() < want;
                 k += stride) {
                const UnitVector& at = grid->nodes[candidates[k]];
                dets.push_back(std::abs(hessian_residual(hs, d.body, at, step)));
                if (auto hd = parallel_H_check(hs, d.body, at, step))
                    hdefs.push_back(std::abs(*hd));
                else
                    ++rec.parallel_H_excluded;
            }
            rec.hessian_probes = static_cast<int>(dets.size());
            rec.hessian_median = median_of(dets);
            rec.parallel_H_median = median_of(hdefs);

            // Per-n bounds from the paper's area and width estimates.
            double rhs = 4.0 * kPi;
            for (std::size_t j = 0; j < m; ++j)
                rhs += 8.0 * kPi / (static_cast<double>(n) * n) + config.punctures->weights[j];
            rec.area_bound_ok = rec.total_area < 1.02 * rhs;
            if (first_inradius < 0) {
                first_inradius = rec.inradius;
                first_diameter = rec.diameter;
            }
            rec.inradius_ok = rec.inradius >= 0.5 * first_inradius;
            rec.diameter_ok = rec.diameter <= 2.0 * first_diameter;

            solved_bodies.push_back(d.body);
        } catch (const Error& e) {
            rec.failure = e.what();
        }
        report.records.push_back(std::move(rec));
    }

    for (std::size_t k = 1; k < solved_bodies.size(); ++k)
        report.hausdorff.push_back(
            hausdorff_distance(solved_bodies[k - 1], solved_bodies[k], *grid));
    return report;
}

}  // namespace minksurf
