// Acceptance suite: end-to-end checks of the construction against the
// quantitative statements it implements. One line per criterion; exit code
// is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "minksurf/density.hpp"
#include "minksurf/grid.hpp"
#include "minksurf/pipeline.hpp"
#include "minksurf/polytope.hpp"
#include "minksurf/solver.hpp"

using namespace minksurf;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %02d %s: %s\n", pass ? "pass" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt3(const char* f, double a, double b, double c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double median_abs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    if (v.empty()) return 0.0;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Uniform direction from raw mt19937 words: reproducible across standard
// library implementations (std::normal_distribution is not).
UnitVector random_direction(std::mt19937& rng) {
    const double u1 = (rng() + 0.5) * (1.0 / 4294967296.0);
    const double u2 = (rng() + 0.5) * (1.0 / 4294967296.0);
    const double z = 2.0 * u1 - 1.0;
    const double r = std::sqrt(1.0 - z * z);
    const double phi = 2.0 * kPi * u2;
    return UnitVector(r * std::cos(phi), r * std::sin(phi), z);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Deterministic K-region probe set: grid nodes clear of every annulus, same
// selection rule run_sweep uses.
std::vector<UnitVector> probe_nodes(const SurfaceDecomposition& d, double step,
                                    std::size_t want) {
    std::vector<UnitVector> out;
    std::vector<std::size_t> candidates;
    const auto& grid = *d.grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (d.region_of_facet[i].kind != RegionLabel::KRegion) continue;
        bool clear = true;
        if (d.punctures)
            for (const auto& p : d.punctures->points) {
                const double outer = std::asin(std::min(1.0, 2.0 / d.n));
                if (spherical_angle(grid.nodes[i], p) < outer + 3.0 * step) clear = false;
            }
        if (clear) candidates.push_back(i);
    }
    const std::size_t stride = std::max<std::size_t>(1, candidates.size() / want);
    for (std::size_t k = 0; k < candidates.size() && out.size() < want; k += stride)
        out.push_back(grid.nodes[candidates[k]]);
    return out;
}

double max_offset_deviation(const ConvexPolytope& P) {
    double worst = 0.0;
    for (const auto& f : P.facets)
        if (!f.vertex_loop.empty())
            worst = std::max(worst, std::abs(f.plane_offset - 1.0));
    return worst;
}

}  // namespace

int main() {
    // --- 1. Round-sphere control, levels 3 and 4 -----------------------------
    try {
        double devs[2];
        bool ok = true;
        std::string detail;
        for (int level = 3; level <= 4; ++level) {
            const auto t0 = std::chrono::steady_clock::now();
            auto grid = std::make_shared<QuadratureGrid>(build_grid(level));
            Eigen::VectorXd F =
                Eigen::Map<const Eigen::VectorXd>(grid->weights.data(), grid->size());
            MinkowskiProblem prob(grid, F);
            auto [h, rep] = solve(prob);
            devs[level - 3] = max_offset_deviation(realize(h));
            const double secs = elapsed(t0);
            ok = ok && rep.final_residual <= 1e-6 && rep.iterations <= 2000 &&
                 devs[level - 3] <= 0.01 && secs <= 60.0;
            detail += fmt("L%.0f |offset-1| %.3g; ", double(level), devs[level - 3]);
        }
        ok = ok && devs[1] < devs[0];
        report(1, "round_sphere_control", ok,
               detail + (devs[1] < devs[0] ? "level 4 improves" : "level 4 does not improve"));
    } catch (const std::exception& e) {
        report(1, "round_sphere_control", false, e.what());
    }

    // --- 2. Exact cube -------------------------------------------------------
    try {
        std::vector<UnitVector> ns;
        for (int a = 0; a < 3; ++a)
            for (int s : {1, -1}) {
                Vec3 v = Vec3::Zero();
                v[a] = s;
                ns.emplace_back(v);
            }
        auto grid = std::make_shared<QuadratureGrid>(
            QuadratureGrid::from_nodes(ns, std::vector<double>(6, 4.0 * kPi / 6.0)));
        MinkowskiProblem prob(grid, Eigen::VectorXd::Ones(6));
        SolveOptions opts;
        opts.tol_rel = 1e-12;
        auto [h, rep] = solve(prob, opts);
        auto [Q, t] = recenter(realize(h));
        double worst = 0.0;
        for (int sx : {-1, 1})
            for (int sy : {-1, 1})
                for (int sz : {-1, 1}) {
                    const Vec3 corner(0.5 * sx, 0.5 * sy, 0.5 * sz);
                    double best = 1e30;
                    for (const auto& v : Q.vertices)
                        best = std::min(best, (v - corner).norm());
                    worst = std::max(worst, best);
                }
        report(2, "exact_cube",
               worst <= 1e-6 && rep.final_residual <= 1e-10,
               fmt("vertex error %.3g, residual %.3g", worst, rep.final_residual));
    } catch (const std::exception& e) {
        report(2, "exact_cube", false, e.what());
    }

    // Level-5 grid shared by every remaining criterion.
    auto grid5 = std::make_shared<QuadratureGrid>(build_grid(5));

    // --- 3. Claim 4.1 cap identity ------------------------------------------
    try {
        std::mt19937 rng(32u);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const UnitVector q = random_direction(rng);
            const SphericalCap cap(q, 0.2);
            Vec3 got = integrate_vector(
                *grid5, [&](const UnitVector& u) { return cap.contains(u) ? 1.0 : 0.0; });
            worst = std::max(worst, (got - kPi * 0.04 * q.vec()).norm());
        }
        report(3, "cap_first_moment", worst <= 2e-3,
               fmt("max |int_B p - pi r^2 q| = %.3g (bound %.3g)", worst, 2e-3));
    } catch (const std::exception& e) {
        report(3, "cap_first_moment", false, e.what());
    }

    // --- 4. Volume gradient oracle ------------------------------------------
    try {
        auto vg = std::make_shared<QuadratureGrid>(build_vertex_grid(1));
        std::mt19937 rng(2u);
        double worst = 0.0;
        const double eps = 2e-5;
        for (int trial = 0; trial < 5; ++trial) {
            SupportVector h{vg, Eigen::VectorXd(vg->size())};
            for (std::size_t i = 0; i < vg->size(); ++i)
                h.values[i] = 0.8 + 0.4 * (rng() + 0.5) * (1.0 / 4294967296.0);
            const auto areas = facet_areas(realize(h));
            double total = 0.0;
            for (double a : areas) total += a;
            for (std::size_t i = 0; i < vg->size(); ++i) {
                if (areas[i] <= 1e-6 * total) continue;
                SupportVector hp = h, hm = h;
                auto fd_at = [&](double e) {
                    hp.values[i] = h.values[i] + e;
                    hm.values[i] = h.values[i] - e;
                    return (volume(realize(hp)) - volume(realize(hm))) / (2 * e);
                };
                // Richardson-extrapolated central difference: the O(e^2)
                // truncation term cancels, leaving only evaluation noise.
                const double fd = (4.0 * fd_at(eps) - fd_at(2 * eps)) / 3.0;
                worst = std::max(worst, std::abs(fd - areas[i]) / areas[i]);
            }
        }
        report(4, "volume_gradient_oracle", worst <= 1e-5,
               fmt("max relative gradient error %.3g (bound %.3g)", worst, 1e-5));
    } catch (const std::exception& e) {
        report(4, "volume_gradient_oracle", false, e.what());
    }

    // --- Flagship: antipodal punctures, a = (4, 4), level 5 ------------------
    const UnitVector axis(0.3, 0.2, 1.0);
    auto flagship = std::make_shared<PunctureSet>(std::vector<UnitVector>{axis, -axis},
                                                  std::vector<double>{4.0, 4.0});
    struct Run {
        int n;
        SupportVector h;
        SurfaceDecomposition d;
        double total_area = 0.0;
    };
    std::vector<Run> runs;
    double flagship_secs = 0.0;
    std::string flagship_err;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        for (int n : {4, 8, 16}) {
            auto [h, d] = construct(grid5, flagship, n, SolveOptions{});
            double total = 0.0;
            for (const auto& f : d.body.facets) total += f.area;
            runs.push_back({n, std::move(h), std::move(d), total});
        }
        flagship_secs = elapsed(t0);
    } catch (const std::exception& e) {
        flagship_err = e.what();
    }

    // --- 5. Flagship disc geometry ------------------------------------------
    if (runs.size() == 3) {
        bool ok = flagship_secs <= 900.0;
        std::string detail;
        for (const Run& r : runs) {
            const double slack = 1.25 * 8.0 * kPi / (double(r.n) * r.n);
            for (int j = 0; j < 2; ++j) {
                const DiscMetrics dm = disc_metrics(r.d, j);
                const double rel = std::abs(dm.area - 4.0) / 4.0;
                if (r.n == 8) ok = ok && rel <= 0.10;
                if (r.n == 16) ok = ok && rel <= 0.06;
                if (r.n >= 8)
                    ok = ok && dm.normal_angle <= 0.02 &&
                         dm.plane_rms <= 0.01 * diameter(r.d.body);
                ok = ok && r.d.annulus_area(j) < slack;
            }
            detail += fmt("n=%.0f disc %.4g; ", double(r.n), disc_metrics(r.d, 0).area);
        }
        report(5, "flagship_disc_areas", ok,
               detail + fmt("runtime %.1fs (bound %.0fs)", flagship_secs, 900.0));
    } else {
        report(5, "flagship_disc_areas", false, flagship_err);
    }

    // --- 6. Total area bound -------------------------------------------------
    if (runs.size() == 3) {
        bool ok = true;
        std::string detail;
        for (const Run& r : runs) {
            const double rhs = 4.0 * kPi + 2.0 * 8.0 * kPi / (double(r.n) * r.n) + 8.0;
            ok = ok && r.total_area < 1.02 * rhs;
            detail += fmt3("n=%.0f area %.4g < %.4g; ", double(r.n), r.total_area, 1.02 * rhs);
        }
        report(6, "lemma42_area_bound", ok, detail);
    } else {
        report(6, "lemma42_area_bound", false, flagship_err);
    }

    // --- 7. Generic three-puncture equilibrium flux --------------------------
    try {
        const UnitVector p1(1, 0, 0), p2(0, 1, 0);
        const UnitVector p3(-(p1.vec() + 1.5 * p2.vec()));
        std::vector<UnitVector> pts{p1, p2, p3};
        auto punc = std::make_shared<PunctureSet>(pts, find_equilibrium_weights(pts));
        auto [h, d] = construct(grid5, punc, 12, SolveOptions{});
        double disc_total = 0.0;
        for (int j = 0; j < 3; ++j) disc_total += d.disc_area(j);
        const double rel = equilibrium_check(d).norm() / disc_total;
        report(7, "equilibrium_flux", rel <= 0.05,
               fmt("|sum A_j p_j| / sum A_j = %.3g (bound %.3g)", rel, 0.05));
    } catch (const std::exception& e) {
        report(7, "equilibrium_flux", false, e.what());
    }

    // --- 8/9. Monge-Ampere residual and parallel-surface identity ------------
    try {
        if (runs.size() != 3) fail(ErrorKind::Solver, flagship_err);
        const Run& r8 = runs[1];
        const double step = 5.0 * mean_angular_spacing(*grid5);

        std::vector<double> dets, hdefs;
        int excluded = 0;
        for (const UnitVector& at : probe_nodes(r8.d, step, 50)) {
            dets.push_back(std::abs(hessian_residual(r8.h, r8.d.body, at, step)));
            if (auto hd = parallel_H_check(r8.h, r8.d.body, at, step))
                hdefs.push_back(std::abs(*hd));
            else
                ++excluded;
        }

        // Ball control at the same level and step.
        Eigen::VectorXd F =
            Eigen::Map<const Eigen::VectorXd>(grid5->weights.data(), grid5->size());
        auto [hb, repb] = solve(MinkowskiProblem(grid5, F));
        const ConvexPolytope ball = realize(hb);
        std::vector<double> ball_dets;
        const std::size_t stride = grid5->size() / 50;
        for (std::size_t i = 0; i < grid5->size() && ball_dets.size() < 50; i += stride)
            ball_dets.push_back(
                std::abs(hessian_residual(hb, ball, grid5->nodes[i], step)));

        const double med = median_abs(dets);
        const double ball_med = median_abs(ball_dets);
        report(8, "monge_ampere_residual",
               dets.size() == 50 && med <= 0.1 && ball_med <= 0.01,
               fmt("flagship median |det-1| %.3g (bound 0.1), ball %.3g", med, ball_med));

        const double hmed = median_abs(hdefs);
        report(9, "parallel_surface_identity", !hdefs.empty() && hmed <= 0.05,
               fmt3("median |H-1/2| %.3g over %.0f probes (%.0f excluded)", hmed,
                    double(hdefs.size()), double(excluded)));
    } catch (const std::exception& e) {
        report(8, "monge_ampere_residual", false, e.what());
        report(9, "parallel_surface_identity", false, e.what());
    }

    // --- 10. Uniqueness up to translations -----------------------------------
    try {
        if (runs.size() != 3) fail(ErrorKind::Solver, flagship_err);
        const Run& r8 = runs[1];
        DensityField f = build_density(grid5, flagship, 8);
        Eigen::VectorXd F(grid5->size());
        for (std::size_t i = 0; i < grid5->size(); ++i)
            F[i] = f.values[i] * grid5->weights[i];
        const double spread = uniqueness_probe(MinkowskiProblem(grid5, F), SolveOptions{}, 3);
        const double bound = 1e-3 * diameter(r8.d.body);
        report(10, "uniqueness_translations", spread <= bound,
               fmt("max recentered d_H %.3g (bound %.3g)", spread, bound));
    } catch (const std::exception& e) {
        report(10, "uniqueness_translations", false, e.what());
    }

    // --- 11. Hausdorff convergence trend -------------------------------------
    if (runs.size() == 3) {
        const double d48 = hausdorff_distance(runs[0].d.body, runs[1].d.body, *grid5);
        const double d816 = hausdorff_distance(runs[1].d.body, runs[2].d.body, *grid5);
        report(11, "hausdorff_trend", d816 < d48,
               fmt("d_H(K_8,K_16) %.3g < d_H(K_4,K_8) %.3g", d816, d48));
    } else {
        report(11, "hausdorff_trend", false, flagship_err);
    }

    // --- 12. Gauss coverage --------------------------------------------------
    if (runs.size() == 3) {
        const double cov = gauss_coverage(runs[1].d);
        report(12, "gauss_coverage", cov >= 0.999,
               fmt("K-region coverage %.6g (bound %.4g)", cov, 0.999));
    } else {
        report(12, "gauss_coverage", false, flagship_err);
    }

    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
