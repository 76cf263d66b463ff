#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "minksurf/report_io.hpp"

namespace fs = std::filesystem;
using namespace minksurf;

namespace {

constexpr const char* kVersion = "minksurf 0.1.0";
constexpr double kPi = std::numbers::pi;

// Exit codes: 0 all assertions pass, 1 assertion failure, 2 input error,
// 3 solver/construction failure.
int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Input:
        case ErrorKind::Resource:
        case ErrorKind::Resolution:
            return 2;
        default:
            return 3;
    }
}

struct Assertion {
    std::string name;
    std::string claim;  // the paper statement this checks
    double measured = 0;
    double bound = 0;
    bool upper = true;  // pass iff measured <= bound (else >=)
    bool pass() const { return upper ? measured <= bound : measured >= bound; }
};

json assertions_json(const std::vector<Assertion>& as) {
    json out = json::array();
    for (const auto& a : as)
        out.push_back({{"name", a.name},
                       {"claim", a.claim},
                       {"measured", a.measured},
                       {"bound", a.bound},
                       {"relation", a.upper ? "<=" : ">="},
                       {"pass", a.pass()}});
    return out;
}

double tol_or(const RunConfig& cfg, const std::string& key, double dflt) {
    auto it = cfg.tolerances.find(key);
    return it == cfg.tolerances.end() ? dflt : it->second;
}

void apply_overrides(RunConfig& cfg, const std::string& out_dir, int level, double tol,
                     int max_iters) {
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (level >= 0) cfg.grid_level = level;
    if (tol > 0) cfg.solver.tol_rel = tol;
    if (max_iters > 0) cfg.solver.max_iters = max_iters;
}

int finish(const std::vector<Assertion>& as, bool no_assert) {
    int failures = 0;
    for (const auto& a : as) {
        std::printf("[%s] %s: measured %.6g %s bound %.6g\n", a.pass() ? "pass" : "FAIL",
                    a.name.c_str(), a.measured, a.upper ? "<=" : ">=", a.bound);
        failures += !a.pass();
    }
    if (failures && !no_assert) {
        std::printf("%d assertion(s) failed\n", failures);
        return 1;
    }
    return 0;
}

int cmd_weights(const std::string& points_path, const std::string& out_dir) {
    auto pts = load_points(points_path);
    std::vector<double> w;
    try {
        w = find_equilibrium_weights(pts);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Infeasible) {
            std::printf("infeasible: %s\n", e.what());
            if (auto dir = separating_direction(pts))
                std::printf("separating direction: %.17g %.17g %.17g\n", dir->x(), dir->y(),
                            dir->z());
            return 3;
        }
        throw;
    }
    std::string line;
    for (std::size_t j = 0; j < w.size(); ++j) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", w[j]);
        line += (j ? " " : "") + std::string(buf);
    }
    std::printf("%s\n", line.c_str());
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        json out;
        out["points"] = json::array();
        for (const auto& p : pts) out["points"].push_back({p.x(), p.y(), p.z()});
        out["weights"] = w;
        write_text((fs::path(out_dir) / "weights.json").string(), out.dump(2) + "\n");
    }
    return 0;
}

int cmd_solve(RunConfig cfg, bool no_assert) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.punctures && cfg.n == 0)
        fail(ErrorKind::Input, "solve command needs 'n' when punctures are given");
    fs::create_directories(cfg.out_dir);

    auto grid = std::make_shared<QuadratureGrid>(build_grid(cfg.grid_level));
    SupportVector h{grid, Eigen::VectorXd()};
    SolveReport sr;
    SurfaceDecomposition d;
    if (cfg.punctures) {
        auto [hs, ds] = construct(grid, cfg.punctures, cfg.n, cfg.solver, &sr);
        h = std::move(hs);
        d = std::move(ds);
    } else {
        Eigen::VectorXd F(static_cast<Eigen::Index>(grid->size()));
        for (std::size_t i = 0; i < grid->size(); ++i) F[i] = grid->weights[i];
        auto [hs, r] = solve(MinkowskiProblem(grid, F), cfg.solver);
        h = std::move(hs);
        sr = std::move(r);
        d.body = realize(h);
        d.grid = grid;
        d.region_of_facet.assign(grid->size(), RegionLabel{});
    }
    std::vector<Assertion> as;
    as.push_back({"solver_residual",
                  "Theorem 2.2: discrete Minkowski problem solved to tolerance",
                  sr.final_residual, cfg.solver.tol_rel});
    double total_area = 0;
    for (const auto& f : d.body.facets) total_area += f.area;
    if (cfg.punctures) {
        const auto m = cfg.punctures->size();
        double rhs = 4.0 * kPi;
        for (std::size_t j = 0; j < m; ++j)
            rhs += 8.0 * kPi / (double(cfg.n) * cfg.n) + cfg.punctures->weights[j];
        as.push_back({"area_bound", "Lemma 4.2 proof: Area(S_n) < 4pi + sum 8pi/n^2 + sum a_j",
                      total_area, 1.02 * rhs});
        double disc_total = 0;
        for (std::size_t j = 0; j < m; ++j) {
            disc_total += d.disc_area(static_cast<int>(j));
            as.push_back({"annulus_area_" + std::to_string(j),
                          "eq:areaAnillo: annulus area < 8pi/n^2",
                          d.annulus_area(static_cast<int>(j)),
                          1.25 * 8.0 * kPi / (double(cfg.n) * cfg.n)});
            DiscMetrics dm = disc_metrics(d, static_cast<int>(j));
            as.push_back({"disc_plane_angle_" + std::to_string(j),
                          "Theorem 1.1(I): disc plane orthogonal to p_j", dm.normal_angle,
                          tol_or(cfg, "plane_angle", 0.05)});
        }
        as.push_back({"equilibrium_rel", "Section 3 Proposition: sum Area(C_j) q_j = 0",
                      disc_total > 0 ? equilibrium_check(d).norm() / disc_total : 0.0,
                      tol_or(cfg, "equilibrium_rel", 0.05)});
        as.push_back({"gauss_coverage", "Claim 4.5: Gauss map realizes every K-region normal",
                      gauss_coverage(d), 0.999, false});
    }

    if (cfg.export_mesh) export_obj(d.body, (fs::path(cfg.out_dir) / "body.obj").string());
    write_text((fs::path(cfg.out_dir) / "body.json").string(),
               body_to_json(d.body).dump() + "\n");
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < sr.residual_history.size(); ++i)
            rows.push_back({static_cast<double>(i), sr.residual_history[i]});
        write_csv((fs::path(cfg.out_dir) / "residuals.csv").string(),
                  {"iteration", "max_rel_residual"}, rows);
    }
    json report;
    report["version"] = kVersion;
    report["config"] = cfg.echo();
    report["iterations"] = sr.iterations;
    report["final_residual"] = sr.final_residual;
    report["solver_wall_time"] = sr.wall_time;
    report["total_area"] = total_area;
    report["volume"] = volume(d.body);
    report["diameter"] = diameter(d.body);
    if (cfg.punctures) {
        json discs = json::array();
        for (std::size_t j = 0; j < cfg.punctures->size(); ++j) {
            DiscMetrics dm = disc_metrics(d, static_cast<int>(j));
            discs.push_back({{"area", dm.area},
                             {"annulus_area", d.annulus_area(static_cast<int>(j))},
                             {"plane_rms", dm.plane_rms},
                             {"normal_angle", dm.normal_angle},
                             {"boundary_convexity_defect", dm.boundary_convexity_defect}});
        }
        report["discs"] = discs;
    }
    report["assertions"] = assertions_json(as);
    report["wall_time"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text((fs::path(cfg.out_dir) / "report.json").string(), report.dump(2) + "\n");
    return finish(as, no_assert);
}

int cmd_sweep(RunConfig cfg, bool no_assert) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.n_values.empty()) fail(ErrorKind::Input, "sweep command needs n_values");
    fs::create_directories(cfg.out_dir);

    ConstructionConfig cc;
    cc.punctures = cfg.punctures;
    cc.n_values = cfg.n_values;
    cc.grid_level = cfg.grid_level;
    cc.solver = cfg.solver;
    cc.tolerances = cfg.tolerances;
    ConvergenceReport rep = run_sweep(cc);

    const std::size_t m = cfg.punctures ? cfg.punctures->size() : 0;
    std::vector<std::string> header = {"n"};
    for (std::size_t j = 0; j < m; ++j) header.push_back("disc_area_" + std::to_string(j));
    header.insert(header.end(),
                  {"hausdorff_prev", "total_area", "bound_rhs", "iterations"});
    std::vector<std::vector<double>> rows;
    std::size_t solved_seen = 0;
    double base_inradius = -1.0, base_diameter = -1.0;
    std::vector<Assertion> as;
    for (std::size_t k = 0; k < rep.records.size(); ++k) {
        const SweepRecord& r = rep.records[k];
        double rhs = 4.0 * kPi;
        for (std::size_t j = 0; j < m; ++j)
            rhs += 8.0 * kPi / (double(r.n) * r.n) + cfg.punctures->weights[j];
        std::vector<double> row = {static_cast<double>(r.n)};
        for (std::size_t j = 0; j < m; ++j)
            row.push_back(j < r.disc_areas.size() ? r.disc_areas[j] : -1.0);
        row.push_back(r.solved && solved_seen >= 1 && solved_seen - 1 < rep.hausdorff.size()
                          ? rep.hausdorff[solved_seen - 1]
                          : -1.0);
        row.insert(row.end(), {r.total_area, rhs, static_cast<double>(r.iterations)});
        rows.push_back(std::move(row));
        if (r.solved) {
            ++solved_seen;
            if (base_inradius < 0) {
                base_inradius = r.inradius;
                base_diameter = r.diameter;
            }
            as.push_back({"area_bound_n" + std::to_string(r.n),
                          "Lemma 4.2 proof: Area(S_n) < 4pi + sum 8pi/n^2 + sum a_j",
                          r.total_area, 1.02 * rhs});
            as.push_back({"inradius_n" + std::to_string(r.n),
                          "Lemma 4.2: inscribed ball of radius xi persists", r.inradius,
                          0.5 * base_inradius, false});
            as.push_back({"diameter_n" + std::to_string(r.n),
                          "Lemma 4.2: bodies stay bounded", r.diameter,
                          2.0 * base_diameter});
        } else {
            as.push_back({"solved_n" + std::to_string(r.n),
                          "Theorem 2.2: solvable under closure condition", 0.0, 1.0, false});
        }
    }
    for (std::size_t k = 1; k < rep.hausdorff.size(); ++k)
        as.push_back({"hausdorff_decay_" + std::to_string(k),
                      "Section 4: converges in the Hausdorff distance", rep.hausdorff[k],
                      rep.hausdorff[k - 1]});

    write_csv((fs::path(cfg.out_dir) / "sweep.csv").string(), header, rows);
    json report;
    report["version"] = kVersion;
    report["config"] = cfg.echo();
    json recs = json::array();
    for (const auto& r : rep.records) {
        json e = {{"n", r.n},
                  {"solved", r.solved},
                  {"disc_areas", r.disc_areas},
                  {"annulus_areas", r.annulus_areas},
                  {"total_area", r.total_area},
                  {"volume", r.volume},
                  {"diameter", r.diameter},
                  {"inradius", r.inradius},
                  {"equilibrium_rel", r.equilibrium_rel},
                  {"hessian_median", r.hessian_median},
                  {"hessian_probes", r.hessian_probes},
                  {"parallel_H_median", r.parallel_H_median},
                  {"parallel_H_excluded", r.parallel_H_excluded},
                  {"iterations", r.iterations}};
        if (!r.solved) e["failure"] = r.failure;
        recs.push_back(std::move(e));
    }
    report["records"] = recs;
    report["hausdorff"] = rep.hausdorff;
    report["assertions"] = assertions_json(as);
    report["wall_time"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text((fs::path(cfg.out_dir) / "report.json").string(), report.dump(2) + "\n");
    return finish(as, no_assert);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Minkowski solver and K-surface construction pipeline"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir, config_path, points_path, body_path, obj_path;
    int level = -1, max_iters = -1;
    double tol = -1;
    bool no_assert = false;
    app.add_option("--out-dir", out_dir, "Output directory (overrides config)");
    app.add_option("--level", level, "Grid subdivision level (overrides config)");
    app.add_option("--tol", tol, "Solver relative tolerance (overrides config)");
    app.add_option("--max-iters", max_iters, "Solver iteration cap (overrides config)");
    app.add_flag("--no-assert", no_assert, "Report assertion outcomes without failing");

    auto* weights = app.add_subcommand("weights", "Equilibrium weights for a point set");
    weights->add_option("points", points_path, "points JSON file")->required();
    auto* solve_cmd = app.add_subcommand("solve", "Solve one construction or control case");
    solve_cmd->add_option("config", config_path, "run config JSON")->required();
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the n-sweep convergence study");
    sweep_cmd->add_option("config", config_path, "run config JSON")->required();
    auto* export_cmd = app.add_subcommand("export", "Convert a body JSON to OBJ");
    export_cmd->add_option("body", body_path, "body JSON file")->required();
    export_cmd->add_option("obj", obj_path, "output OBJ path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (weights->parsed()) return cmd_weights(points_path, out_dir);
        if (export_cmd->parsed()) {
            std::ifstream in(body_path);
            if (!in) fail(ErrorKind::Input, "cannot open " + body_path);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                fail(ErrorKind::Input, body_path + ": " + std::string(e.what()));
            }
            export_obj(body_from_json(j), obj_path);
            return 0;
        }
        RunConfig cfg = load_run_config(config_path);
        apply_overrides(cfg, out_dir, level, tol, max_iters);
        if (solve_cmd->parsed()) return cmd_solve(std::move(cfg), no_assert);
        return cmd_sweep(std::move(cfg), no_assert);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
