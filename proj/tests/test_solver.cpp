#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "minksurf/solver.hpp"

using namespace minksurf;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<QuadratureGrid> axis_grid() {
    std::vector<UnitVector> nodes = {UnitVector(1, 0, 0),  UnitVector(-1, 0, 0),
                                     UnitVector(0, 1, 0),  UnitVector(0, -1, 0),
                                     UnitVector(0, 0, 1),  UnitVector(0, 0, -1)};
    std::vector<double> w(6, 4.0 * kPi / 6.0);
    return std::make_shared<QuadratureGrid>(
        QuadratureGrid::from_nodes(std::move(nodes), std::move(w)));
}

std::shared_ptr<QuadratureGrid> tetra_grid() {
    std::vector<UnitVector> nodes = {UnitVector(1, 1, 1), UnitVector(1, -1, -1),
                                     UnitVector(-1, 1, -1), UnitVector(-1, -1, 1)};
    std::vector<double> w(4, kPi);
    return std::make_shared<QuadratureGrid>(
        QuadratureGrid::from_nodes(std::move(nodes), std::move(w)));
}

}  // namespace

TEST_CASE("MinkowskiProblem validates closure and positivity") {
    auto g = axis_grid();
    CHECK_NOTHROW(MinkowskiProblem(g, Eigen::VectorXd::Ones(6)));

    Eigen::VectorXd bad = Eigen::VectorXd::Ones(6);
    bad[0] = 1.2;  // breaks sum F u = 0
    CHECK_THROWS_AS(MinkowskiProblem(g, bad), Error);

    Eigen::VectorXd neg = Eigen::VectorXd::Ones(6);
    neg[2] = 0.0;
    CHECK_THROWS_AS(MinkowskiProblem(g, neg), Error);
}

TEST_CASE("solve: unit targets on axis normals give the unit cube") {
    MinkowskiProblem prob(axis_grid(), Eigen::VectorXd::Ones(6));
    auto [h, report] = solve(prob);
    CHECK(report.final_residual <= 1e-10);
    ConvexPolytope P = realize(h);
    REQUIRE(P.vertices.size() == 8u);
    for (const auto& v : P.vertices) {
        CHECK(std::abs(std::abs(v.x()) - 0.5) < 1e-6);
        CHECK(std::abs(std::abs(v.y()) - 0.5) < 1e-6);
        CHECK(std::abs(std::abs(v.z()) - 0.5) < 1e-6);
    }
    CHECK(report.normalization.norm() < 1e-9);
}

TEST_CASE("solve: regular tetrahedron from equal face targets") {
    // Unit-edge regular tetrahedron: face area sqrt(3)/4, inradius
    // 1/(2 sqrt(6)); its support numbers equal the inradius in each of the
    // four face normals once centered at the incenter (= centroid).
    const double face = std::sqrt(3.0) / 4.0;
    MinkowskiProblem prob(tetra_grid(), Eigen::VectorXd::Constant(4, face));
    auto [h, report] = solve(prob);
    CHECK(report.final_residual <= 1e-8);
    const double inradius = 1.0 / (2.0 * std::sqrt(6.0));
    for (int i = 0; i < 4; ++i) CHECK(h.values[i] == doctest::Approx(inradius).epsilon(1e-6));
    ConvexPolytope P = realize(h);
    // Edge length 1.
    double emax = 0;
    for (const auto& e : P.edges) emax = std::max(emax, e.length);
    CHECK(emax == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("solve: kappa = 1 targets recover the unit ball") {
    auto g = std::make_shared<QuadratureGrid>(build_grid(3));
    Eigen::VectorXd F(static_cast<Eigen::Index>(g->size()));
    for (std::size_t i = 0; i < g->size(); ++i) F[i] = g->weights[i];
    MinkowskiProblem prob(g, F);
    auto [h, report] = solve(prob);
    CHECK(report.final_residual <= 1e-6);
    CHECK(report.iterations <= 2000);
    ConvexPolytope P = realize(h);
    double worst = 0;
    for (const auto& f : P.facets) worst = std::max(worst, std::abs(f.plane_offset - 1.0));
    CHECK(worst <= 0.01);
    CHECK(report.residual_history.size() == static_cast<std::size_t>(report.iterations) + 1);
    CHECK(report.wall_time > 0.0);
}

TEST_CASE("solve is deterministic") {
    auto g = std::make_shared<QuadratureGrid>(build_grid(2));
    Eigen::VectorXd F(static_cast<Eigen::Index>(g->size()));
    for (std::size_t i = 0; i < g->size(); ++i) F[i] = g->weights[i] * (1.0 + 0.2 * g->nodes[i].z() * g->nodes[i].z());
    // The quadratic modulation is even, so closure still holds.
    MinkowskiProblem prob(g, F);
    auto [h1, r1] = solve(prob);
    auto [h2, r2] = solve(prob);
    CHECK((h1.values - h2.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("solve: non-convergence carries the iteration count") {
    auto g = std::make_shared<QuadratureGrid>(build_grid(2));
    Eigen::VectorXd F(static_cast<Eigen::Index>(g->size()));
    for (std::size_t i = 0; i < g->size(); ++i) F[i] = g->weights[i];
    SolveOptions opt;
    opt.max_iters = 1;
    opt.tol_rel = 1e-13;  // unreachable in one step
    try {
        solve(MinkowskiProblem(g, F), opt);
        FAIL("expected solver error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Solver);
        CHECK(std::string(e.what()).find("1 iteration") != std::string::npos);
    }
}

TEST_CASE("verify_solution recomputes residuals and localizes perturbations") {
    MinkowskiProblem prob(axis_grid(), Eigen::VectorXd::Ones(6));
    auto [h, report] = solve(prob);
    ResidualSummary base = verify_solution(h, prob);
    CHECK(base.max_rel <= 1e-10);
    CHECK(base.achieved_closure.norm() < 1e-10);

    SupportVector bumped = h;
    bumped.values[0] += 0.01;
    ResidualSummary s = verify_solution(bumped, prob);
    CHECK(s.max_rel > 1e-3);
    // Pushing one cube face outward elongates the box: the four adjacent
    // faces grow to 1.01, the two x faces stay at 1.
    ConvexPolytope P = realize(bumped);
    CHECK(P.facets[0].area == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(P.facets[2].area == doctest::Approx(1.01).epsilon(1e-9));
}

TEST_CASE("uniqueness_probe: distinct initializations agree up to translation") {
    auto g = std::make_shared<QuadratureGrid>(build_grid(3));
    Eigen::VectorXd F(static_cast<Eigen::Index>(g->size()));
    for (std::size_t i = 0; i < g->size(); ++i) F[i] = g->weights[i];
    MinkowskiProblem prob(g, F);
    SolveOptions opt;
    double d = uniqueness_probe(prob, opt, 3);
    CHECK(d <= 1e-4 * 2.0);  // diameter of the unit ball body is about 2
}
