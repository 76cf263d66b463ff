#include <doctest.h>

#include <cmath>
#include <numbers>

#include "minksurf/grid.hpp"

using namespace minksurf;

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
}

TEST_CASE("build_grid node counts and partition invariants") {
    for (int level = 0; level <= 4; ++level) {
        QuadratureGrid g = build_grid(level);
        CHECK(g.size() == 20u * (1u << (2 * level)));
        CHECK(g.level == level);
        double total = 0;
        Vec3 closure = Vec3::Zero();
        double wmin = 1e30, wmax = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            total += g.weights[i];
            closure += g.weights[i] * g.nodes[i].vec();
            wmin = std::min(wmin, g.weights[i]);
            wmax = std::max(wmax, g.weights[i]);
        }
        CHECK(std::abs(total - kFourPi) < 1e-10);
        CHECK(closure.norm() < 1e-9);
        CHECK(wmin > 0);
        // Icosphere triangles are near-uniform: bounded area ratio.
        CHECK(wmax / wmin < 2.2);
    }
    CHECK_THROWS_AS(build_grid(-1), Error);
    CHECK_THROWS_AS(build_grid(9), Error);
}

TEST_CASE("build_grid is deterministic") {
    QuadratureGrid a = build_grid(2), b = build_grid(2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((a.nodes[i].vec() - b.nodes[i].vec()).norm() == 0.0);
        CHECK(a.weights[i] == b.weights[i]);
    }
}

TEST_CASE("build_vertex_grid has icosphere vertex counts and closes") {
    for (int level = 0; level <= 3; ++level) {
        QuadratureGrid g = build_vertex_grid(level);
        // V = 10*4^level + 2
        CHECK(g.size() == 10u * (1u << (2 * level)) + 2u);
        double total = 0;
        Vec3 closure = Vec3::Zero();
        for (std::size_t i = 0; i < g.size(); ++i) {
            total += g.weights[i];
            closure += g.weights[i] * g.nodes[i].vec();
        }
        CHECK(std::abs(total - kFourPi) < 1e-10);
        CHECK(closure.norm() < 1e-9);
    }
}

TEST_CASE("quadrature integrates low-order moments accurately") {
    QuadratureGrid g = build_grid(3);
    // integral of u <a,u> over S^2 equals (4 pi / 3) a.
    Vec3 a(0.3, -1.2, 0.7);
    Vec3 got = integrate_vector(g, [&](const UnitVector& u) { return a.dot(u.vec()); });
    CHECK((got - (kFourPi / 3.0) * a).norm() < 1e-3);

    // Odd integrand integrates to zero by closure.
    Vec3 gz = integrate_vector(g, [](const UnitVector&) { return 1.0; });
    CHECK(gz.norm() < 1e-9);
}

TEST_CASE("integrate_vector reports the offending node on non-finite values") {
    QuadratureGrid g = build_grid(0);
    CHECK_THROWS_AS(
        integrate_vector(g, [](const UnitVector& u) { return 1.0 / (u.z() - u.z()); }),
        Error);
}

TEST_CASE("from_nodes validates the partition invariants") {
    QuadratureGrid g = build_grid(1);
    CHECK_NOTHROW(QuadratureGrid::from_nodes(g.nodes, g.weights));

    auto bad_w = g.weights;
    bad_w[0] += 1e-6;
    CHECK_THROWS_AS(QuadratureGrid::from_nodes(g.nodes, bad_w), Error);

    auto neg_w = g.weights;
    neg_w[3] = -neg_w[3];
    CHECK_THROWS_AS(QuadratureGrid::from_nodes(g.nodes, neg_w), Error);
}

TEST_CASE("mean_angular_spacing follows sqrt(4 pi / N)") {
    QuadratureGrid g = build_grid(2);
    CHECK(mean_angular_spacing(g) ==
          doctest::Approx(std::sqrt(kFourPi / static_cast<double>(g.size()))));
}

TEST_CASE("probe_directions: 62 distinct unit vectors, symmetric set") {
    const auto& dirs = probe_directions();
    CHECK(dirs.size() == 62u);
    Vec3 sum = Vec3::Zero();
    for (const auto& d : dirs) sum += d.vec();
    CHECK(sum.norm() < 1e-12);  // antipodally symmetric set
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j)
            CHECK((dirs[i].vec() - dirs[j].vec()).norm() > 1e-6);
}
