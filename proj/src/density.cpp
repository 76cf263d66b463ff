#include "minksurf/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace minksurf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * kPi;

Eigen::Matrix3Xd point_matrix(const std::vector<UnitVector>& points) {
    Eigen::Matrix3Xd P(3, points.size());
    for (std::size_t j = 0; j < points.size(); ++j) P.col(j) = points[j].vec();
    return P;
}

// Euclidean projection onto the probability simplex (Held et al.).
Eigen::VectorXd project_simplex(Eigen::VectorXd v) {
    Eigen::VectorXd u = v;
    std::sort(u.data(), u.data() + u.size(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (int i = 0; i < u.size(); ++i) {
        css += u[i];
        const double t = (css - 1.0) / (i + 1);
        if (u[i] - t > 0.0) {
            rho = i + 1;
            theta = t;
        }
    }
    (void)rho;
    for (int i = 0; i < v.size(); ++i) v[i] = std::max(v[i] - theta, 0.0);
    return v;
}

double quintic_smoothstep(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

}  // namespace

PunctureSet::PunctureSet(std::vector<UnitVector> pts, std::vector<double> w)
    : points(std::move(pts)), weights(std::move(w)) {
    if (points.size() < 2)
        fail(ErrorKind::Input, "PunctureSet: at least two punctures are required");
    if (points.size() != weights.size())
        fail(ErrorKind::Input, "PunctureSet: points/weights size mismatch");
    Vec3 sum = Vec3::Zero();
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (!(weights[j] > 0.0))
            fail(ErrorKind::Input, "PunctureSet: weights must be strictly positive");
        sum += weights[j] * points[j].vec();
        for (std::size_t k = j + 1; k < points.size(); ++k)
            if (spherical_angle(points[j], points[k]) <= 1e-6)
                fail(ErrorKind::Input, "PunctureSet: puncture directions must be distinct");
    }
    if (sum.norm() > 1e-10)
        fail(ErrorKind::Input, "PunctureSet: weights violate the equilibrium condition");
}

std::optional<Vec3> separating_direction(const std::vector<UnitVector>& points) {
    // Minimum-norm point of the convex hull of the directions; if it is
    // bounded away from the origin it certifies that all points lie in an
    // open half-space.
    const Eigen::Matrix3Xd P = point_matrix(points);
    const int m = static_cast<int>(points.size());
    Eigen::VectorXd lam = Eigen::VectorXd::Constant(m, 1.0 / m);
    const Eigen::MatrixXd G = P.transpose() * P;
    const double step = 1.0 / std::max(1.0, G.operatorNorm());
    for (int it = 0; it < 4000; ++it)
        lam = project_simplex(lam - step * (G * lam));
    const Vec3 nu = P * lam;
    if (nu.norm() > 1e-9) return nu.normalized();
    return std::nullopt;
}

std::vector<double> find_equilibrium_weights(const std::vector<UnitVector>& points) {
    const int m = static_cast<int>(points.size());
    if (m < 2) fail(ErrorKind::Input, "find_equilibrium_weights: need at least two points");
    for (int j = 0; j < m; ++j)
        for (int k = j + 1; k < m; ++k)
            if (spherical_angle(points[j], points[k]) <= 1e-6)
                fail(ErrorKind::Input, "find_equilibrium_weights: points must be distinct");

    const Eigen::Matrix3Xd P = point_matrix(points);

    // Alternating projections between the affine slice
    // { a : P a = 0, sum a = m } and the floor constraint a >= floor.
    Eigen::MatrixXd B(4, m);
    B.topRows(3) = P;
    B.row(3).setOnes();
    Eigen::Vector4d b(0, 0, 0, static_cast<double>(m));
    const auto cod = B.completeOrthogonalDecomposition();

    const double floor = 1e-3;
    Eigen::VectorXd a = Eigen::VectorXd::Ones(m);
    bool feasible = false;
    for (int it = 0; it < 5000; ++it) {
        a -= cod.solve(B * a - b);
        const double amin = a.minCoeff();
        if (amin >= floor * 0.999 && (B * a - b).norm() <= 1e-12 * m) {
            feasible = true;
            break;
        }
        for (int j = 0; j < m; ++j) a[j] = std::max(a[j], floor);
    }
    if (!feasible || a.minCoeff() <= 0.0) {
        std::ostringstream os;
        os << "no equilibrium weights exist: the origin is not in the relative "
              "interior of the positive hull";
        if (auto w = separating_direction(points))
            os << " (separating direction " << w->transpose() << ")";
        fail(ErrorKind::Infeasible, os.str());
    }

    // Normalize to min weight 1, then polish the equilibrium residual with a
    // minimum-norm correction.
    a /= a.minCoeff();
    const auto codP = Eigen::MatrixXd(P).completeOrthogonalDecomposition();
    for (int pass = 0; pass < 3; ++pass) {
        a -= codP.solve(P * a);
        a /= a.minCoeff();
    }
    if ((P * a).norm() > 1e-10 || a.minCoeff() <= 0.0)
        fail(ErrorKind::Solver, "find_equilibrium_weights: polish failed to reach tolerance");
    return std::vector<double>(a.data(), a.data() + m);
}

int minimum_n(const PunctureSet& punctures) {
    const std::size_t m = punctures.size();
    for (int n = 1; n < 1000000; ++n) {
        bool ok = true;
        for (std::size_t j = 0; j < m && ok; ++j)
            if (!(1.0 / (static_cast<double>(n) * n) < 3.0 * punctures.weights[j] / kFourPi))
                ok = false;
        if (ok && 2.0 / n > 1.0) ok = false;  // cap radius undefined
        if (ok) {
            const double rho = std::asin(2.0 / n);
            for (std::size_t j = 0; j < m && ok; ++j)
                for (std::size_t k = j + 1; k < m && ok; ++k) {
                    const double theta = spherical_angle(punctures.points[j], punctures.points[k]);
                    const double need = std::min(kPi, 1.1 * 2.0 * rho);
                    if (theta + 1e-12 < need) ok = false;
                }
        }
        if (ok) return n;
    }
    fail(ErrorKind::Solver, "minimum_n: search exhausted");
}

double TransitionProfile::operator()(double s) const {
    const double x = quintic_smoothstep((2.0 * r - s) / r);
    return 1.0 + (lambda - 1.0) * std::pow(x, shape_param);
}

double annulus_flux(const QuadratureGrid& grid, const UnitVector& q, double r,
                    const std::function<double(double)>& profile) {
    const SphericalAnnulus ann(q, r);
    double flux = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!ann.contains(grid.nodes[i])) continue;
        const double s = grid.nodes[i].vec().cross(q.vec()).norm();
        flux += grid.weights[i] * profile(s) * grid.nodes[i].vec().dot(q.vec());
    }
    return flux;
}

TransitionProfile solve_transition(double r, double lambda, double mu,
                                   const QuadratureGrid& grid, const UnitVector& q) {
    if (!(r > 0.0) || !(r <= 0.5))
        fail(ErrorKind::Input, "solve_transition: r must lie in (0, 1/2]");
    if (!(lambda > 1.0)) fail(ErrorKind::Input, "solve_transition: lambda must exceed 1");
    if (!(mu > 3.0 * kPi * r * r) || !(mu < 3.0 * kPi * r * r * lambda))
        fail(ErrorKind::Input, "solve_transition: mu outside the open admissible interval");

    const SphericalAnnulus ann(q, r);
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (ann.contains(grid.nodes[i])) ++count;
    if (count < 8)
        fail(ErrorKind::Resolution, "solve_transition: fewer than 8 annulus nodes on this grid");

    const double flux_low = annulus_flux(grid, q, r, [](double) { return 1.0; });
    const double flux_high = annulus_flux(grid, q, r, [&](double) { return lambda; });
    if (!(mu > flux_low) || !(mu < flux_high))
        fail(ErrorKind::Input, "solve_transition: flux target unreachable on this grid");

    TransitionProfile prof;
    prof.r = r;
    prof.lambda = lambda;
    prof.mu = mu;
    prof.epsilon = r / 4.0;

    auto flux_of = [&](double theta) {
        TransitionProfile p = prof;
        p.shape_param = theta;
        return annulus_flux(grid, q, r, [&](double s) { return p(s); });
    };

    // The flux is strictly decreasing in theta; bisect in log space.
    double tlo = std::log(1e-6), thi = std::log(1e6);
    double flo = flux_of(std::exp(tlo)), fhi = flux_of(std::exp(thi));
    if (!(flo > fhi))
        fail(ErrorKind::Solver, "solve_transition: flux is not monotone in the shape parameter");
    const double tol = 1e-8 * mu;
    double theta = 1.0, f = flux_of(theta);
    for (int it = 0; it < 200 && std::abs(f - mu) > tol; ++it) {
        const double tmid = 0.5 * (tlo + thi);
        theta = std::exp(tmid);
        f = flux_of(theta);
        if (f > mu)
            tlo = tmid;
        else
            thi = tmid;
    }
    if (std::abs(f - mu) > tol)
        fail(ErrorKind::Solver, "solve_transition: bisection failed to reach the flux tolerance");
    prof.shape_param = theta;
    return prof;
}

DensityField build_density(std::shared_ptr<const QuadratureGrid> grid,
                           std::shared_ptr<const PunctureSet> punctures, int n) {
    if (!grid) fail(ErrorKind::Input, "build_density: null grid");
    const std::size_t N = grid->size();
    DensityField field;
    field.grid = grid;
    field.n = n;
    field.punctures = punctures;
    field.values = Eigen::VectorXd::Ones(N);

    // Node classification: 0 = bulk, 1 = annulus, 2 = cap.
    std::vector<int> label(N, 0);

    if (punctures) {
        const PunctureSet& ps = *punctures;
        if (n < minimum_n(ps))
            fail(ErrorKind::Input, "build_density: n below minimum_n for these punctures");
        const double r = 1.0 / n;

        for (std::size_t j = 0; j < ps.size(); ++j) {
            const double lambda = ps.weights[j] * n * n / kPi;
            const double mu = kFourPi / (static_cast<double>(n) * n);
            const SphericalCap cap(ps.points[j], r);
            const SphericalAnnulus ann(ps.points[j], r);

            std::size_t cap_nodes = 0;
            for (std::size_t i = 0; i < N; ++i)
                if (cap.contains(grid->nodes[i])) ++cap_nodes;
            if (cap_nodes < 12) {
                std::ostringstream os;
                os << "build_density: cap " << j << " holds only " << cap_nodes
                   << " nodes (need >= 12); refine the grid";
                fail(ErrorKind::Resolution, os.str());
            }

            const TransitionProfile prof = solve_transition(r, lambda, mu, *grid, ps.points[j]);
            for (std::size_t i = 0; i < N; ++i) {
                if (cap.contains(grid->nodes[i])) {
                    field.values[i] = lambda;
                    label[i] = 2;
                } else if (ann.contains(grid->nodes[i])) {
                    const double s = grid->nodes[i].vec().cross(ps.points[j].vec()).norm();
                    field.values[i] = prof(s);
                    label[i] = 1;
                }
            }
        }
    }

    // Closure correction: remove the residual vector with a multiplicative
    // perturbation supported on the bulk nodes, lifted so f stays >= 1.
    auto residual = [&] {
        Vec3 R = Vec3::Zero();
        for (std::size_t i = 0; i < N; ++i)
            R += grid->weights[i] * field.values[i] * grid->nodes[i].vec();
        return R;
    };
    auto mass = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s += grid->weights[i] * field.values[i];
        return s;
    };

    for (int pass = 0; pass < 80; ++pass) {
        const Vec3 R = residual();
        const double tol = 1e-9 * mass();
        if (R.norm() <= tol) break;
        Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
        for (std::size_t i = 0; i < N; ++i) {
            if (label[i] != 0) continue;
            const Vec3& u = grid->nodes[i].vec();
            M += grid->weights[i] * field.values[i] * u * u.transpose();
        }
        const Vec3 d = M.ldlt().solve(R);
        double lift = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            if (label[i] == 0) lift = std::max(lift, grid->nodes[i].vec().dot(d));
        for (std::size_t i = 0; i < N; ++i)
            if (label[i] == 0)
                field.values[i] *= 1.0 + lift - grid->nodes[i].vec().dot(d);
    }
    if (residual().norm() > 1e-9 * mass())
        fail(ErrorKind::Solver, "build_density: closure correction failed to converge");
    return field;
}

Vec3 closure_defect(const DensityField& field) {
    Vec3 R = Vec3::Zero();
    for (std::size_t i = 0; i < field.grid->size(); ++i)
        R += field.grid->weights[i] * field.values[i] * field.grid->nodes[i].vec();
    return R;
}

double total_mass(const DensityField& field) {
    double s = 0.0;
    for (std::size_t i = 0; i < field.grid->size(); ++i)
        s += field.grid->weights[i] * field.values[i];
    return s;
}

}  // namespace minksurf
