#pragma once

#include <Eigen/Dense>

#include "minksurf/error.hpp"

namespace minksurf {

using Vec3 = Eigen::Vector3d;

/// A point on the unit sphere. Construction normalizes and every instance
/// satisfies ‖v‖ = 1 to within 1e-12.
class UnitVector {
public:
    explicit UnitVector(const Vec3& v);
    UnitVector(double x, double y, double z) : UnitVector(Vec3(x, y, z)) {}

    const Vec3& vec() const { return v_; }
    double x() const { return v_.x(); }
    double y() const { return v_.y(); }
    double z() const { return v_.z(); }

    UnitVector operator-() const;

private:
    Vec3 v_;
};

/// Spherical angle between p and q, in [0, pi]. Computed as arccos of the
/// clamped inner product.
double spherical_angle(const UnitVector& p, const UnitVector& q);

/// Open cap B(q, r) = { p : sin angle(p,q) < r, cos angle(p,q) > 0 }.
/// sin_radius = 1 is allowed and denotes the open hemisphere.
struct SphericalCap {
    UnitVector center;
    double sin_radius;

    SphericalCap(const UnitVector& c, double sr);
    bool contains(const UnitVector& p) const;
};

bool cap_contains(const SphericalCap& cap, const UnitVector& p);

/// Annulus A(q, r) = B(q, 2r) minus the closure of B(q, r).
struct SphericalAnnulus {
    UnitVector center;
    double sin_inner;  // r; the outer cap has sin radius min(2r, 1)

    SphericalAnnulus(const UnitVector& c, double r);
    bool contains(const UnitVector& p) const;
};

/// Orthonormal frame (t1, t2) spanning the tangent plane at p, with
/// t1 x t2 = p. Deterministic for a given p.
void tangent_frame(const UnitVector& p, Vec3& t1, Vec3& t2);

}  // namespace minksurf
