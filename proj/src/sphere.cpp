#include "minksurf/sphere.hpp"

#include <algorithm>
#include <cmath>

namespace minksurf {

UnitVector::UnitVector(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 1e-14) || !std::isfinite(n))
        fail(ErrorKind::Input, "UnitVector: cannot normalize a (near-)zero vector");
    v_ = v / n;
}

UnitVector UnitVector::operator-() const {
    UnitVector r = *this;
    r.v_ = -r.v_;
    return r;
}

double spherical_angle(const UnitVector& p, const UnitVector& q) {
    const double c = std::clamp(p.vec().dot(q.vec()), -1.0, 1.0);
    return std::acos(c);
}

SphericalCap::SphericalCap(const UnitVector& c, double sr) : center(c), sin_radius(sr) {
    if (!(sr > 0.0) || !(sr <= 1.0))
        fail(ErrorKind::Input, "SphericalCap: sin_radius must lie in (0, 1]");
}

bool SphericalCap::contains(const UnitVector& p) const {
    const double cosang = p.vec().dot(center.vec());
    if (!(cosang > 0.0)) return false;
    const double sinang = p.vec().cross(center.vec()).norm();
    return sinang < sin_radius;
}

bool cap_contains(const SphericalCap& cap, const UnitVector& p) {
    return cap.contains(p);
}

SphericalAnnulus::SphericalAnnulus(const UnitVector& c, double r) : center(c), sin_inner(r) {
    if (!(r > 0.0) || !(r < 1.0))
        fail(ErrorKind::Input, "SphericalAnnulus: inner sin radius must lie in (0, 1)");
}

bool SphericalAnnulus::contains(const UnitVector& p) const {
    const double cosang = p.vec().dot(center.vec());
    if (!(cosang > 0.0)) return false;
    const double sinang = p.vec().cross(center.vec()).norm();
    const double outer = std::min(2.0 * sin_inner, 1.0);
    return sinang > sin_inner && sinang < outer;
}

void tangent_frame(const UnitVector& p, Vec3& t1, Vec3& t2) {
    const Vec3& n = p.vec();
    Vec3 a = std::abs(n.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
    t1 = a.cross(n).normalized();
    t2 = n.cross(t1);
}

}  // namespace minksurf
