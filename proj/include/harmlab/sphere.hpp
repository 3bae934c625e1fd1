#pragma once

#include <cmath>

namespace harmlab {

struct SpherePoint {
    double theta;  // colatitude in [0, pi]
    double phi;    // longitude in [0, 2*pi)
};

struct Vec3 {
    double x, y, z;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 to_unit_vector(const SpherePoint& p) {
    const double st = std::sin(p.theta);
    return {st * std::cos(p.phi), st * std::sin(p.phi), std::cos(p.theta)};
}

inline SpherePoint from_unit_vector(const Vec3& v) {
    double phi = std::atan2(v.y, v.x);
    if (phi < 0.0) phi += 6.283185307179586476925286766559;
    const double theta = std::atan2(std::hypot(v.x, v.y), v.z);
    return {theta, phi};
}

inline double geodesic_distance(const Vec3& a, const Vec3& b) {
    // atan2 form is accurate for both small and near-antipodal separations
    const Vec3 cr{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
    return std::atan2(cr.norm(), a.dot(b));
}

inline double geodesic_distance(const SpherePoint& a, const SpherePoint& b) {
    return geodesic_distance(to_unit_vector(a), to_unit_vector(b));
}

// Orthonormal tangent frame (e_theta, e_phi); at the poles the limit along
// the phi = 0 meridian is used.
struct TangentFrame {
    Vec3 e_theta, e_phi;
};

inline TangentFrame tangent_frame(const SpherePoint& p) {
    const double ct = std::cos(p.theta), st = std::sin(p.theta);
    const double cp = std::cos(p.phi), sp = std::sin(p.phi);
    return {{ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

// Chart B is the chart obtained by rotating the sphere by +90 degrees about
// the y axis: world = R * b, with R(x,y,z) = (z, y, -x). A point near a
// world pole sits near the chart-B equator.
inline Vec3 chart_b_to_world(const Vec3& b) { return {b.z, b.y, -b.x}; }
inline Vec3 world_to_chart_b(const Vec3& w) { return {-w.z, w.y, w.x}; }

}  // namespace harmlab
