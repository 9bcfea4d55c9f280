#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace rfimg {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s, exact by SI definition
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Minimum parametric distance accepted by ray queries; suppresses
// self-intersection of secondary rays with their facet of origin.
inline constexpr double kRayEpsilon = 1e-9; // m

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

  friend constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
  friend constexpr bool operator==(const Vec3& a, const Vec3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
  }

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  constexpr double norm2() const { return x * x + y * y + z * z; }
  Vec3 normalized() const { return *this / norm(); }
};

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Azimuth/zenith pair in radians. Azimuth is measured from +x toward +y in
// [0, 2pi); zenith is measured from +z in [0, pi].
struct AnglePair {
  double azimuth = 0.0;
  double zenith = 0.0;
};

// Triangle facet with outward normal defined by vertex winding (right-hand
// rule over v0 -> v1 -> v2). material_id indexes into the owning scene's
// material table.
struct Triangle {
  Vec3 v0, v1, v2;
  std::uint32_t material_id = 0;

  Vec3 edge1() const { return v1 - v0; }
  Vec3 edge2() const { return v2 - v0; }
  Vec3 raw_normal() const { return cross(edge1(), edge2()); }
  Vec3 unit_normal() const { return raw_normal().normalized(); }
  double area() const { return 0.5 * raw_normal().norm(); }
  Vec3 centroid() const { return (v0 + v1 + v2) / 3.0; }
};

struct Ray {
  Vec3 origin;
  Vec3 direction; // unit norm
};

struct Hit {
  double distance = 0.0; // parametric distance along the ray, meters
  Vec3 point;
  double u = 0.0, v = 0.0; // barycentric coordinates of the hit
};

/// Unit direction for an azimuth/zenith pair:
/// (sin(zen)cos(az), sin(zen)sin(az), cos(zen)).
Vec3 direction_from_angles(const AnglePair& a);

/// Inverse of direction_from_angles. Azimuth is canonicalized to 0 at the
/// poles. Throws std::invalid_argument when d is not unit norm.
AnglePair angles_from_direction(const Vec3& d);

/// Moeller-Trumbore ray/triangle intersection. Accepts hits with parametric
/// distance in (t_min, t_max); barycentric containment is inclusive of edges.
std::optional<Hit> intersect(const Ray& ray, const Triangle& tri,
                             double t_min = kRayEpsilon,
                             double t_max = std::numeric_limits<double>::infinity());

/// Reflection of p across the triangle's supporting plane.
Vec3 mirror_point(const Vec3& p, const Triangle& tri);

/// Signed distance of p to the triangle's supporting plane (positive on the
/// side the winding normal points to).
double signed_plane_distance(const Vec3& p, const Triangle& tri);

} // namespace rfimg
