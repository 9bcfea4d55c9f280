#include "rfimg/geom.hpp"

#include <stdexcept>

#include "rfimg/geom_detail.hpp"

namespace rfimg {

Vec3 direction_from_angles(const AnglePair& a) {
  const double sz = std::sin(a.zenith);
  return {sz * std::cos(a.azimuth), sz * std::sin(a.azimuth), std::cos(a.zenith)};
}

AnglePair angles_from_direction(const Vec3& d) {
  const double n = d.norm();
  if (std::abs(n - 1.0) > 1e-9) {
    throw std::invalid_argument("angles_from_direction: input is not unit norm");
  }
  AnglePair a;
  const double z = d.z < -1.0 ? -1.0 : (d.z > 1.0 ? 1.0 : d.z);
  a.zenith = std::acos(z);
  if (d.x == 0.0 && d.y == 0.0) {
    a.azimuth = 0.0; // pole: azimuth is arbitrary, canonicalized to 0
  } else {
    a.azimuth = std::atan2(d.y, d.x);
    if (a.azimuth < 0.0) a.azimuth += kTwoPi;
    if (a.azimuth >= kTwoPi) a.azimuth = 0.0;
  }
  return a;
}

std::optional<Hit> intersect(const Ray& ray, const Triangle& tri,
                             double t_min, double t_max) {
  const auto r = geom_detail::moeller_trumbore(ray.origin, ray.direction, tri.v0,
                                          tri.edge1(), tri.edge2(), t_min, t_max);
  if (!r.hit) return std::nullopt;
  return Hit{r.t, ray.origin + r.t * ray.direction, r.u, r.v};
}

double signed_plane_distance(const Vec3& p, const Triangle& tri) {
  return dot(p - tri.v0, tri.unit_normal());
}

Vec3 mirror_point(const Vec3& p, const Triangle& tri) {
  const Vec3 n = tri.unit_normal();
  const double d = dot(p - tri.v0, n);
  return p - 2.0 * d * n;
}

} // namespace rfimg
