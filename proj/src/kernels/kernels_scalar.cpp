#include <cmath>
#include <limits>

#include "rfimg/geom_detail.hpp"
#include "kernels_impl.hpp"

namespace rfimg::kernels::detail {

NearestHit nearest_hit_scalar(const TriangleSoup& s, const Vec3& o,
                              const Vec3& d, double t_min, double t_max) {
  NearestHit best;
  double closest = t_max;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 v0{s.v0x[i], s.v0y[i], s.v0z[i]};
    const Vec3 e1{s.e1x[i], s.e1y[i], s.e1z[i]};
    const Vec3 e2{s.e2x[i], s.e2y[i], s.e2z[i]};
    const geom_detail::MtResult r =
        geom_detail::moeller_trumbore(o, d, v0, e1, e2, t_min, closest);
    if (r.hit) {
      closest = r.t;
      best.t = r.t;
      best.index = static_cast<std::int64_t>(i);
    }
  }
  return best;
}

bool any_hit_scalar(const TriangleSoup& s, const Vec3& o, const Vec3& d,
                    double t_min, double t_max) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 v0{s.v0x[i], s.v0y[i], s.v0z[i]};
    const Vec3 e1{s.e1x[i], s.e1y[i], s.e1z[i]};
    const Vec3 e2{s.e2x[i], s.e2y[i], s.e2z[i]};
    if (geom_detail::moeller_trumbore(o, d, v0, e1, e2, t_min, t_max).hit)
      return true;
  }
  return false;
}

std::size_t count_hits_scalar(const TriangleSoup& s, const Vec3& o,
                              const Vec3& d, double t_min, double t_max) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 v0{s.v0x[i], s.v0y[i], s.v0z[i]};
    const Vec3 e1{s.e1x[i], s.e1y[i], s.e1z[i]};
    const Vec3 e2{s.e2x[i], s.e2y[i], s.e2z[i]};
    if (geom_detail::moeller_trumbore(o, d, v0, e1, e2, t_min, t_max).hit)
      ++n;
  }
  return n;
}

double nn_min_dist2_scalar(const Vec3& q, const PointSoup& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dx = q.x - p.x[i];
    const double dy = q.y - p.y[i];
    const double dz = q.z - p.z[i];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best) best = d2;
  }
  return best;
}

double nn_distance_sum_scalar(const PointSoup& queries, const PointSoup& points) {
  double sum = 0.0;
  for (std::size_t i = 0; i < queries.size(); ++i)
    sum += std::sqrt(nn_min_dist2_scalar(queries.at(i), points));
  return sum;
}

} // namespace rfimg::kernels::detail
