#include <immintrin.h>

#include <bit>
#include <cmath>
#include <limits>

#include "rfimg/geom_detail.hpp"
#include "kernels_impl.hpp"

// AVX2 variants. Four triangles (or points) per iteration, remainder through
// the shared scalar core. Operation ordering matches the scalar kernels
// exactly so results are bit-identical under -ffp-contract=off.

namespace rfimg::kernels::detail {
namespace {

struct MtLanes {
  __m256d t;
  int mask; // bit per lane, 1 = accepted hit
};

// dot(a, b) with the scalar ordering (a.x*b.x + a.y*b.y) + a.z*b.z.
inline __m256d dot3(__m256d ax, __m256d ay, __m256d az,
                    __m256d bx, __m256d by, __m256d bz) {
  return _mm256_add_pd(
      _mm256_add_pd(_mm256_mul_pd(ax, bx), _mm256_mul_pd(ay, by)),
      _mm256_mul_pd(az, bz));
}

// Four-lane Moeller-Trumbore over soup triangles [base, base+4).
inline MtLanes mt4(const TriangleSoup& s, std::size_t base, const Vec3& o,
                   const Vec3& d, double t_min, double t_max) {
  const __m256d ox = _mm256_set1_pd(o.x), oy = _mm256_set1_pd(o.y),
                oz = _mm256_set1_pd(o.z);
  const __m256d dx = _mm256_set1_pd(d.x), dy = _mm256_set1_pd(d.y),
                dz = _mm256_set1_pd(d.z);

  const __m256d v0x = _mm256_loadu_pd(&s.v0x[base]);
  const __m256d v0y = _mm256_loadu_pd(&s.v0y[base]);
  const __m256d v0z = _mm256_loadu_pd(&s.v0z[base]);
  const __m256d e1x = _mm256_loadu_pd(&s.e1x[base]);
  const __m256d e1y = _mm256_loadu_pd(&s.e1y[base]);
  const __m256d e1z = _mm256_loadu_pd(&s.e1z[base]);
  const __m256d e2x = _mm256_loadu_pd(&s.e2x[base]);
  const __m256d e2y = _mm256_loadu_pd(&s.e2y[base]);
  const __m256d e2z = _mm256_loadu_pd(&s.e2z[base]);

  // pvec = cross(dir, e2)
  const __m256d pvx = _mm256_sub_pd(_mm256_mul_pd(dy, e2z), _mm256_mul_pd(dz, e2y));
  const __m256d pvy = _mm256_sub_pd(_mm256_mul_pd(dz, e2x), _mm256_mul_pd(dx, e2z));
  const __m256d pvz = _mm256_sub_pd(_mm256_mul_pd(dx, e2y), _mm256_mul_pd(dy, e2x));

  const __m256d det = dot3(e1x, e1y, e1z, pvx, pvy, pvz);
  __m256d valid = _mm256_cmp_pd(det, _mm256_setzero_pd(), _CMP_NEQ_OQ);

  const __m256d inv_det = _mm256_div_pd(_mm256_set1_pd(1.0), det);

  // tvec = origin - v0
  const __m256d tvx = _mm256_sub_pd(ox, v0x);
  const __m256d tvy = _mm256_sub_pd(oy, v0y);
  const __m256d tvz = _mm256_sub_pd(oz, v0z);

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();

  const __m256d u = _mm256_mul_pd(dot3(tvx, tvy, tvz, pvx, pvy, pvz), inv_det);
  valid = _mm256_and_pd(valid, _mm256_cmp_pd(u, zero, _CMP_GE_OQ));
  valid = _mm256_and_pd(valid, _mm256_cmp_pd(u, one, _CMP_LE_OQ));

  // qvec = cross(tvec, e1)
  const __m256d qvx = _mm256_sub_pd(_mm256_mul_pd(tvy, e1z), _mm256_mul_pd(tvz, e1y));
  const __m256d qvy = _mm256_sub_pd(_mm256_mul_pd(tvz, e1x), _mm256_mul_pd(tvx, e1z));
  const __m256d qvz = _mm256_sub_pd(_mm256_mul_pd(tvx, e1y), _mm256_mul_pd(tvy, e1x));

  const __m256d v = _mm256_mul_pd(dot3(dx, dy, dz, qvx, qvy, qvz), inv_det);
  valid = _mm256_and_pd(valid, _mm256_cmp_pd(v, zero, _CMP_GE_OQ));
  valid = _mm256_and_pd(valid,
                        _mm256_cmp_pd(_mm256_add_pd(u, v), one, _CMP_LE_OQ));

  const __m256d t = _mm256_mul_pd(dot3(e2x, e2y, e2z, qvx, qvy, qvz), inv_det);
  valid = _mm256_and_pd(valid,
                        _mm256_cmp_pd(t, _mm256_set1_pd(t_min), _CMP_GT_OQ));
  valid = _mm256_and_pd(valid,
                        _mm256_cmp_pd(t, _mm256_set1_pd(t_max), _CMP_LT_OQ));

  return {t, _mm256_movemask_pd(valid)};
}

} // namespace

NearestHit nearest_hit_avx2(const TriangleSoup& s, const Vec3& o,
                            const Vec3& d, double t_min, double t_max) {
  NearestHit best;
  double closest = t_max;
  const std::size_t n = s.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const MtLanes lanes = mt4(s, i, o, d, t_min, closest);
    if (lanes.mask == 0) continue;
    double ts[4];
    _mm256_storeu_pd(ts, lanes.t);
    for (int lane = 0; lane < 4; ++lane) {
      if ((lanes.mask >> lane) & 1) {
        if (ts[lane] < closest) {
          closest = ts[lane];
          best.t = ts[lane];
          best.index = static_cast<std::int64_t>(i + lane);
        }
      }
    }
  }
  for (; i < n; ++i) {
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

bool any_hit_avx2(const TriangleSoup& s, const Vec3& o, const Vec3& d,
                  double t_min, double t_max) {
  const std::size_t n = s.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    if (mt4(s, i, o, d, t_min, t_max).mask != 0) return true;
  }
  for (; i < n; ++i) {
    const Vec3 v0{s.v0x[i], s.v0y[i], s.v0z[i]};
    const Vec3 e1{s.e1x[i], s.e1y[i], s.e1z[i]};
    const Vec3 e2{s.e2x[i], s.e2y[i], s.e2z[i]};
    if (geom_detail::moeller_trumbore(o, d, v0, e1, e2, t_min, t_max).hit)
      return true;
  }
  return false;
}

std::size_t count_hits_avx2(const TriangleSoup& s, const Vec3& o,
                            const Vec3& d, double t_min, double t_max) {
  std::size_t count = 0;
  const std::size_t n = s.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    count += static_cast<std::size_t>(
        std::popcount(static_cast<unsigned>(mt4(s, i, o, d, t_min, t_max).mask)));
  }
  for (; i < n; ++i) {
    const Vec3 v0{s.v0x[i], s.v0y[i], s.v0z[i]};
    const Vec3 e1{s.e1x[i], s.e1y[i], s.e1z[i]};
    const Vec3 e2{s.e2x[i], s.e2y[i], s.e2z[i]};
    if (geom_detail::moeller_trumbore(o, d, v0, e1, e2, t_min, t_max).hit)
      ++count;
  }
  return count;
}

double nn_min_dist2_avx2(const Vec3& q, const PointSoup& p) {
  const std::size_t n = p.size();
  const __m256d qx = _mm256_set1_pd(q.x);
  const __m256d qy = _mm256_set1_pd(q.y);
  const __m256d qz = _mm256_set1_pd(q.z);
  __m256d best4 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(qx, _mm256_loadu_pd(&p.x[i]));
    const __m256d dy = _mm256_sub_pd(qy, _mm256_loadu_pd(&p.y[i]));
    const __m256d dz = _mm256_sub_pd(qz, _mm256_loadu_pd(&p.z[i]));
    const __m256d d2 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
        _mm256_mul_pd(dz, dz));
    best4 = _mm256_min_pd(best4, d2);
  }
  double lanes[4];
  _mm256_storeu_pd(lanes, best4);
  double best = lanes[0];
  if (lanes[1] < best) best = lanes[1];
  if (lanes[2] < best) best = lanes[2];
  if (lanes[3] < best) best = lanes[3];
  for (; i < n; ++i) {
    const double dx = q.x - p.x[i];
    const double dy = q.y - p.y[i];
    const double dz = q.z - p.z[i];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best) best = d2;
  }
  return best;
}

double nn_distance_sum_avx2(const PointSoup& queries, const PointSoup& points) {
  double sum = 0.0;
  for (std::size_t i = 0; i < queries.size(); ++i)
    sum += std::sqrt(nn_min_dist2_avx2(queries.at(i), points));
  return sum;
}

} // namespace rfimg::kernels::detail
