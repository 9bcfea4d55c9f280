#include <optional>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace rfimg::kernels {
namespace {

bool avx2_available() {
#if defined(RFIMG_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Isa detect_isa() { return avx2_available() ? Isa::Avx2 : Isa::Scalar; }

std::optional<Isa>& forced() {
  static std::optional<Isa> isa;
  return isa;
}

} // namespace

void TriangleSoup::push(const Triangle& t) {
  const Vec3 e1 = t.edge1();
  const Vec3 e2 = t.edge2();
  v0x.push_back(t.v0.x); v0y.push_back(t.v0.y); v0z.push_back(t.v0.z);
  e1x.push_back(e1.x);   e1y.push_back(e1.y);   e1z.push_back(e1.z);
  e2x.push_back(e2.x);   e2y.push_back(e2.y);   e2z.push_back(e2.z);
}

TriangleSoup TriangleSoup::from(std::span<const Triangle> tris) {
  TriangleSoup soup;
  for (const Triangle& t : tris) soup.push(t);
  return soup;
}

Isa active_isa() {
  if (forced().has_value()) return *forced();
  static const Isa detected = detect_isa();
  return detected;
}

const char* isa_name(Isa isa) {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available())
    throw std::runtime_error("avx2 kernels unavailable on this machine");
  forced() = isa;
}

void reset_isa() { forced().reset(); }

NearestHit nearest_hit(const TriangleSoup& s, const Vec3& o, const Vec3& d,
                       double t_min, double t_max) {
#if defined(RFIMG_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return detail::nearest_hit_avx2(s, o, d, t_min, t_max);
#endif
  return detail::nearest_hit_scalar(s, o, d, t_min, t_max);
}

bool any_hit(const TriangleSoup& s, const Vec3& o, const Vec3& d,
             double t_min, double t_max) {
#if defined(RFIMG_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return detail::any_hit_avx2(s, o, d, t_min, t_max);
#endif
  return detail::any_hit_scalar(s, o, d, t_min, t_max);
}

std::size_t count_hits(const TriangleSoup& s, const Vec3& o, const Vec3& d,
                       double t_min, double t_max) {
#if defined(RFIMG_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return detail::count_hits_avx2(s, o, d, t_min, t_max);
#endif
  return detail::count_hits_scalar(s, o, d, t_min, t_max);
}

double nn_distance_sum(const PointSoup& queries, const PointSoup& points) {
#if defined(RFIMG_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return detail::nn_distance_sum_avx2(queries, points);
#endif
  return detail::nn_distance_sum_scalar(queries, points);
}

double nn_min_dist2(const Vec3& q, const PointSoup& points) {
#if defined(RFIMG_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return detail::nn_min_dist2_avx2(q, points);
#endif
  return detail::nn_min_dist2_scalar(q, points);
}

} // namespace rfimg::kernels
