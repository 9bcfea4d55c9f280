#pragma once

#include "rfimg/kernels.hpp"

// Per-ISA entry points. The dispatcher in kernels.cpp picks one set at
// startup; tests exercise both through force_isa().

namespace rfimg::kernels::detail {

NearestHit nearest_hit_scalar(const TriangleSoup&, const Vec3&, const Vec3&,
                              double t_min, double t_max);
bool any_hit_scalar(const TriangleSoup&, const Vec3&, const Vec3&,
                    double t_min, double t_max);
std::size_t count_hits_scalar(const TriangleSoup&, const Vec3&, const Vec3&,
                              double t_min, double t_max);
double nn_distance_sum_scalar(const PointSoup& queries, const PointSoup& points);
double nn_min_dist2_scalar(const Vec3& q, const PointSoup& points);

#if defined(RFIMG_HAVE_AVX2)
NearestHit nearest_hit_avx2(const TriangleSoup&, const Vec3&, const Vec3&,
                            double t_min, double t_max);
bool any_hit_avx2(const TriangleSoup&, const Vec3&, const Vec3&,
                  double t_min, double t_max);
std::size_t count_hits_avx2(const TriangleSoup&, const Vec3&, const Vec3&,
                            double t_min, double t_max);
double nn_distance_sum_avx2(const PointSoup& queries, const PointSoup& points);
double nn_min_dist2_avx2(const Vec3& q, const PointSoup& points);
#endif

} // namespace rfimg::kernels::detail
