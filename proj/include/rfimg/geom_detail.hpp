#pragma once

#include "rfimg/geom.hpp"

namespace rfimg::geom_detail {

// Single-triangle Moeller-Trumbore core shared by geom::intersect, the scalar
// kernel loop and the AVX2 tail path. All variants must keep this exact
// operation ordering so results stay bit-identical across code paths
// (the project builds with -ffp-contract=off).
struct MtResult {
  bool hit = false;
  double t = 0.0, u = 0.0, v = 0.0;
};

inline MtResult moeller_trumbore(const Vec3& origin, const Vec3& dir,
                                 const Vec3& v0, const Vec3& e1, const Vec3& e2,
                                 double t_min, double t_max) {
  MtResult r;
  const Vec3 pvec = cross(dir, e2);
  const double det = dot(e1, pvec);
  if (det == 0.0) return r; // parallel
  const double inv_det = 1.0 / det;
  const Vec3 tvec = origin - v0;
  const double u = dot(tvec, pvec) * inv_det;
  if (!(u >= 0.0 && u <= 1.0)) return r;
  const Vec3 qvec = cross(tvec, e1);
  const double v = dot(dir, qvec) * inv_det;
  if (!(v >= 0.0 && u + v <= 1.0)) return r;
  const double t = dot(e2, qvec) * inv_det;
  if (!(t > t_min && t < t_max)) return r;
  r.hit = true;
  r.t = t;
  r.u = u;
  r.v = v;
  return r;
}

} // namespace rfimg::geom_detail
