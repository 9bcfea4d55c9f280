#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rfimg/geom.hpp"

// Batched inner-loop kernels for the two data-parallel hot spots of the
// pipeline: ray/triangle-soup queries (tracing, occlusion) and nearest-
// neighbor distance sums (Chamfer distance). Each kernel has a scalar
// reference implementation and an AVX2 variant selected at runtime; both
// produce bit-identical results (the project builds with -ffp-contract=off
// and the vector code mirrors the scalar operation ordering).

namespace rfimg::kernels {

// Structure-of-arrays triangle soup: v0 plus the two edge vectors.
struct TriangleSoup {
  std::vector<double> v0x, v0y, v0z;
  std::vector<double> e1x, e1y, e1z;
  std::vector<double> e2x, e2y, e2z;

  std::size_t size() const { return v0x.size(); }
  bool empty() const { return v0x.empty(); }
  void push(const Triangle& t);
  static TriangleSoup from(std::span<const Triangle> tris);
};

// SoA point set for nearest-neighbor scans.
struct PointSoup {
  std::vector<double> x, y, z;

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
  void push(const Vec3& p) { x.push_back(p.x); y.push_back(p.y); z.push_back(p.z); }
  Vec3 at(std::size_t i) const { return {x[i], y[i], z[i]}; }
};

struct NearestHit {
  double t = 0.0;
  std::int64_t index = -1; // -1 when nothing was hit

  explicit operator bool() const { return index >= 0; }
};

enum class Isa { Scalar, Avx2 };

// ISA selected for this process (AVX2 when compiled in and supported by the
// CPU, scalar otherwise).
Isa active_isa();
const char* isa_name(Isa isa);
// Test hook: force a specific ISA. Throws std::runtime_error when the
// requested ISA is unavailable. force_isa(std::nullopt) via reset_isa().
void force_isa(Isa isa);
void reset_isa();

// Nearest accepted hit over the soup with parametric distance in
// (t_min, t_max). Ties on t resolve to the lowest triangle index.
NearestHit nearest_hit(const TriangleSoup& soup, const Vec3& origin,
                       const Vec3& dir, double t_min, double t_max);

// True when any triangle is hit with distance in (t_min, t_max).
bool any_hit(const TriangleSoup& soup, const Vec3& origin, const Vec3& dir,
             double t_min, double t_max);

// Number of triangles hit with distance in (t_min, t_max); used by the
// point-in-mesh parity test.
std::size_t count_hits(const TriangleSoup& soup, const Vec3& origin,
                       const Vec3& dir, double t_min, double t_max);

// Sum over queries of the Euclidean distance to the nearest point in
// `points`. Brute-force scan; both clouds must be non-empty.
double nn_distance_sum(const PointSoup& queries, const PointSoup& points);

// Minimum squared distance from q to any point of the soup.
double nn_min_dist2(const Vec3& q, const PointSoup& points);

} // namespace rfimg::kernels
