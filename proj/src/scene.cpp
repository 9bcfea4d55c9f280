#include "rfimg/scene.hpp"

#include <array>
#include <cmath>
#include <map>

#include "rfimg/kernels.hpp"

namespace rfimg::pathgen {

double Material::conductivity(double f_ghz) const {
  if (kind == Kind::PerfectConductor) return 0.0;
  return sigma_a * std::pow(f_ghz, sigma_b);
}

double Scene::total_area() const {
  double area = 0.0;
  for (const Triangle& t : triangles) area += t.area();
  return area;
}

namespace {

using VertexKey = std::array<double, 3>;
using EdgeKey = std::pair<VertexKey, VertexKey>;

EdgeKey make_edge(const Vec3& a, const Vec3& b) {
  VertexKey ka{a.x, a.y, a.z};
  VertexKey kb{b.x, b.y, b.z};
  return ka < kb ? EdgeKey{ka, kb} : EdgeKey{kb, ka};
}

} // namespace

bool Scene::watertight() const {
  if (triangles.empty()) return false;
  std::map<EdgeKey, int> shared;
  for (const Triangle& t : triangles) {
    ++shared[make_edge(t.v0, t.v1)];
    ++shared[make_edge(t.v1, t.v2)];
    ++shared[make_edge(t.v2, t.v0)];
  }
  for (const auto& [edge, count] : shared)
    if (count != 2) return false;
  return true;
}

bool Scene::contains(const Vec3& p) const {
  // Fixed probe direction chosen away from the axes so that axis-aligned
  // meshes are never probed along an edge or face plane.
  static const Vec3 probe = Vec3{0.5377396563, 0.6932146278, 0.4798123451}.normalized();
  const auto soup = kernels::TriangleSoup::from(triangles);
  const std::size_t crossings =
      kernels::count_hits(soup, p, probe, kRayEpsilon,
                          std::numeric_limits<double>::infinity());
  return (crossings % 2) == 1;
}

} // namespace rfimg::pathgen
