#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfimg/geom.hpp"

namespace rfimg::pathgen {

// Surface material. Dielectrics use a frequency-dependent conductivity
// sigma(f) = sigma_a * f_ghz^sigma_b in S/m; perfect conductors reflect with
// |Gamma| = 1. scattering is the fraction of reflected energy diverted to
// diffuse samples.
struct Material {
  enum class Kind { PerfectConductor, Dielectric };

  std::string name;
  Kind kind = Kind::PerfectConductor;
  double eps_r = 1.0;
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  double scattering = 0.0;

  double conductivity(double f_ghz) const;
};

struct Scene {
  std::vector<Triangle> triangles;
  std::vector<Material> materials;

  const Material& material_of(const Triangle& t) const {
    return materials[t.material_id];
  }

  double total_area() const;

  // True when every triangle edge is shared by exactly two triangles, i.e.
  // the mesh bounds a volume. Vertices must match exactly across facets.
  bool watertight() const;

  // Odd ray-crossing parity along a fixed probe direction. Only meaningful
  // for watertight scenes.
  bool contains(const Vec3& p) const;
};

} // namespace rfimg::pathgen
