#include "rfimg/pathgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rfimg/kernels.hpp"

namespace rfimg::pathgen {
namespace {

constexpr double kEps0 = 8.8541878128e-12;      // F/m
constexpr double kMinSegment = 1e-9;            // m, reject shorter legs
constexpr double kPlaneEps = 1e-12;             // m, same-side margin
constexpr double kCosReceptionCone = 0.9396926207859084; // cos(20 deg)

// Portable uniform draw in [0, 1): 53 high bits of the engine output, so
// results do not depend on the standard library's distribution internals.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double incidence_from_normal(const Vec3& dir, const Vec3& unit_normal) {
  const double c = std::clamp(std::abs(dot(dir, unit_normal)), 0.0, 1.0);
  return std::acos(c);
}

bool strictly_same_side(double s0, double s1) {
  return (s0 > kPlaneEps && s1 > kPlaneEps) ||
         (s0 < -kPlaneEps && s1 < -kPlaneEps);
}

bool segment_occluded(const kernels::TriangleSoup& soup, const Vec3& from,
                      const Vec3& to) {
  const Vec3 d = to - from;
  const double len = d.norm();
  if (len <= 2.0 * kRayEpsilon) return false;
  return kernels::any_hit(soup, from, d / len, kRayEpsilon, len - kRayEpsilon);
}

} // namespace

double received_power_dbm(const PathComponent& p) {
  return 20.0 * std::log10(std::abs(p.gain));
}

double fspl_db(double distance_m, double f_hz) {
  return 20.0 * std::log10(4.0 * kPi * distance_m * f_hz / kSpeedOfLight);
}

double fresnel_magnitude(const Material& m, double incidence_rad, double f_hz) {
  if (m.kind == Material::Kind::PerfectConductor) return 1.0;
  const double f_ghz = f_hz / 1e9;
  const std::complex<double> eta(m.eps_r,
                                 -m.conductivity(f_ghz) / (kTwoPi * f_hz * kEps0));
  const double cos_i = std::cos(incidence_rad);
  const double sin2_i = 1.0 - cos_i * cos_i;
  const std::complex<double> root = std::sqrt(eta - sin2_i);
  const std::complex<double> g_te = (cos_i - root) / (cos_i + root);
  const std::complex<double> g_tm = (eta * cos_i - root) / (eta * cos_i + root);
  return std::sqrt(0.5 * (std::norm(g_te) + std::norm(g_tm)));
}

std::complex<double> specular_gain(double path_length_m,
                                   const std::vector<Reflection>& reflections,
                                   double f_c_hz, double tx_power_dbm) {
  if (!(path_length_m > 0.0))
    throw std::domain_error("specular_gain: path length must be positive");
  double rx_dbm = tx_power_dbm - fspl_db(path_length_m, f_c_hz);
  for (const Reflection& r : reflections)
    rx_dbm += 20.0 * std::log10(fresnel_magnitude(r.material, r.incidence_rad, f_c_hz));
  const double amplitude = std::pow(10.0, rx_dbm / 20.0);
  const double tau = path_length_m / kSpeedOfLight;
  return std::polar(amplitude, -kTwoPi * f_c_hz * tau);
}

std::vector<PathComponent> diffuse_samples(const SurfaceHit& hit,
                                           const Ray& incident,
                                           double incident_power_mw, int n,
                                           std::uint64_t rng_seed) {
  const double s = hit.material.scattering;
  if (s <= 0.0) return {};
  if (n < 1) throw std::domain_error("diffuse_samples: n must be >= 1");
  if (!(incident_power_mw > 0.0))
    throw std::domain_error("diffuse_samples: incident power must be positive");

  // Hemisphere on the side the incident ray came from.
  const Vec3 n_eff = dot(incident.direction, hit.normal) < 0.0
                         ? hit.normal
                         : -hit.normal;
  const Vec3 helper = std::abs(n_eff.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 t1 = cross(n_eff, helper).normalized();
  const Vec3 t2 = cross(n_eff, t1);

  std::mt19937_64 rng(rng_seed);
  const double amplitude = std::sqrt(s * incident_power_mw / n);

  std::vector<PathComponent> stubs;
  stubs.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double cos_zen = uniform01(rng);
    const double azim = kTwoPi * uniform01(rng);
    const double phase = kTwoPi * uniform01(rng);
    const double sin_zen = std::sqrt(1.0 - cos_zen * cos_zen);
    const Vec3 dir = t1 * (sin_zen * std::cos(azim)) +
                     t2 * (sin_zen * std::sin(azim)) + n_eff * cos_zen;
    PathComponent stub;
    stub.aod = angles_from_direction(dir.normalized());
    stub.aoa = stub.aod;
    stub.toa_s = 0.0;
    stub.gain = std::polar(amplitude, phase);
    stub.bounce_count = 1;
    stub.is_los = false;
    stub.interaction = hit.point;
    stubs.push_back(stub);
  }
  return stubs;
}

Drop apply_cutoff(const Drop& drop, double cutoff_dbm) {
  Drop out;
  out.drop_id = drop.drop_id;
  out.tx = drop.tx;
  out.rx = drop.rx;
  for (const PathComponent& p : drop.paths)
    if (received_power_dbm(p) >= cutoff_dbm) out.paths.push_back(p);
  return out;
}

namespace {

void trace_single_bounce(const Scene& scene, const kernels::TriangleSoup& soup,
                         const Vec3& tx, const Vec3& rx,
                         const TraceConfig& cfg, std::vector<PathComponent>& out) {
  for (const Triangle& tri : scene.triangles) {
    const double st = signed_plane_distance(tx, tri);
    const double sr = signed_plane_distance(rx, tri);
    if (!strictly_same_side(st, sr)) continue;

    const Vec3 tm = mirror_point(tx, tri);
    const Vec3 seg = rx - tm;
    const double len = seg.norm();
    if (len <= kMinSegment) continue;
    const auto hit = intersect(Ray{tm, seg / len}, tri, kPlaneEps, len);
    if (!hit) continue;

    const Vec3 p = hit->point;
    const double d1 = distance(tx, p);
    const double d2 = distance(p, rx);
    if (d1 <= kMinSegment || d2 <= kMinSegment) continue;
    if (segment_occluded(soup, tx, p) || segment_occluded(soup, p, rx)) continue;

    const Vec3 dir_out = (p - tx) / d1;
    const Vec3 dir_in = (rx - p) / d2;
    const Vec3 n = tri.unit_normal();
    const double total = d1 + d2;

    PathComponent path;
    path.aod = angles_from_direction(dir_out);
    path.aoa = angles_from_direction(dir_in);
    path.toa_s = total / kSpeedOfLight;
    path.gain = specular_gain(
        total, {{scene.material_of(tri), incidence_from_normal(dir_out, n)}},
        cfg.carrier_hz, cfg.tx_power_dbm);
    path.bounce_count = 1;
    path.is_los = false;
    path.interaction = p;
    out.push_back(path);
  }
}

bool same_supporting_plane(const Triangle& a, const Triangle& b) {
  const double align = std::abs(dot(a.unit_normal(), b.unit_normal()));
  if (align < 1.0 - 1e-12) return false;
  return std::abs(signed_plane_distance(b.v0, a)) < kPlaneEps;
}

void trace_double_bounce(const Scene& scene, const kernels::TriangleSoup& soup,
                         const Vec3& tx, const Vec3& rx,
                         const TraceConfig& cfg, std::vector<PathComponent>& out) {
  const std::size_t f = scene.triangles.size();
  for (std::size_t i = 0; i < f; ++i) {
    const Triangle& tri_i = scene.triangles[i];
    const Vec3 t1 = mirror_point(tx, tri_i);
    for (std::size_t j = 0; j < f; ++j) {
      if (i == j) continue;
      const Triangle& tri_j = scene.triangles[j];
      if (same_supporting_plane(tri_i, tri_j)) continue;

      const Vec3 t2 = mirror_point(t1, tri_j);
      const Vec3 seg_j = rx - t2;
      const double len_j = seg_j.norm();
      if (len_j <= kMinSegment) continue;
      const auto hit_j = intersect(Ray{t2, seg_j / len_j}, tri_j, kPlaneEps, len_j);
      if (!hit_j) continue;
      const Vec3 q = hit_j->point;

      const Vec3 seg_i = q - t1;
      const double len_i = seg_i.norm();
      if (len_i <= kMinSegment) continue;
      const auto hit_i = intersect(Ray{t1, seg_i / len_i}, tri_i, kPlaneEps, len_i);
      if (!hit_i) continue;
      const Vec3 p = hit_i->point;

      if (!strictly_same_side(signed_plane_distance(tx, tri_i),
                              signed_plane_distance(q, tri_i)))
        continue;
      if (!strictly_same_side(signed_plane_distance(p, tri_j),
                              signed_plane_distance(rx, tri_j)))
        continue;

      const double d0 = distance(tx, p);
      const double d1 = distance(p, q);
      const double d2 = distance(q, rx);
      if (d0 <= kMinSegment || d1 <= kMinSegment || d2 <= kMinSegment) continue;
      if (segment_occluded(soup, tx, p) || segment_occluded(soup, p, q) ||
          segment_occluded(soup, q, rx))
        continue;

      const Vec3 dir0 = (p - tx) / d0;
      const Vec3 dir1 = (q - p) / d1;
      const Vec3 dir2 = (rx - q) / d2;
      const double total = d0 + d1 + d2;

      PathComponent path;
      path.aod = angles_from_direction(dir0);
      path.aoa = angles_from_direction(dir2);
      path.toa_s = total / kSpeedOfLight;
      path.gain = specular_gain(
          total,
          {{scene.material_of(tri_i), incidence_from_normal(dir0, tri_i.unit_normal())},
           {scene.material_of(tri_j), incidence_from_normal(dir1, tri_j.unit_normal())}},
          cfg.carrier_hz, cfg.tx_power_dbm);
      path.bounce_count = 2;
      path.is_los = false;
      path.interaction = q;
      out.push_back(path);
    }
  }
}

void trace_diffuse(const Scene& scene, const kernels::TriangleSoup& soup,
                   const Vec3& tx, const Vec3& rx, const TraceConfig& cfg,
                   int drop_id, std::vector<PathComponent>& out) {
  std::mt19937_64 drop_rng(
      mix_seed(cfg.seed, static_cast<std::uint64_t>(drop_id)));

  for (std::size_t i = 0; i < scene.triangles.size(); ++i) {
    const Triangle& tri = scene.triangles[i];
    const Material& mat = scene.material_of(tri);
    if (mat.scattering <= 0.0) continue;

    // Draw the scatter center and the sample sub-seed unconditionally so the
    // generator state never depends on visibility.
    const double u1 = uniform01(drop_rng);
    const double u2 = uniform01(drop_rng);
    const std::uint64_t sample_seed = drop_rng();
    const double su = std::sqrt(u1);
    const Vec3 center = tri.v0 * (1.0 - su) + tri.v1 * (su * (1.0 - u2)) +
                        tri.v2 * (su * u2);

    const double d1 = distance(tx, center);
    const double d2 = distance(center, rx);
    if (d1 <= kMinSegment || d2 <= kMinSegment) continue;
    if (segment_occluded(soup, tx, center)) continue;

    const Vec3 dir_in = (center - tx) / d1;
    const Vec3 n = tri.unit_normal();
    const double gamma_mag =
        fresnel_magnitude(mat, incidence_from_normal(dir_in, n), cfg.carrier_hz);
    const double reflected_mw = dbm_to_mw(cfg.tx_power_dbm -
                                          fspl_db(d1, cfg.carrier_hz)) *
                                gamma_mag * gamma_mag;

    const auto stubs = diffuse_samples({center, n, mat}, Ray{tx, dir_in},
                                       reflected_mw, cfg.diffuse_samples,
                                       sample_seed);
    if (stubs.empty()) continue;

    // The receiver collects samples within a fixed reception cone about the
    // scatter-to-receiver direction, provided that leg is clear and the
    // receiver lies on the illuminated side.
    const Vec3 dir_rx = (rx - center) / d2;
    const Vec3 n_eff = dot(dir_in, n) < 0.0 ? n : -n;
    if (dot(dir_rx, n_eff) <= 0.0) continue;
    if (segment_occluded(soup, center, rx)) continue;

    std::complex<double> collected = 0.0;
    for (const PathComponent& stub : stubs) {
      const Vec3 sample_dir = direction_from_angles(stub.aod);
      if (dot(sample_dir, dir_rx) >= kCosReceptionCone) collected += stub.gain;
    }
    if (std::abs(collected) <= 0.0) continue;

    const double leg2_amp =
        kSpeedOfLight / (4.0 * kPi * d2 * cfg.carrier_hz);

    PathComponent path;
    path.aod = angles_from_direction(dir_in);
    path.aoa = angles_from_direction(dir_rx);
    path.toa_s = (d1 + d2) / kSpeedOfLight;
    path.gain = collected * leg2_amp;
    path.bounce_count = 1;
    path.is_los = false;
    path.interaction = center;
    out.push_back(path);
  }
}

} // namespace

Drop trace_drop(const Scene& scene, const Vec3& tx, const Vec3& rx,
                const TraceConfig& cfg, int drop_id) {
  if (tx == rx)
    throw std::invalid_argument("trace_drop: tx and rx coincide");
  if (scene.watertight()) {
    if (scene.contains(tx))
      throw std::runtime_error("trace_drop: tx lies inside the mesh");
    if (scene.contains(rx))
      throw std::runtime_error("trace_drop: rx lies inside the mesh");
  }

  const auto soup = kernels::TriangleSoup::from(scene.triangles);

  Drop drop;
  drop.drop_id = drop_id;
  drop.tx = tx;
  drop.rx = rx;

  const Vec3 los = rx - tx;
  const double los_len = los.norm();
  if (!kernels::any_hit(soup, tx, los / los_len, kRayEpsilon,
                        los_len - kRayEpsilon)) {
    PathComponent path;
    path.aod = angles_from_direction(los / los_len);
    path.aoa = path.aod;
    path.toa_s = los_len / kSpeedOfLight;
    path.gain = specular_gain(los_len, {}, cfg.carrier_hz, cfg.tx_power_dbm);
    path.bounce_count = 0;
    path.is_los = true;
    drop.paths.push_back(path);
  }

  if (cfg.max_bounces >= 1)
    trace_single_bounce(scene, soup, tx, rx, cfg, drop.paths);
  if (cfg.max_bounces >= 2)
    trace_double_bounce(scene, soup, tx, rx, cfg, drop.paths);
  if (cfg.diffuse_samples > 0)
    trace_diffuse(scene, soup, tx, rx, cfg, drop_id, drop.paths);

  std::stable_sort(drop.paths.begin(), drop.paths.end(),
                   [](const PathComponent& a, const PathComponent& b) {
                     return a.toa_s < b.toa_s;
                   });
  return apply_cutoff(drop, cfg.cutoff_dbm);
}

} // namespace rfimg::pathgen
