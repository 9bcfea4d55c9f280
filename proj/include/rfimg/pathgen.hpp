#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rfimg/geom.hpp"
#include "rfimg/scene.hpp"

namespace rfimg::pathgen {

// One multipath component: the six-tuple {AoD, AoA, delay, gain} plus
// provenance. interaction is the last geometric interaction point of the
// path (bounce point for specular, scatter center for diffuse); it is kept
// as ground truth for evaluating the imaging error and has no meaning for
// the line-of-sight path.
struct PathComponent {
  AnglePair aod;
  AnglePair aoa;
  double toa_s = 0.0;
  std::complex<double> gain;
  int bounce_count = 0;
  bool is_los = false;
  Vec3 interaction;
};

struct Drop {
  int drop_id = 0;
  Vec3 tx;
  Vec3 rx;
  std::vector<PathComponent> paths; // sorted by increasing toa_s
};

struct TraceConfig {
  double carrier_hz = 6.75e9;
  double tx_power_dbm = 0.0;
  double cutoff_dbm = -160.0;
  int max_bounces = 2;
  int diffuse_samples = 16; // hemisphere samples per scatter event; 0 = off
  std::uint64_t seed = 0;
};

// Received power of a path in dBm: |g|^2 referenced to 1 mW.
double received_power_dbm(const PathComponent& p);

// Free-space path loss 20*log10(4*pi*d*f/c) in dB.
double fspl_db(double distance_m, double f_hz);

// Polarization-averaged Fresnel reflection magnitude
// sqrt((|G_TE|^2 + |G_TM|^2)/2) for a ray hitting the material at
// `incidence_rad` from the surface normal. Perfect conductors return 1.
double fresnel_magnitude(const Material& m, double incidence_rad, double f_hz);

struct Reflection {
  Material material;
  double incidence_rad = 0.0;
};

// Complex amplitude of a specular path: TX power minus free-space loss over
// the full length, times the Fresnel magnitude of each bounce, with phase
// -2*pi*f_c*tau. Throws std::domain_error for non-positive length.
std::complex<double> specular_gain(double path_length_m,
                                   const std::vector<Reflection>& reflections,
                                   double f_c_hz, double tx_power_dbm);

struct SurfaceHit {
  Vec3 point;
  Vec3 normal; // unit
  Material material;
};

// Diffuse stubs for one scattering event: n directions drawn uniformly over
// the hemisphere on the incident side, each carrying energy
// s*incident_power/n with an i.i.d. uniform phase. The specular remainder
// (1-s)*incident_power stays with the caller. Stubs have the sampled
// outgoing direction in both angle slots, zero delay, and the hit point as
// interaction; the caller completes the receiver leg. Returns an empty list
// when the material does not scatter.
std::vector<PathComponent> diffuse_samples(const SurfaceHit& hit,
                                           const Ray& incident,
                                           double incident_power_mw, int n,
                                           std::uint64_t rng_seed);

// Trace every propagation path between tx and rx: line of sight, specular
// reflections up to cfg.max_bounces via the image method, and diffuse
// scatter paths when enabled. Paths are sorted by delay and pruned at
// cfg.cutoff_dbm. Throws std::invalid_argument for tx == rx and
// std::runtime_error when either endpoint is inside a watertight mesh.
Drop trace_drop(const Scene& scene, const Vec3& tx, const Vec3& rx,
                const TraceConfig& cfg, int drop_id = 0);

// Paths at or above the power cutoff, order preserved.
Drop apply_cutoff(const Drop& drop, double cutoff_dbm);

} // namespace rfimg::pathgen
