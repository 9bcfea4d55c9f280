#include "rfimg/erp.hpp"

#include <cmath>

namespace rfimg::erp {
namespace {

constexpr double kParallelEps = 1e-12; // threshold on |d_t - d_r|^2

} // namespace

double path_length(double tau_s) {
  if (!(tau_s > 0.0))
    throw std::domain_error("path_length: delay must be positive");
  return kSpeedOfLight * tau_s;
}

double segment_mismatch(const Vec3& tx, const Vec3& rx, const Vec3& d_t,
                        const Vec3& d_r, double alpha, double beta) {
  const Vec3 a = tx + d_t * alpha;
  const Vec3 b = rx - d_r * beta;
  return (a - b).norm2();
}

double solve_alpha(const Vec3& tx, const Vec3& rx, const Vec3& d_t,
                   const Vec3& d_r, double l) {
  const Vec3 diff = d_t - d_r;
  const double denom = diff.norm2();
  if (denom <= kParallelEps) throw DegenerateDirections();
  return -dot(tx - rx + d_r * l, diff) / denom;
}

SegmentPair solve_segments(const Vec3& tx, const Vec3& rx, const Vec3& d_t,
                           const Vec3& d_r, double l) {
  double alpha = solve_alpha(tx, rx, d_t, d_r, l);
  if (alpha < 0.0 || alpha > l) {
    const double f_low = segment_mismatch(tx, rx, d_t, d_r, 0.0, l);
    const double f_high = segment_mismatch(tx, rx, d_t, d_r, l, 0.0);
    alpha = f_low <= f_high ? 0.0 : l;
  }
  SegmentPair seg;
  seg.alpha = alpha;
  seg.beta = l - alpha;
  seg.a_end = tx + d_t * seg.alpha;
  seg.b_end = rx - d_r * seg.beta;
  return seg;
}

ErpSolution solve_erp(const Vec3& tx, const Vec3& rx,
                      const pathgen::PathComponent& path) {
  if (path.is_los)
    throw std::invalid_argument("solve_erp: line-of-sight path has no reflection point");
  const double l = path_length(path.toa_s);
  const Vec3 d_t = direction_from_angles(path.aod);
  const Vec3 d_r = direction_from_angles(path.aoa);

  ErpSolution sol;
  sol.segments = solve_segments(tx, rx, d_t, d_r, l);
  sol.erp = (sol.segments.a_end + sol.segments.b_end) * 0.5;
  sol.residual = distance(sol.segments.a_end, sol.segments.b_end);
  sol.total_length = l;
  sol.gain_db = pathgen::received_power_dbm(path);
  return sol;
}

std::vector<ErpSolution> solve_drop(const pathgen::Drop& drop,
                                    DropSolveStats* stats) {
  DropSolveStats local;
  std::vector<ErpSolution> out;
  out.reserve(drop.paths.size());
  for (std::size_t i = 0; i < drop.paths.size(); ++i) {
    const pathgen::PathComponent& path = drop.paths[i];
    ++local.paths_in;
    if (path.is_los) {
      ++local.los_skipped;
      continue;
    }
    try {
      ErpSolution sol = solve_erp(drop.tx, drop.rx, path);
      sol.drop_id = drop.drop_id;
      sol.path_id = static_cast<int>(i);
      out.push_back(sol);
      ++local.solved;
    } catch (const DegenerateDirections&) {
      ++local.degenerate_skipped;
    }
  }
  if (stats) *stats = local;
  return out;
}

} // namespace rfimg::erp
