#pragma once

#include <stdexcept>
#include <vector>

#include "rfimg/geom.hpp"
#include "rfimg/pathgen.hpp"

namespace rfimg::erp {

// Raised when the departure and arrival directions are (anti-)consistent
// with a straight line, i.e. the two-segment system has no unique stationary
// point. Such paths behave like line-of-sight and are skipped.
class DegenerateDirections : public std::runtime_error {
 public:
  DegenerateDirections() : std::runtime_error("degenerate path directions") {}
};

// Two-segment decomposition of a path: a_end = tx + alpha*d_T on the
// transmitter segment, b_end = rx - beta*d_R on the receiver segment, with
// alpha + beta equal to the total path length.
struct SegmentPair {
  Vec3 a_end;
  Vec3 b_end;
  double alpha = 0.0;
  double beta = 0.0;
};

struct ErpSolution {
  Vec3 erp;
  SegmentPair segments;
  double residual = 0.0;     // chord length |a_end - b_end|, meters
  double total_length = 0.0; // meters
  int drop_id = 0;
  int path_id = -1;
  double gain_db = 0.0;
};

// L = c * tau. Throws std::domain_error for non-positive delay.
double path_length(double tau_s);

// Squared segment mismatch f(alpha, beta) = |a(alpha) - b(beta)|^2.
double segment_mismatch(const Vec3& tx, const Vec3& rx, const Vec3& d_t,
                        const Vec3& d_r, double alpha, double beta);

// Unconstrained stationary alpha of f(alpha, L - alpha), without clamping.
// Throws DegenerateDirections when |d_t - d_r|^2 <= 1e-12.
double solve_alpha(const Vec3& tx, const Vec3& rx, const Vec3& d_t,
                   const Vec3& d_r, double l);

// Constrained minimizer: the stationary alpha when it falls inside [0, L],
// otherwise whichever of (0, L) and (L, 0) gives the smaller mismatch, with
// ties going to (0, L).
SegmentPair solve_segments(const Vec3& tx, const Vec3& rx, const Vec3& d_t,
                           const Vec3& d_r, double l);

// Equivalent reflection point of a non-line-of-sight path: midpoint of the
// optimal segment endpoints. d_T is the departure direction; d_R points from
// the last interaction toward the receiver. Throws std::invalid_argument for
// line-of-sight paths and DegenerateDirections for parallel directions.
ErpSolution solve_erp(const Vec3& tx, const Vec3& rx,
                      const pathgen::PathComponent& path);

struct DropSolveStats {
  int paths_in = 0;
  int los_skipped = 0;
  int degenerate_skipped = 0;
  int solved = 0;
};

// One solution per solvable non-line-of-sight path, in input path order.
// Skips are counted, never fatal.
std::vector<ErpSolution> solve_drop(const pathgen::Drop& drop,
                                    DropSolveStats* stats = nullptr);

} // namespace rfimg::erp
