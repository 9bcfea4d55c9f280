#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rfimg/erp.hpp"
#include "rfimg/scene.hpp"

namespace rfimg::cloud {

struct CloudPoint {
  Vec3 position;
  double gain_db = 0.0;
  double residual = 0.0; // meters
  int drop_id = 0;
  int path_id = 0;
};

struct PointCloud {
  std::vector<CloudPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct FusionConfig {
  double gamma_m = 10.0;
  // When set, only solutions from these drop ids are fused.
  std::optional<std::vector<int>> drop_subset;
  // Optional replacement for the fixed-gamma test (e.g. adaptive radius);
  // when empty, a solution is kept iff residual < gamma_m strictly.
  std::function<bool(const erp::ErpSolution&)> accept;
};

// Union of the accepted reflection points over the selected drops, in input
// order. Throws std::invalid_argument when gamma is non-positive and no
// custom predicate is given.
PointCloud filter_and_fuse(
    const std::vector<std::vector<erp::ErpSolution>>& per_drop,
    const FusionConfig& cfg);

// n points drawn area-uniformly over the scene surface, deterministic under
// seed. Throws std::invalid_argument for an empty scene or n = 0.
PointCloud sample_reference(const pathgen::Scene& scene, std::size_t n,
                            std::uint64_t seed);

// Symmetric Chamfer distance: mean nearest-neighbor distance from recon to
// reference plus the reverse term. Throws std::invalid_argument when either
// cloud is empty.
double chamfer(const PointCloud& recon, const PointCloud& reference);

struct TradeoffRow {
  int num_pairs = 0;
  double chamfer_m = 0.0; // NaN when the fused cloud at this k is empty
  std::size_t points_kept = 0;
};

// Chamfer distance of the first k drops' fusion against the reference, for
// each k in pair_counts (ascending, each within the number of drop groups).
std::vector<TradeoffRow> tradeoff_curve(
    const std::vector<std::vector<erp::ErpSolution>>& per_drop,
    const PointCloud& reference, const FusionConfig& cfg,
    const std::vector<int>& pair_counts);

} // namespace rfimg::cloud
