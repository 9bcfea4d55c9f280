#include "rfimg/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "rfimg/kdtree.hpp"
#include "rfimg/kernels.hpp"

namespace rfimg::cloud {
namespace {

// Brute-force scans stay exact and fast up to this size; larger targets go
// through the tree.
constexpr std::size_t kBruteForceLimit = 1024;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

kernels::PointSoup to_soup(const PointCloud& cloud) {
  kernels::PointSoup soup;
  soup.x.reserve(cloud.size());
  soup.y.reserve(cloud.size());
  soup.z.reserve(cloud.size());
  for (const CloudPoint& p : cloud.points) soup.push(p.position);
  return soup;
}

// Mean nearest-neighbor distance from each query point to the target set.
double directed_mean(const kernels::PointSoup& queries,
                     const kernels::PointSoup& target) {
  double sum = 0.0;
  if (target.size() <= kBruteForceLimit) {
    sum = kernels::nn_distance_sum(queries, target);
  } else {
    const KdTree3 tree(target);
    for (std::size_t i = 0; i < queries.size(); ++i)
      sum += std::sqrt(tree.nearest_dist2(queries.at(i)));
  }
  return sum / static_cast<double>(queries.size());
}

} // namespace

PointCloud filter_and_fuse(
    const std::vector<std::vector<erp::ErpSolution>>& per_drop,
    const FusionConfig& cfg) {
  if (!cfg.accept && !(cfg.gamma_m > 0.0))
    throw std::invalid_argument("filter_and_fuse: gamma must be positive");

  const auto selected = [&](int drop_id) {
    if (!cfg.drop_subset) return true;
    return std::find(cfg.drop_subset->begin(), cfg.drop_subset->end(),
                     drop_id) != cfg.drop_subset->end();
  };
  const auto accepted = [&](const erp::ErpSolution& sol) {
    return cfg.accept ? cfg.accept(sol) : sol.residual < cfg.gamma_m;
  };

  PointCloud cloud;
  for (const auto& group : per_drop) {
    for (const erp::ErpSolution& sol : group) {
      if (!selected(sol.drop_id) || !accepted(sol)) continue;
      cloud.points.push_back(
          {sol.erp, sol.gain_db, sol.residual, sol.drop_id, sol.path_id});
    }
  }
  return cloud;
}

PointCloud sample_reference(const pathgen::Scene& scene, std::size_t n,
                            std::uint64_t seed) {
  if (n == 0)
    throw std::invalid_argument("sample_reference: need at least one point");
  if (scene.triangles.empty())
    throw std::invalid_argument("sample_reference: scene has no surface");

  std::vector<double> cumulative(scene.triangles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scene.triangles.size(); ++i) {
    total += scene.triangles[i].area();
    cumulative[i] = total;
  }
  if (!(total > 0.0))
    throw std::invalid_argument("sample_reference: scene has zero area");

  std::mt19937_64 rng(seed);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = uniform01(rng) * total;
    const std::size_t t = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
        cumulative.begin());
    const Triangle& tri = scene.triangles[std::min(t, cumulative.size() - 1)];
    const double su = std::sqrt(uniform01(rng));
    const double v = uniform01(rng);
    const Vec3 p = tri.v0 * (1.0 - su) + tri.v1 * (su * (1.0 - v)) +
                   tri.v2 * (su * v);
    cloud.points.push_back({p, 0.0, 0.0, -1, static_cast<int>(i)});
  }
  return cloud;
}

double chamfer(const PointCloud& recon, const PointCloud& reference) {
  if (recon.empty() || reference.empty())
    throw std::invalid_argument("chamfer: clouds must be non-empty");
  const kernels::PointSoup a = to_soup(recon);
  const kernels::PointSoup b = to_soup(reference);
  return directed_mean(a, b) + directed_mean(b, a);
}

std::vector<TradeoffRow> tradeoff_curve(
    const std::vector<std::vector<erp::ErpSolution>>& per_drop,
    const PointCloud& reference, const FusionConfig& cfg,
    const std::vector<int>& pair_counts) {
  if (!std::is_sorted(pair_counts.begin(), pair_counts.end()))
    throw std::invalid_argument("tradeoff_curve: pair counts must be ascending");

  std::vector<TradeoffRow> rows;
  rows.reserve(pair_counts.size());
  for (const int k : pair_counts) {
    if (k < 1 || static_cast<std::size_t>(k) > per_drop.size())
      throw std::invalid_argument("tradeoff_curve: pair count out of range");
    const std::vector<std::vector<erp::ErpSolution>> first_k(
        per_drop.begin(), per_drop.begin() + k);
    FusionConfig sub = cfg;
    sub.drop_subset.reset();
    const PointCloud fused = filter_and_fuse(first_k, sub);
    TradeoffRow row;
    row.num_pairs = k;
    row.points_kept = fused.size();
    row.chamfer_m = fused.empty()
                        ? std::numeric_limits<double>::quiet_NaN()
                        : chamfer(fused, reference);
    rows.push_back(row);
  }
  return rows;
}

} // namespace rfimg::cloud
