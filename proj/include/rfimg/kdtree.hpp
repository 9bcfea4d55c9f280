#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "rfimg/geom.hpp"
#include "rfimg/kernels.hpp"

namespace rfimg::cloud {

// Static 3-d tree over a point soup for nearest-neighbor queries on large
// clouds. Exact: returns the same minimum squared distance as a linear scan.
class KdTree3 {
 public:
  explicit KdTree3(const kernels::PointSoup& points) : points_(points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!order.empty()) root_ = build(order, 0, order.size(), 0);
  }

  double nearest_dist2(const Vec3& q) const {
    double best = std::numeric_limits<double>::infinity();
    if (root_ >= 0) search(root_, q, best);
    return best;
  }

 private:
  struct Node {
    std::size_t point = 0;
    int axis = 0;
    std::int64_t left = -1;
    std::int64_t right = -1;
  };

  double coord(std::size_t i, int axis) const {
    switch (axis) {
      case 0: return points_.x[i];
      case 1: return points_.y[i];
      default: return points_.z[i];
    }
  }

  std::int64_t build(std::vector<std::size_t>& order, std::size_t lo,
                     std::size_t hi, int depth) {
    if (lo >= hi) return -1;
    const int axis = depth % 3;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order.begin() + lo, order.begin() + mid,
                     order.begin() + hi,
                     [&](std::size_t a, std::size_t b) {
                       return coord(a, axis) < coord(b, axis);
                     });
    Node node;
    node.point = order[mid];
    node.axis = axis;
    const std::int64_t id = static_cast<std::int64_t>(nodes_.size());
    nodes_.push_back(node);
    nodes_[id].left = build(order, lo, mid, depth + 1);
    nodes_[id].right = build(order, mid + 1, hi, depth + 1);
    return id;
  }

  void search(std::int64_t id, const Vec3& q, double& best) const {
    const Node& node = nodes_[id];
    const std::size_t i = node.point;
    const double dx = q.x - points_.x[i];
    const double dy = q.y - points_.y[i];
    const double dz = q.z - points_.z[i];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best) best = d2;

    const double delta = (node.axis == 0   ? dx
                          : node.axis == 1 ? dy
                                           : dz);
    const std::int64_t near = delta <= 0.0 ? node.left : node.right;
    const std::int64_t far = delta <= 0.0 ? node.right : node.left;
    if (near >= 0) search(near, q, best);
    if (far >= 0 && delta * delta < best) search(far, q, best);
  }

  const kernels::PointSoup& points_;
  std::vector<Node> nodes_;
  std::int64_t root_ = -1;
};

} // namespace rfimg::cloud
