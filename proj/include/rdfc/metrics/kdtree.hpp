#pragma once

#include <cstddef>
#include <vector>

#include "rdfc/core/types.hpp"

namespace rdfc::metrics {

/// Static 3-d tree over a point cloud. Queries are exact.
class KdTree {
 public:
  explicit KdTree(const PointCloud& points);

  /// Squared distance from q to its nearest point; the cloud must be non-empty.
  double nearest_squared(const Point3& q) const;
  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range in order_
    int axis = -1;                   // -1 for leaves
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end, int depth);
  void search(int node, const Point3& q, double& best) const;

  PointCloud points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace rdfc::metrics
