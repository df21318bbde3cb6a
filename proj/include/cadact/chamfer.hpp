#pragma once

#include <vector>

#include "cadact/solid.hpp"

namespace cadact::metrics {

using kernel::PointCloud;
using kernel::Vec3;

// Exact nearest-neighbour index; results match a linear scan bit for bit.
class KdTree {
 public:
  explicit KdTree(const PointCloud& points);

  // Squared distance to the nearest stored point.
  double nearest_sq(const Vec3& q) const;

 private:
  struct Node {
    int begin = 0, end = 0;  // leaf range in order_
    int axis = -1;
    double split = 0.0;
    int left = -1, right = -1;
  };
  const PointCloud& points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;

  int build(int begin, int end);
  void search(int node, const Vec3& q, double& best) const;
};

double squared_distance(const Vec3& a, const Vec3& b);

// Sum of the two mean squared nearest-neighbour distances. Throws EmptyCloud.
double chamfer(const PointCloud& p, const PointCloud& q);
// Same, reusing a prebuilt index of p.
double chamfer(const KdTree& p_tree, const PointCloud& p, const PointCloud& q);
// Equals chamfer() when the result is at most `bound`, infinity otherwise.
double chamfer_bounded(const KdTree& p_tree, const PointCloud& p, const PointCloud& q, double bound);
double chamfer_brute(const PointCloud& p, const PointCloud& q);

}  // namespace cadact::metrics
