#include "cadact/chamfer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "cadact/error.hpp"

namespace cadact::metrics {

namespace {
constexpr int kLeafSize = 8;
}

double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

KdTree::KdTree(const PointCloud& points) : points_(points), order_(points.size()) {
  std::iota(order_.begin(), order_.end(), 0);
  if (!points.empty()) build(0, static_cast<int>(points.size()));
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;
  Vec3 lo = points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(begin)])], hi = lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])]);
    hi = hi.cwiseMax(points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
    return points_[static_cast<std::size_t>(a)][axis] < points_[static_cast<std::size_t>(b)][axis];
  });
  const double split = points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(mid)])][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& n = nodes_[static_cast<std::size_t>(id)];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

void KdTree::search(int node, const Vec3& q, double& best) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i)
      best = std::min(best, squared_distance(q, points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])]));
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double d = q[n.axis] - n.split;
  const int near = d <= 0 ? n.left : n.right;
  const int far = d <= 0 ? n.right : n.left;
  search(near, q, best);
  if (d * d <= best) search(far, q, best);
}

double KdTree::nearest_sq(const Vec3& q) const {
  double best = std::numeric_limits<double>::infinity();
  if (!nodes_.empty()) search(0, q, best);
  return best;
}

double chamfer(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) fail(ErrorCode::EmptyCloud, "chamfer distance needs two nonempty clouds");
  return chamfer(KdTree(p), p, q);
}

double chamfer(const KdTree& tp, const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) fail(ErrorCode::EmptyCloud, "chamfer distance needs two nonempty clouds");
  const KdTree tq(q);
  double a = 0.0, b = 0.0;
  for (const auto& x : p) a += tq.nearest_sq(x);
  for (const auto& y : q) b += tp.nearest_sq(y);
  return a / static_cast<double>(p.size()) + b / static_cast<double>(q.size());
}

double chamfer_bounded(const KdTree& tp, const PointCloud& p, const PointCloud& q, double bound) {
  if (p.empty() || q.empty()) fail(ErrorCode::EmptyCloud, "chamfer distance needs two nonempty clouds");
  const double nq = static_cast<double>(q.size());
  double b = 0.0;
  for (const auto& y : q) {
    b += tp.nearest_sq(y);
    if (b / nq > bound) return std::numeric_limits<double>::infinity();
  }
  const KdTree tq(q);
  const double np = static_cast<double>(p.size());
  double a = 0.0;
  for (const auto& x : p) {
    a += tq.nearest_sq(x);
    if (a / np + b / nq > bound) return std::numeric_limits<double>::infinity();
  }
  return a / np + b / nq;
}

double chamfer_brute(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) fail(ErrorCode::EmptyCloud, "chamfer distance needs two nonempty clouds");
  auto one_way = [](const PointCloud& from, const PointCloud& to) {
    double sum = 0.0;
    for (const auto& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : to) best = std::min(best, squared_distance(x, y));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return one_way(p, q) + one_way(q, p);
}

}  // namespace cadact::metrics
