#include "regmetrics/neighbor_index.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "regmetrics/errors.h"

namespace regmetrics {
namespace {

constexpr std::uint32_t kLeafSize = 8;

inline double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

struct Candidate {
  double d2;
  std::uint32_t index;
};

// Strict weak order: closer first, then lower index.
inline bool closer(const Candidate& a, const Candidate& b) {
  return a.d2 < b.d2 || (a.d2 == b.d2 && a.index < b.index);
}

struct CloserCmp {
  bool operator()(const Candidate& a, const Candidate& b) const {
    return closer(a, b);
  }
};

}  // namespace

NeighborIndex::NeighborIndex(const PointCloud& cloud)
    : NeighborIndex(std::span<const Point3>(cloud.points())) {}

NeighborIndex::NeighborIndex(std::span<const Point3> points)
    : points_(points.begin(), points.end()) {
  if (points_.empty()) {
    throw Error(ErrorCode::kEmptyCloud, "cannot index an empty cloud");
  }
  if (points_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidInput, "cloud too large to index");
  }
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points_.size() / kLeafSize + 1);
  root_ = build(0, static_cast<std::uint32_t>(order_.size()));
}

std::uint32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto node_id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[node_id].begin = begin;
    nodes_[node_id].end = end;
    return node_id;
  }

  Eigen::Vector3d lo = points_[order_[begin]];
  Eigen::Vector3d hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) {
    // All points coincide; nothing to split on.
    nodes_[node_id].begin = begin;
    nodes_[node_id].end = end;
    return node_id;
  }

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [this, axis](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const double split = points_[order_[mid]][axis];

  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  Node& node = nodes_[node_id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return node_id;
}

Neighbor NeighborIndex::nearest(const Point3& query) const {
  Candidate best{std::numeric_limits<double>::infinity(),
                 std::numeric_limits<std::uint32_t>::max()};

  // Explicit stack of (node, lower bound on squared distance to its cell).
  struct Pending {
    std::uint32_t node;
    double bound;
  };
  std::vector<Pending> stack;
  stack.reserve(64);
  stack.push_back({root_, 0.0});
  while (!stack.empty()) {
    const Pending top = stack.back();
    stack.pop_back();
    // Equal bounds are still visited so that lower-index ties are found.
    if (top.bound > best.d2) continue;
    const Node& node = nodes_[top.node];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const Candidate c{squared_distance(points_[order_[i]], query),
                          order_[i]};
        if (closer(c, best)) best = c;
      }
      continue;
    }
    // Left holds coordinates <= split, right holds >= split.
    const double diff = query[node.axis] - node.split;
    const double plane = diff * diff;
    const std::uint32_t near_child = diff <= 0.0 ? node.left : node.right;
    const std::uint32_t far_child = diff <= 0.0 ? node.right : node.left;
    stack.push_back({far_child, std::max(top.bound, plane)});
    stack.push_back({near_child, top.bound});
  }
  return {best.index, std::sqrt(best.d2)};
}

std::vector<Neighbor> NeighborIndex::knn(const Point3& query,
                                         std::size_t k) const {
  if (k < 1 || k > points_.size()) {
    throw Error(ErrorCode::kKTooLarge,
                "k=" + std::to_string(k) + " outside [1, " +
                    std::to_string(points_.size()) + "]");
  }
  // Max-heap under `closer`: top is the worst of the current k best.
  std::priority_queue<Candidate, std::vector<Candidate>, CloserCmp> heap;

  struct Pending {
    std::uint32_t node;
    double bound;
  };
  std::vector<Pending> stack;
  stack.reserve(64);
  stack.push_back({root_, 0.0});
  while (!stack.empty()) {
    const Pending top = stack.back();
    stack.pop_back();
    if (heap.size() == k && top.bound > heap.top().d2) continue;
    const Node& node = nodes_[top.node];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const Candidate c{squared_distance(points_[order_[i]], query),
                          order_[i]};
        if (heap.size() < k) {
          heap.push(c);
        } else if (closer(c, heap.top())) {
          heap.pop();
          heap.push(c);
        }
      }
      continue;
    }
    const double diff = query[node.axis] - node.split;
    const double plane = diff * diff;
    const std::uint32_t near_child = diff <= 0.0 ? node.left : node.right;
    const std::uint32_t far_child = diff <= 0.0 ? node.right : node.left;
    stack.push_back({far_child, std::max(top.bound, plane)});
    stack.push_back({near_child, top.bound});
  }

  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = {heap.top().index, std::sqrt(heap.top().d2)};
    heap.pop();
  }
  return out;
}

NeighborIndex build_index(const PointCloud& cloud) {
  return NeighborIndex(cloud);
}

}  // namespace regmetrics
