#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "regmetrics/geometry.h"

namespace regmetrics {

struct Neighbor {
  std::size_t index;
  double distance;
};

// Exact k-d tree over a frozen copy of a cloud's points.
//
// Results are identical to a linear scan: candidates are ordered by
// (squared distance, point index), so ties go to the lowest index.
// Distances are sqrt(dx*dx + dy*dy + dz*dz) evaluated in that order.
class NeighborIndex {
 public:
  // Throws kEmptyCloud.
  explicit NeighborIndex(const PointCloud& cloud);
  explicit NeighborIndex(std::span<const Point3> points);

  std::size_t point_count() const { return points_.size(); }
  const Point3& point(std::size_t i) const { return points_[i]; }

  Neighbor nearest(const Point3& query) const;

  // k nearest points ascending by distance, ties by index.
  // Throws kKTooLarge unless 1 <= k <= point_count().
  std::vector<Neighbor> knn(const Point3& query, std::size_t k) const;

 private:
  struct Node {
    // Leaf when axis < 0; then [begin, end) indexes order_.
    std::int32_t axis = -1;
    double split = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Point3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

NeighborIndex build_index(const PointCloud& cloud);

inline Neighbor nearest(const NeighborIndex& index, const Point3& query) {
  return index.nearest(query);
}

inline std::vector<Neighbor> knn(const NeighborIndex& index,
                                 const Point3& query, std::size_t k) {
  return index.knn(query, k);
}

}  // namespace regmetrics
