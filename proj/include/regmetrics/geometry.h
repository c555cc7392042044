#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace regmetrics {

using Point3 = Eigen::Vector3d;

// A putative or ground-truth pairing of a source point with a target point.
struct PointPair {
  Point3 source;
  Point3 target;
};

// Immutable point set with an optionally cached resolution (pr), the mean
// distance from each point to its nearest other point. Every coordinate is
// finite; construction throws kInvalidInput otherwise.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> points);

  // Builds the cloud and caches its resolution. Needs at least 2 points.
  static PointCloud with_resolution(std::vector<Point3> points);

  const std::vector<Point3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }

  const std::optional<double>& cached_resolution() const { return resolution_; }

  // Cached resolution; throws kInvalidInput when it was never computed.
  double resolution() const;

 private:
  std::vector<Point3> points_;
  std::optional<double> resolution_;
};

// Rotation in SO(3) plus translation. p -> R p + t.
class RigidTransform {
 public:
  RigidTransform();  // identity

  // Throws kInvalidInput unless rotation is orthonormal with det +1 (1e-9).
  RigidTransform(const Eigen::Matrix3d& rotation,
                 const Eigen::Vector3d& translation);

  static RigidTransform identity() { return RigidTransform(); }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Point3 operator*(const Point3& p) const { return rotation_ * p + translation_; }

  // 3x4 [R | t].
  Eigen::Matrix<double, 3, 4> matrix3x4() const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

inline constexpr double kRotationTolerance = 1e-9;

// True iff ||R^T R - I|| <= tol and |det R - 1| <= tol.
bool is_rotation(const Eigen::Matrix3d& rotation,
                 double tol = kRotationTolerance);

Point3 apply_transform(const RigidTransform& transform, const Point3& p);

// Applies `second` first, then `first`.
RigidTransform compose(const RigidTransform& first,
                       const RigidTransform& second);

RigidTransform invert(const RigidTransform& transform);

// Rotation by `angle` radians about `axis` (normalized internally).
RigidTransform make_transform(const Eigen::Vector3d& axis, double angle,
                              const Eigen::Vector3d& translation);

PointCloud transform_cloud(const RigidTransform& transform,
                           const PointCloud& cloud);

// Area threshold below which three source points count as collinear:
// 1e-6 * pr^2.
double collinearity_epsilon(double resolution);

// Area of the largest-spread triangle found among the source points: the
// first point, the point farthest from it, and the point farthest from the
// line through those two. For exactly three points this is their triangle.
double source_spread_area(std::span<const PointPair> pairs);

// True when the source points are collinear or coincident: spread area not
// above max(min_triangle_area, 1e-12 * extent^2), extent measured from the
// source centroid.
bool is_degenerate_sample(std::span<const PointPair> pairs,
                          double min_triangle_area);

// Least-squares rigid transform minimizing sum ||R p_s + t - p_t||^2
// (demeaned cross-covariance, SVD, reflection fixed by det sign).
//
// Throws kInsufficientPairs for fewer than 3 pairs and kDegenerateSample when
// is_degenerate_sample() holds.
RigidTransform estimate_rigid_transform(std::span<const PointPair> pairs,
                                        double min_triangle_area = 0.0);

// Mean distance from each point to its nearest other point. Exact, via the
// spatial index. Throws kTooFewPoints for fewer than 2 points.
double cloud_resolution(const PointCloud& cloud);
double cloud_resolution(std::span<const Point3> points);

}  // namespace regmetrics
