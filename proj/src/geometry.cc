#include "regmetrics/geometry.h"

#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "regmetrics/errors.h"
#include "regmetrics/neighbor_index.h"

namespace regmetrics {

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite()) {
      throw Error(ErrorCode::kInvalidInput,
                  "point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

PointCloud PointCloud::with_resolution(std::vector<Point3> points) {
  PointCloud cloud(std::move(points));
  cloud.resolution_ = cloud_resolution(std::span<const Point3>(cloud.points_));
  return cloud;
}

double PointCloud::resolution() const {
  if (!resolution_) {
    throw Error(ErrorCode::kInvalidInput, "cloud resolution was not computed");
  }
  return *resolution_;
}

RigidTransform::RigidTransform()
    : rotation_(Eigen::Matrix3d::Identity()),
      translation_(Eigen::Vector3d::Zero()) {}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error(ErrorCode::kInvalidInput, "transform has non-finite entries");
  }
  if (!is_rotation(rotation)) {
    throw Error(ErrorCode::kInvalidInput, "matrix is not in SO(3)");
  }
}

Eigen::Matrix<double, 3, 4> RigidTransform::matrix3x4() const {
  Eigen::Matrix<double, 3, 4> m;
  m.leftCols<3>() = rotation_;
  m.col(3) = translation_;
  return m;
}

bool is_rotation(const Eigen::Matrix3d& rotation, double tol) {
  const double orthogonality =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
  return orthogonality <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

Point3 apply_transform(const RigidTransform& transform, const Point3& p) {
  return transform * p;
}

RigidTransform compose(const RigidTransform& first,
                       const RigidTransform& second) {
  return RigidTransform(
      first.rotation() * second.rotation(),
      first.rotation() * second.translation() + first.translation());
}

RigidTransform invert(const RigidTransform& transform) {
  const Eigen::Matrix3d rt = transform.rotation().transpose();
  return RigidTransform(rt, -(rt * transform.translation()));
}

RigidTransform make_transform(const Eigen::Vector3d& axis, double angle,
                              const Eigen::Vector3d& translation) {
  const Eigen::Matrix3d rotation =
      Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return RigidTransform(rotation, translation);
}

PointCloud transform_cloud(const RigidTransform& transform,
                           const PointCloud& cloud) {
  std::vector<Point3> out;
  out.reserve(cloud.size());
  for (const Point3& p : cloud.points()) out.push_back(transform * p);
  return PointCloud(std::move(out));
}

double collinearity_epsilon(double resolution) {
  return 1e-6 * resolution * resolution;
}

double source_spread_area(std::span<const PointPair> pairs) {
  if (pairs.size() < 3) return 0.0;
  const Point3& a = pairs[0].source;
  std::size_t far = 0;
  double far_d2 = -1.0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    const double d2 = (pairs[i].source - a).squaredNorm();
    if (d2 > far_d2) {
      far_d2 = d2;
      far = i;
    }
  }
  const Eigen::Vector3d ab = pairs[far].source - a;
  double best = 0.0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (i == far) continue;
    best = std::max(best, ab.cross(pairs[i].source - a).norm());
  }
  return 0.5 * best;
}

bool is_degenerate_sample(std::span<const PointPair> pairs,
                          double min_triangle_area) {
  if (pairs.size() < 3) return true;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const PointPair& pair : pairs) mean += pair.source;
  mean /= static_cast<double>(pairs.size());
  double extent2 = 0.0;
  for (const PointPair& pair : pairs) {
    extent2 = std::max(extent2, (pair.source - mean).squaredNorm());
  }
  const double threshold = std::max(min_triangle_area, 1e-12 * extent2);
  return !(source_spread_area(pairs) > threshold);
}

RigidTransform estimate_rigid_transform(std::span<const PointPair> pairs,
                                        double min_triangle_area) {
  if (pairs.size() < 3) {
    throw Error(ErrorCode::kInsufficientPairs,
                "need at least 3 pairs, got " + std::to_string(pairs.size()));
  }

  if (is_degenerate_sample(pairs, min_triangle_area)) {
    throw Error(ErrorCode::kDegenerateSample,
                "source points are collinear or coincident");
  }

  Eigen::Vector3d source_mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d target_mean = Eigen::Vector3d::Zero();
  for (const PointPair& pair : pairs) {
    source_mean += pair.source;
    target_mean += pair.target;
  }
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  source_mean *= inv_n;
  target_mean *= inv_n;

  // Cross-covariance H = sum (p_s - mu_s)(p_t - mu_t)^T.
  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  for (const PointPair& pair : pairs) {
    cross += (pair.source - source_mean) *
             (pair.target - target_mean).transpose();
  }
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Vector3d signs(1.0, 1.0, 1.0);
  if ((v * u.transpose()).determinant() < 0.0) signs.z() = -1.0;
  const Eigen::Matrix3d rotation = v * signs.asDiagonal() * u.transpose();
  const Eigen::Vector3d translation = target_mean - rotation * source_mean;
  return RigidTransform(rotation, translation);
}

double cloud_resolution(std::span<const Point3> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::kTooFewPoints,
                "resolution needs at least 2 points, got " +
                    std::to_string(points.size()));
  }
  const NeighborIndex index(points);
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    // Self is among the two nearest; a duplicate may outrank it on index.
    const auto two = index.knn(points[i], 2);
    sum += two[0].index == i ? two[1].distance : two[0].distance;
  }
  return sum / static_cast<double>(points.size());
}

double cloud_resolution(const PointCloud& cloud) {
  return cloud_resolution(std::span<const Point3>(cloud.points()));
}

}  // namespace regmetrics
