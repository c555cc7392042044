#include "regmetrics/metrics.h"

#include <cmath>
#include <numbers>
#include <string>

#include "regmetrics/errors.h"

namespace regmetrics {
namespace {

// log(cosh(x)) without overflow for large |x|.
double log_cosh(double x) {
  const double a = std::abs(x);
  if (a < 1.0) return std::log(std::cosh(a));
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

void require_correspondence_kind(MetricKind kind) {
  if (!is_correspondence_based(kind)) {
    throw Error(ErrorCode::kInvalidSpec,
                std::string(metric_name(kind)) +
                    " is a whole-cloud metric; use evaluate_hypothesis_cloud");
  }
}

}  // namespace

CorrespondenceSet pair_by_index(const PointCloud& source,
                                const PointCloud& target) {
  if (source.size() != target.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "index pairing needs equal sizes (" +
                    std::to_string(source.size()) + " vs " +
                    std::to_string(target.size()) + ")");
  }
  CorrespondenceSet corrs;
  corrs.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    corrs.push_back({source[i], target[i]});
  }
  return corrs;
}

std::string_view metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::kInlierCount: return "inlier-count";
    case MetricKind::kHuber: return "huber";
    case MetricKind::kMae: return "mae";
    case MetricKind::kMse: return "mse";
    case MetricKind::kLogCosh: return "log-cosh";
    case MetricKind::kExp: return "exp";
    case MetricKind::kQuantile: return "quantile";
    case MetricKind::kNegQuantile: return "neg-quantile";
    case MetricKind::kPcDist: return "pc-dist";
    case MetricKind::kOverlapCount: return "overlap-count";
  }
  return "unknown";
}

MetricKind parse_metric_kind(std::string_view name) {
  for (MetricKind kind : kAllMetricKinds) {
    if (metric_name(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidSpec,
              "unknown metric '" + std::string(name) + "'");
}

bool is_correspondence_based(MetricKind kind) {
  return kind != MetricKind::kPcDist && kind != MetricKind::kOverlapCount;
}

MetricSpec::MetricSpec(MetricKind kind, double t, double m, double t_overlap,
                       double pr)
    : kind_(kind), t_(t), m_(m), t_overlap_(t_overlap), pr_(pr) {
  // Written as negations so that NaN fails every check.
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidSpec, "t must be positive and finite");
  }
  if (!(m > 0.0 && m < 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "m must lie in (0, 1)");
  }
  if (!(t_overlap > 0.0) || !std::isfinite(t_overlap)) {
    throw Error(ErrorCode::kInvalidSpec, "t_overlap must be positive");
  }
  if (!(pr > 0.0) || !std::isfinite(pr)) {
    throw Error(ErrorCode::kInvalidSpec, "pr must be positive");
  }
}

MetricSpec MetricSpec::from_pr_units(MetricKind kind, double pr, double t_pr,
                                     double m, double t_overlap_pr) {
  return MetricSpec(kind, t_pr * pr, m, t_overlap_pr * pr, pr);
}

MetricSpec MetricSpec::with_t(double t) const {
  return MetricSpec(kind_, t, m_, t_overlap_, pr_);
}

MetricSpec MetricSpec::with_kind(MetricKind kind) const {
  return MetricSpec(kind, t_, m_, t_overlap_, pr_);
}

double transformation_error(const Correspondence& c,
                            const RigidTransform& transform) {
  return (transform * c.source - c.target).norm();
}

double score_correspondence(const MetricSpec& spec, double e) {
  const double t = spec.t();
  const bool inlier = e < t;
  switch (spec.kind()) {
    case MetricKind::kInlierCount:
      return inlier ? 1.0 : 0.0;
    case MetricKind::kHuber:
      return inlier ? -0.5 * e * e : -t * (e - 0.5 * t);
    case MetricKind::kMae:
      return inlier ? std::abs(e - t) / t : 0.0;
    case MetricKind::kMse: {
      if (!inlier) return 0.0;
      const double r = (e - t) / t;
      return r * r;
    }
    case MetricKind::kLogCosh: {
      if (!inlier) return 0.0;
      const double e_hat = e / spec.pr();
      const double t_hat = t / spec.pr();
      return log_cosh(e_hat - t_hat) / log_cosh(t_hat);
    }
    case MetricKind::kExp:
      return inlier ? std::exp(-(e * e) / (2.0 * t * t)) : 0.0;
    case MetricKind::kQuantile:
      return inlier ? spec.m() * (std::abs(e - t) / t)
                    : (1.0 - spec.m()) * (std::abs(e - t) / e);
    case MetricKind::kNegQuantile:
      return inlier ? spec.m() * (std::abs(e - t) / t)
                    : (spec.m() - 1.0) * (std::abs(e - t) / e);
    case MetricKind::kPcDist:
    case MetricKind::kOverlapCount:
      break;
  }
  require_correspondence_kind(spec.kind());
  return 0.0;
}

HypothesisScore evaluate_hypothesis(const MetricSpec& spec,
                                    const RigidTransform& transform,
                                    std::span<const Correspondence> corrs) {
  require_correspondence_kind(spec.kind());
  double sum = 0.0;
  for (const Correspondence& c : corrs) {
    sum += score_correspondence(spec, transformation_error(c, transform));
  }
  return {sum, spec.kind()};
}

HypothesisScore evaluate_hypothesis_cloud(const MetricSpec& spec,
                                          const RigidTransform& transform,
                                          const PointCloud& source,
                                          const NeighborIndex& target_index) {
  if (is_correspondence_based(spec.kind())) {
    throw Error(ErrorCode::kInvalidSpec,
                std::string(metric_name(spec.kind())) +
                    " is correspondence-based; use evaluate_hypothesis");
  }
  if (source.empty()) {
    throw Error(ErrorCode::kEmptyCloud, "source cloud is empty");
  }
  if (spec.kind() == MetricKind::kPcDist) {
    double sum = 0.0;
    for (const Point3& p : source.points()) {
      sum += target_index.nearest(transform * p).distance;
    }
    return {-sum / static_cast<double>(source.size()), spec.kind()};
  }
  std::size_t count = 0;
  for (const Point3& p : source.points()) {
    if (target_index.nearest(transform * p).distance < spec.t_overlap()) {
      ++count;
    }
  }
  return {static_cast<double>(count), spec.kind()};
}

}  // namespace regmetrics
