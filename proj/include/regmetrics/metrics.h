#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "regmetrics/geometry.h"
#include "regmetrics/neighbor_index.h"

namespace regmetrics {

// A putative match c = (p_s, p_t).
struct Correspondence {
  Point3 source;
  Point3 target;
};

using CorrespondenceSet = std::vector<Correspondence>;

// Pairs point i of `source` with point i of `target`. Throws kInvalidInput
// when the sizes differ.
CorrespondenceSet pair_by_index(const PointCloud& source,
                                const PointCloud& target);

enum class MetricKind {
  kInlierCount,
  kHuber,
  kMae,
  kMse,
  kLogCosh,
  kExp,
  kQuantile,
  kNegQuantile,
  kPcDist,
  kOverlapCount,
};

inline constexpr MetricKind kAllMetricKinds[] = {
    MetricKind::kInlierCount, MetricKind::kHuber,    MetricKind::kMae,
    MetricKind::kMse,         MetricKind::kLogCosh,  MetricKind::kExp,
    MetricKind::kQuantile,    MetricKind::kNegQuantile, MetricKind::kPcDist,
    MetricKind::kOverlapCount,
};

// The six inlier-weighting metrics that rank hypotheses by inlier accuracy.
inline constexpr MetricKind kProposedMetricKinds[] = {
    MetricKind::kMae,      MetricKind::kMse,        MetricKind::kLogCosh,
    MetricKind::kExp,      MetricKind::kQuantile,   MetricKind::kNegQuantile,
};

// Canonical CLI names: "inlier-count", "huber", "mae", "mse", "log-cosh",
// "exp", "quantile", "neg-quantile", "pc-dist", "overlap-count".
std::string_view metric_name(MetricKind kind);

// Throws kInvalidSpec for unknown names.
MetricKind parse_metric_kind(std::string_view name);

// PcDist and OverlapCount score whole clouds; the rest score correspondences.
bool is_correspondence_based(MetricKind kind);

inline constexpr double kDefaultInlierThresholdPr = 7.5;
inline constexpr double kDefaultQuantileWeight = 0.9;
inline constexpr double kDefaultOverlapThresholdPr = 2.0;

// Scoring function plus its parameters, all distances in world units.
// Construction validates t > 0, 0 < m < 1, t_overlap > 0, pr > 0 and throws
// kInvalidSpec otherwise.
class MetricSpec {
 public:
  MetricSpec(MetricKind kind, double t, double m, double t_overlap, double pr);

  // Thresholds given in multiples of `pr`, with the documented defaults.
  static MetricSpec from_pr_units(MetricKind kind, double pr,
                                  double t_pr = kDefaultInlierThresholdPr,
                                  double m = kDefaultQuantileWeight,
                                  double t_overlap_pr =
                                      kDefaultOverlapThresholdPr);

  MetricKind kind() const { return kind_; }
  double t() const { return t_; }
  double m() const { return m_; }
  double t_overlap() const { return t_overlap_; }
  double pr() const { return pr_; }

  MetricSpec with_t(double t) const;
  MetricSpec with_kind(MetricKind kind) const;

 private:
  MetricKind kind_;
  double t_;
  double m_;
  double t_overlap_;
  double pr_;
};

// S(T); higher is better for every kind.
struct HypothesisScore {
  double value = 0.0;
  MetricKind kind = MetricKind::kInlierCount;
};

// e(c) = ||R p_s + t - p_t||.
double transformation_error(const Correspondence& c,
                            const RigidTransform& transform);

// Per-correspondence score s(c) for error e. Throws kInvalidSpec for the
// whole-cloud kinds.
double score_correspondence(const MetricSpec& spec, double e);

// S(T) = sum_j s(c_j). Empty set scores 0.
HypothesisScore evaluate_hypothesis(const MetricSpec& spec,
                                    const RigidTransform& transform,
                                    std::span<const Correspondence> corrs);

// PcDist: minus the mean nearest-neighbor distance of the transformed source
// to the target. OverlapCount: number of transformed source points whose
// nearest target point is closer than t_overlap.
HypothesisScore evaluate_hypothesis_cloud(const MetricSpec& spec,
                                          const RigidTransform& transform,
                                          const PointCloud& source,
                                          const NeighborIndex& target_index);

}  // namespace regmetrics
