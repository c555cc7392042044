#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regmetrics/geometry.h"
#include "regmetrics/metrics.h"
#include "regmetrics/neighbor_index.h"
#include "regmetrics/synth.h"

namespace regmetrics {

inline constexpr double kDefaultDRmsePr = 2.5;

// Mean over ground-truth pairs of ||R_est p_s + t_est - p_t||. Despite the
// name this is a plain mean of per-pair errors, no square or root.
// Throws kEmptyGroundTruth.
double rmse(const RigidTransform& estimate, std::span<const PointPair> gt_pairs);

// Ground-truth pairing (p_s, R_gt p_s + t_gt) for every source point.
std::vector<PointPair> ground_truth_pairs(const PointCloud& source,
                                          const RigidTransform& gt);

// rmse_value < d_rmse_pr * pr, strictly.
bool is_correct(double rmse_value, double d_rmse_pr, double pr);

enum class SweepAxis {
  kT,
  kIterations,
  kDRmse,
  kInlierRatio,
  kNoise,
  kDecimationUniform,
  kDecimationRandom,
  kHoles,
};

// "t", "iterations", "d_rmse", "inlier_ratio", "noise",
// "decimation-uniform", "decimation-random", "holes".
std::string_view sweep_axis_name(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);  // kBadConfig if unknown

// A metric with thresholds in pr units; resolved per trial against the
// scene's resolution.
struct MetricSetting {
  MetricKind kind = MetricKind::kMae;
  double t_pr = kDefaultInlierThresholdPr;
  double m = kDefaultQuantileWeight;
  double t_overlap_pr = kDefaultOverlapThresholdPr;

  MetricSpec to_spec(double pr) const {
    return MetricSpec::from_pr_units(kind, pr, t_pr, m, t_overlap_pr);
  }
};

struct EvalConfig {
  double d_rmse_pr = kDefaultDRmsePr;
  int trials = 100;
  std::vector<MetricSetting> metrics;
  SweepAxis axis = SweepAxis::kT;
  std::vector<double> values;
  // Every per-trial seed (scene, correspondences, nuisance, sampling) is
  // derived from this one; the seeds inside the scene and correspondence
  // configs are ignored. All metrics of a trial share the same samples.
  std::uint64_t seed = 0;
  int iterations = 1000;
  double hole_fraction = kDefaultHoleFraction;
  // Trials run on this many workers; rows do not depend on it.
  int threads = 1;
};

struct TrialOutcome {
  double rmse_pr = 0.0;
  bool correct = false;
  int best_iteration = 0;
  double eval_time_s = 0.0;
  double index_build_time_s = 0.0;
};

struct ExperimentRow {
  std::string metric;
  SweepAxis axis = SweepAxis::kT;
  double sweep_value = 0.0;
  int trials = 0;
  double accuracy = 0.0;
  // Mean RMSE over correct trials, in pr; NaN when none is correct.
  double mean_rmse_pr = 0.0;
  double mean_eval_time_s = 0.0;
  // Mean target-index build time; 0 for correspondence metrics.
  double index_build_time_s = 0.0;
  std::vector<TrialOutcome> outcomes;
};

// "a:b:step" (inclusive, a <= b, step > 0) or a comma list "v1,v2,...".
// Throws kBadConfig.
std::vector<double> parse_sweep_values(std::string_view text);

// Rows ordered by metric (as configured) then ascending sweep value.
std::vector<ExperimentRow> run_experiment(const EvalConfig& cfg,
                                          const SceneConfig& scene_cfg,
                                          const CorrespondenceConfig& corr_cfg);

// Fraction of outcomes with rmse_pr < d_rmse_pr.
double accuracy_at(std::span<const TrialOutcome> outcomes, double d_rmse_pr);

// Wall-clock metric evaluation time per hypothesis, excluding hypothesis
// generation and index construction. Throws kInvalidInput for an empty
// hypothesis set.
double time_metric_evaluation(const MetricSpec& spec,
                              std::span<const RigidTransform> hypotheses,
                              std::span<const Correspondence> corrs,
                              const PointCloud* source = nullptr,
                              const NeighborIndex* target_index = nullptr);

// Seconds to build a NeighborIndex over `target`.
double time_index_build(const PointCloud& target);

}  // namespace regmetrics
