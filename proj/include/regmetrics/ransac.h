#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "regmetrics/geometry.h"
#include "regmetrics/metrics.h"
#include "regmetrics/neighbor_index.h"
#include "regmetrics/random.h"

namespace regmetrics {

struct RansacConfig {
  explicit RansacConfig(MetricSpec metric_spec) : metric(metric_spec) {}

  int iterations = 1000;
  // Only the 3-point solver exists; other sizes are rejected.
  int sample_size = 3;
  std::uint64_t seed = 0;
  MetricSpec metric;
  int degeneracy_retries = 100;
  // Resolution of the source cloud, used for the collinearity threshold
  // 1e-6 * pr^2. Falls back to metric.pr() when unset.
  std::optional<double> source_resolution;
  // Evaluation workers. Results do not depend on this value.
  int threads = 1;
  // Keep every generated hypothesis in RegistrationResult::trace.
  bool record_trace = false;
};

struct RegistrationResult {
  RigidTransform best_transform;
  HypothesisScore best_score;
  int best_iteration = 0;
  int hypotheses_evaluated = 0;
  std::chrono::duration<double> elapsed_eval_time{0.0};
  std::chrono::duration<double> elapsed_total_time{0.0};
  // Hypothesis i was generated at iteration i (only with record_trace).
  std::vector<RigidTransform> trace;
};

using SampleIndices = std::array<std::size_t, 3>;

// Three distinct indices drawn uniformly without replacement. A draw whose
// source points fail is_degenerate_sample(min_triangle_area) is redrawn, up
// to `degeneracy_retries` times, then kPersistentDegeneracy is thrown. Throws kTooFewCorrespondences for n < 3.
SampleIndices sample_minimal(std::span<const Correspondence> corrs, Rng& rng,
                             double min_triangle_area,
                             int degeneracy_retries = 100);

// Fixed-budget RANSAC: every iteration samples, solves, and scores; the
// hypothesis with the maximum score wins, earliest iteration on ties.
//
// Whole-cloud metrics need both `source` and `target_index`
// (kMissingClouds otherwise).
RegistrationResult run_ransac(const RansacConfig& config,
                              std::span<const Correspondence> corrs,
                              const PointCloud* source = nullptr,
                              const NeighborIndex* target_index = nullptr);

// Scores one hypothesis with whichever evaluation route the metric needs.
HypothesisScore score_hypothesis(const MetricSpec& spec,
                                 const RigidTransform& transform,
                                 std::span<const Correspondence> corrs,
                                 const PointCloud* source,
                                 const NeighborIndex* target_index);

}  // namespace regmetrics
