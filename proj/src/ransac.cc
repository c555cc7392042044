#include "regmetrics/ransac.h"

#include <algorithm>
#include <limits>
#include <string>
#include <thread>

#include "regmetrics/errors.h"

namespace regmetrics {
namespace {

using Clock = std::chrono::steady_clock;

SampleIndices draw_three(std::size_t n, Rng& rng) {
  std::size_t i = rng.uniform_index(n);
  std::size_t j = rng.uniform_index(n - 1);
  if (j >= i) ++j;
  std::size_t k = rng.uniform_index(n - 2);
  const std::size_t lo = std::min(i, j);
  const std::size_t hi = std::max(i, j);
  if (k >= lo) ++k;
  if (k >= hi) ++k;
  return {i, j, k};
}

struct Best {
  double score;
  int iteration;
};

// Max score, then earliest iteration.
bool better(const Best& a, const Best& b) {
  return a.score > b.score || (a.score == b.score && a.iteration < b.iteration);
}

}  // namespace

SampleIndices sample_minimal(std::span<const Correspondence> corrs, Rng& rng,
                             double min_triangle_area,
                             int degeneracy_retries) {
  if (corrs.size() < 3) {
    throw Error(ErrorCode::kTooFewCorrespondences,
                "need at least 3 correspondences, got " +
                    std::to_string(corrs.size()));
  }
  for (int attempt = 0; attempt <= degeneracy_retries; ++attempt) {
    const SampleIndices s = draw_three(corrs.size(), rng);
    const std::array<PointPair, 3> pairs{{
        {corrs[s[0]].source, corrs[s[0]].target},
        {corrs[s[1]].source, corrs[s[1]].target},
        {corrs[s[2]].source, corrs[s[2]].target},
    }};
    if (!is_degenerate_sample(pairs, min_triangle_area)) return s;
  }
  throw Error(ErrorCode::kPersistentDegeneracy,
              "no non-collinear sample after " +
                  std::to_string(degeneracy_retries) + " retries");
}

HypothesisScore score_hypothesis(const MetricSpec& spec,
                                 const RigidTransform& transform,
                                 std::span<const Correspondence> corrs,
                                 const PointCloud* source,
                                 const NeighborIndex* target_index) {
  if (is_correspondence_based(spec.kind())) {
    return evaluate_hypothesis(spec, transform, corrs);
  }
  if (source == nullptr || target_index == nullptr) {
    throw Error(ErrorCode::kMissingClouds,
                std::string(metric_name(spec.kind())) +
                    " needs a source cloud and a target index");
  }
  return evaluate_hypothesis_cloud(spec, transform, *source, *target_index);
}

RegistrationResult run_ransac(const RansacConfig& config,
                              std::span<const Correspondence> corrs,
                              const PointCloud* source,
                              const NeighborIndex* target_index) {
  const auto total_start = Clock::now();
  if (config.iterations < 1) {
    throw Error(ErrorCode::kBadConfig, "iterations must be at least 1");
  }
  if (config.sample_size != 3) {
    throw Error(ErrorCode::kBadConfig, "only 3-point samples are supported");
  }
  if (config.degeneracy_retries < 0) {
    throw Error(ErrorCode::kBadConfig, "degeneracy_retries must be >= 0");
  }
  if (corrs.size() < 3) {
    throw Error(ErrorCode::kTooFewCorrespondences,
                "need at least 3 correspondences, got " +
                    std::to_string(corrs.size()));
  }
  if (!is_correspondence_based(config.metric.kind()) &&
      (source == nullptr || target_index == nullptr)) {
    throw Error(ErrorCode::kMissingClouds,
                std::string(metric_name(config.metric.kind())) +
                    " needs a source cloud and a target index");
  }

  const double min_area = collinearity_epsilon(
      config.source_resolution.value_or(config.metric.pr()));

  // Generation is sequential so the sample sequence depends only on the seed.
  Rng rng(config.seed);
  std::vector<RigidTransform> hypotheses;
  hypotheses.reserve(static_cast<std::size_t>(config.iterations));
  for (int it = 0; it < config.iterations; ++it) {
    const SampleIndices s =
        sample_minimal(corrs, rng, min_area, config.degeneracy_retries);
    const std::array<PointPair, 3> pairs{{
        {corrs[s[0]].source, corrs[s[0]].target},
        {corrs[s[1]].source, corrs[s[1]].target},
        {corrs[s[2]].source, corrs[s[2]].target},
    }};
    hypotheses.push_back(estimate_rigid_transform(pairs, min_area));
  }

  const auto eval_start = Clock::now();
  const int workers = std::clamp(config.threads, 1, config.iterations);
  std::vector<Best> partial(static_cast<std::size_t>(workers),
                            Best{-std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<int>::max()});
  auto evaluate_range = [&](int worker) {
    // Contiguous blocks; each worker keeps its own best.
    const int begin = config.iterations * worker / workers;
    const int end = config.iterations * (worker + 1) / workers;
    Best best = partial[static_cast<std::size_t>(worker)];
    for (int it = begin; it < end; ++it) {
      const double value =
          score_hypothesis(config.metric,
                           hypotheses[static_cast<std::size_t>(it)], corrs,
                           source, target_index)
              .value;
      const Best candidate{value, it};
      if (best.iteration == std::numeric_limits<int>::max() ||
          better(candidate, best)) {
        best = candidate;
      }
    }
    partial[static_cast<std::size_t>(worker)] = best;
  };
  if (workers == 1) {
    evaluate_range(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(evaluate_range, w);
  }
  Best best = partial[0];
  for (const Best& b : partial) {
    if (better(b, best)) best = b;
  }
  const auto eval_end = Clock::now();

  RegistrationResult result;
  result.best_transform = hypotheses[static_cast<std::size_t>(best.iteration)];
  result.best_score = {best.score, config.metric.kind()};
  result.best_iteration = best.iteration;
  result.hypotheses_evaluated = config.iterations;
  result.elapsed_eval_time = eval_end - eval_start;
  if (config.record_trace) result.trace = std::move(hypotheses);
  result.elapsed_total_time = Clock::now() - total_start;
  return result;
}

}  // namespace regmetrics
