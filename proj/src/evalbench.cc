#include "regmetrics/evalbench.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <thread>

#include "regmetrics/errors.h"
#include "regmetrics/random.h"
#include "regmetrics/ransac.h"

namespace regmetrics {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool axis_changes_inputs(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kInlierRatio:
    case SweepAxis::kNoise:
    case SweepAxis::kDecimationUniform:
    case SweepAxis::kDecimationRandom:
    case SweepAxis::kHoles:
      return true;
    default:
      return false;
  }
}

NuisanceConfig nuisance_for(SweepAxis axis, double value, double hole_fraction,
                            std::uint64_t seed) {
  NuisanceConfig n;
  n.level = value;
  n.hole_fraction = hole_fraction;
  n.seed = seed;
  switch (axis) {
    case SweepAxis::kNoise: n.kind = Nuisance::kNoise; break;
    case SweepAxis::kDecimationUniform: n.kind = Nuisance::kDecimateUniform; break;
    case SweepAxis::kDecimationRandom: n.kind = Nuisance::kDecimateRandom; break;
    case SweepAxis::kHoles: n.kind = Nuisance::kHoles; break;
    default: n.kind = Nuisance::kNone; break;
  }
  return n;
}

void validate(const EvalConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorCode::kBadConfig, "trials must be >= 1");
  if (cfg.values.empty()) {
    throw Error(ErrorCode::kBadConfig, "sweep values must be non-empty");
  }
  if (cfg.metrics.empty()) {
    throw Error(ErrorCode::kBadConfig, "at least one metric is required");
  }
  if (!(cfg.d_rmse_pr > 0.0)) {
    throw Error(ErrorCode::kBadConfig, "d_rmse must be positive");
  }
  if (cfg.iterations < 1) {
    throw Error(ErrorCode::kBadConfig, "iterations must be >= 1");
  }
  for (double v : cfg.values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kBadConfig, "sweep values must be finite");
    }
    if (cfg.axis == SweepAxis::kIterations &&
        (v < 1.0 || v != std::round(v))) {
      throw Error(ErrorCode::kBadConfig, "iteration counts must be whole, >= 1");
    }
  }
}

}  // namespace

double rmse(const RigidTransform& estimate,
            std::span<const PointPair> gt_pairs) {
  if (gt_pairs.empty()) {
    throw Error(ErrorCode::kEmptyGroundTruth, "no ground-truth pairs");
  }
  double sum = 0.0;
  for (const PointPair& pair : gt_pairs) {
    sum += (estimate * pair.source - pair.target).norm();
  }
  return sum / static_cast<double>(gt_pairs.size());
}

std::vector<PointPair> ground_truth_pairs(const PointCloud& source,
                                          const RigidTransform& gt) {
  std::vector<PointPair> pairs;
  pairs.reserve(source.size());
  for (const Point3& p : source.points()) pairs.push_back({p, gt * p});
  return pairs;
}

std::vector<double> parse_sweep_values(std::string_view text) {
  auto number = [&](std::string_view token) {
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() ||
        !std::isfinite(value)) {
      throw Error(ErrorCode::kBadConfig,
                  "bad sweep value '" + std::string(token) + "'");
    }
    return value;
  };
  std::vector<double> values;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
      const std::size_t colon = text.find(':', start);
      parts.push_back(text.substr(start, colon - start));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3) {
      throw Error(ErrorCode::kBadConfig, "range must be first:last:step");
    }
    const double first = number(parts[0]);
    const double last = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || last < first) {
      throw Error(ErrorCode::kBadConfig, "range needs step > 0 and first <= last");
    }
    const auto count =
        static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      values.push_back(first + static_cast<double>(i) * step);
    }
    return values;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    values.push_back(number(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return values;
}

bool is_correct(double rmse_value, double d_rmse_pr, double pr) {
  return rmse_value < d_rmse_pr * pr;
}

std::string_view sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kT: return "t";
    case SweepAxis::kIterations: return "iterations";
    case SweepAxis::kDRmse: return "d_rmse";
    case SweepAxis::kInlierRatio: return "inlier_ratio";
    case SweepAxis::kNoise: return "noise";
    case SweepAxis::kDecimationUniform: return "decimation-uniform";
    case SweepAxis::kDecimationRandom: return "decimation-random";
    case SweepAxis::kHoles: return "holes";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (SweepAxis axis :
       {SweepAxis::kT, SweepAxis::kIterations, SweepAxis::kDRmse,
        SweepAxis::kInlierRatio, SweepAxis::kNoise,
        SweepAxis::kDecimationUniform, SweepAxis::kDecimationRandom,
        SweepAxis::kHoles}) {
    if (sweep_axis_name(axis) == name) return axis;
  }
  throw Error(ErrorCode::kBadConfig,
              "unknown sweep axis '" + std::string(name) + "'");
}

double accuracy_at(std::span<const TrialOutcome> outcomes, double d_rmse_pr) {
  if (outcomes.empty()) return 0.0;
  std::size_t correct = 0;
  for (const TrialOutcome& o : outcomes) {
    if (o.rmse_pr < d_rmse_pr) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

std::vector<ExperimentRow> run_experiment(
    const EvalConfig& cfg, const SceneConfig& scene_cfg,
    const CorrespondenceConfig& corr_cfg) {
  validate(cfg);
  std::vector<double> values = cfg.values;
  std::sort(values.begin(), values.end());

  const std::size_t n_metrics = cfg.metrics.size();
  const std::size_t n_values = values.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);
  const bool needs_index = std::any_of(
      cfg.metrics.begin(), cfg.metrics.end(),
      [](const MetricSetting& m) { return !is_correspondence_based(m.kind); });

  // outcomes[(metric * n_values + value) * n_trials + trial]
  std::vector<TrialOutcome> outcomes(n_metrics * n_values * n_trials);

  auto run_trial = [&](std::size_t trial) {
    const std::uint64_t base = 4 * static_cast<std::uint64_t>(trial);
    SceneConfig sc = scene_cfg;
    sc.seed = mix_seed(cfg.seed, base + 0);
    const ScenePair clean = generate_scene(sc);
    CorrespondenceConfig cc = corr_cfg;
    cc.seed = mix_seed(cfg.seed, base + 1);
    const std::uint64_t nuisance_seed = mix_seed(cfg.seed, base + 2);
    const std::uint64_t ransac_seed = mix_seed(cfg.seed, base + 3);

    std::optional<CorrespondenceSample> shared;
    if (!axis_changes_inputs(cfg.axis)) {
      shared = generate_correspondences(clean, cc);
    }

    for (std::size_t v = 0; v < n_values; ++v) {
      const double value = values[v];
      std::optional<ScenePair> varied;
      std::optional<CorrespondenceSample> own;
      if (axis_changes_inputs(cfg.axis)) {
        varied = apply_nuisance(
            clean, nuisance_for(cfg.axis, value, cfg.hole_fraction,
                                nuisance_seed));
        CorrespondenceConfig vc = cc;
        if (cfg.axis == SweepAxis::kInlierRatio) vc.inlier_ratio = value;
        own = generate_correspondences(*varied, vc);
      }
      const ScenePair& scene = varied ? *varied : clean;
      const CorrespondenceSet& corrs = own ? own->corrs : shared->corrs;

      std::unique_ptr<NeighborIndex> index;
      double index_time = 0.0;
      if (needs_index) {
        const auto start = Clock::now();
        index = std::make_unique<NeighborIndex>(scene.target);
        index_time = seconds_since(start);
      }

      for (std::size_t m = 0; m < n_metrics; ++m) {
        MetricSetting setting = cfg.metrics[m];
        if (cfg.axis == SweepAxis::kT) setting.t_pr = value;
        RansacConfig rc(setting.to_spec(scene.pr));
        rc.seed = ransac_seed;
        rc.iterations = cfg.axis == SweepAxis::kIterations
                            ? static_cast<int>(value)
                            : cfg.iterations;
        rc.source_resolution = scene.pr;
        const RegistrationResult result =
            run_ransac(rc, corrs, &scene.source, index.get());

        const double d_rmse =
            cfg.axis == SweepAxis::kDRmse ? value : cfg.d_rmse_pr;
        const double error = rmse(result.best_transform, scene.gt_pairs);
        TrialOutcome& out = outcomes[(m * n_values + v) * n_trials + trial];
        out.rmse_pr = error / scene.pr;
        out.correct = is_correct(error, d_rmse, scene.pr);
        out.best_iteration = result.best_iteration;
        out.eval_time_s = result.elapsed_eval_time.count();
        out.index_build_time_s =
            is_correspondence_based(setting.kind) ? 0.0 : index_time;
      }
    }
  };

  const int workers =
      std::clamp(cfg.threads, 1, static_cast<int>(n_trials));
  if (workers == 1) {
    for (std::size_t t = 0; t < n_trials; ++t) run_trial(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= n_trials || failed.load()) return;
            try {
              run_trial(t);
            } catch (...) {
              if (!failed.exchange(true)) failure = std::current_exception();
              return;
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<ExperimentRow> rows;
  rows.reserve(n_metrics * n_values);
  for (std::size_t m = 0; m < n_metrics; ++m) {
    for (std::size_t v = 0; v < n_values; ++v) {
      ExperimentRow row;
      row.metric = std::string(metric_name(cfg.metrics[m].kind));
      row.axis = cfg.axis;
      row.sweep_value = values[v];
      row.trials = cfg.trials;
      const auto first = outcomes.begin() +
                         static_cast<std::ptrdiff_t>((m * n_values + v) * n_trials);
      row.outcomes.assign(first, first + static_cast<std::ptrdiff_t>(n_trials));

      std::size_t correct = 0;
      double rmse_sum = 0.0;
      double eval_sum = 0.0;
      double index_sum = 0.0;
      for (const TrialOutcome& o : row.outcomes) {
        if (o.correct) {
          ++correct;
          rmse_sum += o.rmse_pr;
        }
        eval_sum += o.eval_time_s;
        index_sum += o.index_build_time_s;
      }
      const auto trials = static_cast<double>(n_trials);
      row.accuracy = static_cast<double>(correct) / trials;
      row.mean_rmse_pr = correct > 0
                             ? rmse_sum / static_cast<double>(correct)
                             : std::numeric_limits<double>::quiet_NaN();
      row.mean_eval_time_s = eval_sum / trials;
      row.index_build_time_s = index_sum / trials;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double time_metric_evaluation(const MetricSpec& spec,
                              std::span<const RigidTransform> hypotheses,
                              std::span<const Correspondence> corrs,
                              const PointCloud* source,
                              const NeighborIndex* target_index) {
  if (hypotheses.empty()) {
    throw Error(ErrorCode::kInvalidInput, "no hypotheses to time");
  }
  volatile double sink = 0.0;
  const auto start = Clock::now();
  for (const RigidTransform& h : hypotheses) {
    sink = sink + score_hypothesis(spec, h, corrs, source, target_index).value;
  }
  const double elapsed = seconds_since(start);
  (void)sink;
  return elapsed / static_cast<double>(hypotheses.size());
}

double time_index_build(const PointCloud& target) {
  const auto start = Clock::now();
  const NeighborIndex index(target);
  const double elapsed = seconds_since(start);
  (void)index.point_count();
  return elapsed;
}

}  // namespace regmetrics
