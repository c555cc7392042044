// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: regmetrics_acceptance [--criterion N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>

#include "cli_util.h"
#include "regmetrics/evalbench.h"
#include "regmetrics/ransac.h"
#include "regmetrics/synth.h"
#include "test_util.h"

namespace regmetrics {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += "[failed: " + what + "] ";
    }
  }
  void note(const std::string& text) { detail += text + " "; }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// 1. Scoring golden values.
Outcome criterion_1() {
  Outcome out;
  const auto start = Clock::now();
  auto s = [](MetricKind kind, double e) {
    return score_correspondence(MetricSpec(kind, 7.5, 0.9, 2.0, 1.0), e);
  };
  struct Golden {
    const char* name;
    MetricKind kind;
    double e;
    double expected;
    double tol;
  };
  const Golden cases[] = {
      {"mae(0)", MetricKind::kMae, 0.0, 1.0, 0.0},
      {"mae(3.75)", MetricKind::kMae, 3.75, 0.5, 0.0},
      {"mae(7.5)", MetricKind::kMae, 7.5, 0.0, 0.0},
      {"mae(10)", MetricKind::kMae, 10.0, 0.0, 0.0},
      {"mse(3.75)", MetricKind::kMse, 3.75, 0.25, 0.0},
      {"exp(0)", MetricKind::kExp, 0.0, 1.0, 0.0},
      {"exp(7.49999)", MetricKind::kExp, 7.49999, 0.60653, 1e-5},
      {"quantile(0)", MetricKind::kQuantile, 0.0, 0.9, 1e-15},
      {"quantile(15)", MetricKind::kQuantile, 15.0, 0.05, 1e-15},
      {"neg-quantile(15)", MetricKind::kNegQuantile, 15.0, -0.05, 1e-15},
      {"inlier-count(7.5)", MetricKind::kInlierCount, 7.5, 0.0, 0.0},
      {"inlier-count(7.4999)", MetricKind::kInlierCount, 7.4999, 1.0, 0.0},
      {"log-cosh(0)", MetricKind::kLogCosh, 0.0, 1.0, 0.0},
      {"log-cosh(3.75)", MetricKind::kLogCosh, 3.75, 0.4491, 1e-3},
      {"log-cosh(7.5)", MetricKind::kLogCosh, 7.5, 0.0, 0.0},
  };
  int passed = 0;
  for (const Golden& g : cases) {
    const double v = s(g.kind, g.e);
    const bool ok = near(v, g.expected, g.tol);
    out.require(ok, std::string(g.name) + "=" + fmt(v, 17));
    passed += ok;
  }
  const double secs = elapsed(start);
  out.require(secs < 1.0, "runtime");
  out.note(std::to_string(passed) + "/" + std::to_string(std::size(cases)) +
           " golden values, log-cosh(3.75)=" + fmt(s(MetricKind::kLogCosh, 3.75), 10) +
           ", " + fmt(secs, 3) + " s");
  return out;
}

// 2. "Not all inliers are equal".
Outcome criterion_2() {
  Outcome out;
  const auto start = Clock::now();
  Rng rng(20240601);
  int preferred[6] = {};
  int count_ties = 0;
  constexpr int kCases = 1000;
  for (int i = 0; i < kCases; ++i) {
    const double t = rng.uniform(1.0, 20.0);
    const std::size_t inliers = 3 + rng.uniform_index(50);
    const std::size_t outliers = rng.uniform_index(200);
    const testing::DiscriminationCase c =
        testing::make_discrimination_case(rng, t, inliers, outliers);
    const double pr = rng.uniform(0.2, 2.0);
    int k = 0;
    for (MetricKind kind : kProposedMetricKinds) {
      const MetricSpec spec(kind, t, 0.9, 1.0, pr);
      if (evaluate_hypothesis(spec, c.accurate, c.corrs).value >
          evaluate_hypothesis(spec, c.coarse, c.corrs).value) {
        ++preferred[k];
      }
      ++k;
    }
    const MetricSpec count(MetricKind::kInlierCount, t, 0.9, 1.0, pr);
    if (evaluate_hypothesis(count, c.accurate, c.corrs).value ==
        evaluate_hypothesis(count, c.coarse, c.corrs).value) {
      ++count_ties;
    }
  }
  int k = 0;
  for (MetricKind kind : kProposedMetricKinds) {
    out.require(preferred[k] == kCases, std::string(metric_name(kind)));
    out.note(std::string(metric_name(kind)) + "=" + std::to_string(preferred[k]) + "/1000");
    ++k;
  }
  out.require(count_ties == kCases, "inlier-count ties");
  const double secs = elapsed(start);
  out.require(secs < 5.0, "runtime");
  out.note("inlier-count ties=" + std::to_string(count_ties) + "/1000, " + fmt(secs, 3) + " s");
  return out;
}

EvalConfig suite_config(std::vector<MetricKind> kinds, double d_rmse_pr) {
  EvalConfig cfg;
  cfg.trials = 100;
  cfg.iterations = 1000;
  cfg.seed = 7;
  cfg.d_rmse_pr = d_rmse_pr;
  for (MetricKind kind : kinds) cfg.metrics.push_back({kind});
  cfg.axis = SweepAxis::kT;
  cfg.values = {kDefaultInlierThresholdPr};
  return cfg;
}

CorrespondenceConfig suite_corrs(double sigma_pr) {
  CorrespondenceConfig c;
  c.n_correspondences = 1000;
  c.inlier_ratio = 0.1;
  c.inlier_sigma_pr = sigma_pr;
  return c;
}

// Probability that 1000 uniform 3-samples from 1000 correspondences with
// 100 inliers contain at least one all-inlier sample.
double all_inlier_sample_ceiling() {
  const double p = (100.0 * 99.0 * 98.0) / (1000.0 * 999.0 * 998.0);
  return 1.0 - std::pow(1.0 - p, 1000.0);
}

// 3. Exact recovery.
Outcome criterion_3() {
  Outcome out;
  const auto start = Clock::now();
  std::vector<MetricKind> kinds(std::begin(kProposedMetricKinds), std::end(kProposedMetricKinds));
  kinds.push_back(MetricKind::kInlierCount);
  const auto rows = run_experiment(suite_config(kinds, 2.5), SceneConfig{}, suite_corrs(0.0));
  for (const ExperimentRow& row : rows) {
    out.require(row.accuracy == 1.0, row.metric);
    out.note(row.metric + "=" + fmt(row.accuracy));
  }
  const double secs = elapsed(start);
  out.require(secs < 60.0, "runtime");
  out.note("(all-inlier-sample ceiling " + fmt(all_inlier_sample_ceiling()) + "), " +
           fmt(secs, 3) + " s");
  return out;
}

// 4. Small d_rmse advantage.
Outcome criterion_4() {
  Outcome out;
  const auto start = Clock::now();
  const auto rows = run_experiment(
      suite_config({MetricKind::kMae, MetricKind::kMse, MetricKind::kLogCosh,
                    MetricKind::kInlierCount},
                   1.0),
      SceneConfig{}, suite_corrs(1.0));
  const double count = rows.back().accuracy;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    out.require(rows[i].accuracy >= count + 0.10 - 1e-12, rows[i].metric);
    out.note(rows[i].metric + "=" + fmt(rows[i].accuracy));
  }
  const double secs = elapsed(start);
  out.require(secs < 120.0, "runtime");
  out.note("inlier-count=" + fmt(count) + ", " + fmt(secs, 3) + " s");
  return out;
}

// 5. Robustness to t.
Outcome criterion_5() {
  Outcome out;
  const auto start = Clock::now();
  EvalConfig cfg = suite_config({MetricKind::kMae, MetricKind::kInlierCount}, kDefaultDRmsePr);
  cfg.values = parse_sweep_values("4:15:1");
  const auto rows = run_experiment(cfg, SceneConfig{}, suite_corrs(1.0));
  auto spread = [&](const std::string& metric) {
    double lo = 1.0, hi = 0.0;
    for (const ExperimentRow& row : rows) {
      if (row.metric != metric) continue;
      lo = std::min(lo, row.accuracy);
      hi = std::max(hi, row.accuracy);
    }
    return hi - lo;
  };
  const double mae = spread("mae");
  const double count = spread("inlier-count");
  out.require(mae <= 0.05 + 1e-12, "mae spread");
  out.require(count >= 2.0 * mae && count > 0.0, "inlier-count spread");
  std::string curve;
  for (const ExperimentRow& row : rows) curve += fmt(row.accuracy, 2) + " ";
  const double secs = elapsed(start);
  out.require(secs < 600.0, "runtime");
  out.note("mae spread=" + fmt(mae) + " inlier-count spread=" + fmt(count) +
           " (accuracy by t: " + curve + "), " + fmt(secs, 3) + " s");
  return out;
}

// 6. Timing separation.
Outcome criterion_6() {
  Outcome out;
  const auto start = Clock::now();
  SceneConfig sc;
  sc.seed = 11;
  const ScenePair scene = generate_scene(sc);
  CorrespondenceConfig cc = suite_corrs(0.0);
  cc.seed = 12;
  const CorrespondenceSet corrs = generate_correspondences(scene, cc).corrs;
  Rng rng(13);
  std::vector<RigidTransform> hyps;
  for (int i = 0; i < 100; ++i) hyps.push_back(testing::random_transform(rng, 50.0));
  const NeighborIndex index(scene.target);
  const MetricSpec mae = MetricSpec::from_pr_units(MetricKind::kMae, scene.pr);
  const MetricSpec pc = mae.with_kind(MetricKind::kPcDist);
  double t_mae = 1e300;
  double t_pc = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    t_mae = std::min(t_mae, time_metric_evaluation(mae, hyps, corrs));
    t_pc = std::min(t_pc, time_metric_evaluation(pc, std::span(hyps).first(20), corrs,
                                                 &scene.source, &index));
  }
  const double ratio = t_pc / t_mae;
  out.require(ratio >= 100.0, "ratio");
  const double secs = elapsed(start);
  out.require(secs < 60.0, "runtime");
  out.note("mae=" + fmt(t_mae * 1e6) + " us/hyp pc-dist=" + fmt(t_pc * 1e6) +
           " us/hyp ratio=" + fmt(ratio) + ", " + fmt(secs, 3) + " s");
  return out;
}

// 7. Oracle equivalence.
Outcome criterion_7() {
  Outcome out;
  const auto start = Clock::now();
  Rng rng(70);
  std::size_t mismatches = 0;
  std::size_t queries = 0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 1 + rng.uniform_index(2000);
    std::vector<Point3> pts = testing::random_points(rng, n);
    if (c % 10 == 0) {
      for (Point3& p : pts) p = p.array().round();  // ties and duplicates
    }
    const NeighborIndex index(pts);
    for (int q = 0; q < 100; ++q) {
      const Point3 query = testing::random_point(rng, 12.0);
      const std::vector<Neighbor> all = testing::scan_sorted(pts, query);
      const Neighbor nn = index.nearest(query);
      mismatches += nn.index != all[0].index || nn.distance != all[0].distance;
      const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(n, 16));
      const std::vector<Neighbor> got = index.knn(query, k);
      for (std::size_t j = 0; j < k; ++j) {
        mismatches += got[j].index != all[j].index || got[j].distance != all[j].distance;
      }
      ++queries;
    }
  }
  out.require(mismatches == 0, "index");

  int rmse_bad = 0, eval_bad = 0, res_bad = 0;
  for (int c = 0; c < 100; ++c) {
    const RigidTransform est = testing::random_transform(rng);
    std::vector<PointPair> pairs;
    CorrespondenceSet corrs;
    for (int j = 0; j < 100; ++j) {
      pairs.push_back({testing::random_point(rng), testing::random_point(rng)});
      corrs.push_back({pairs.back().source, pairs.back().target});
    }
    double sum = 0.0;
    for (const PointPair& p : pairs) sum += (est * p.source - p.target).norm();
    rmse_bad += !near(rmse(est, pairs), sum / 100.0, 1e-12 * std::max(1.0, sum));
    for (MetricKind kind : kAllMetricKinds) {
      if (!is_correspondence_based(kind)) continue;
      const MetricSpec spec(kind, 8.0, 0.9, 2.0, 1.0);
      double total = 0.0;
      for (const Correspondence& x : corrs) {
        total += score_correspondence(spec, (est * x.source - x.target).norm());
      }
      eval_bad += evaluate_hypothesis(spec, est, corrs).value != total;
    }
    const std::vector<Point3> pts = testing::random_points(rng, 2 + rng.uniform_index(500));
    res_bad += cloud_resolution(PointCloud(pts)) != testing::brute_force_resolution(pts);
  }
  out.require(rmse_bad == 0, "rmse");
  out.require(eval_bad == 0, "evaluate_hypothesis");
  out.require(res_bad == 0, "cloud_resolution");
  const double secs = elapsed(start);
  out.require(secs < 30.0, "runtime");
  out.note("index mismatches " + std::to_string(mismatches) + " over " + std::to_string(queries) +
           " queries; rmse/eval/resolution mismatches " + std::to_string(rmse_bad) + "/" +
           std::to_string(eval_bad) + "/" + std::to_string(res_bad) + ", " + fmt(secs, 3) + " s");
  return out;
}

// 8. CLI determinism.
Outcome criterion_8() {
  Outcome out;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "regmetrics_acceptance_8";
  fs::create_directories(dir);
  const std::string invocations[] = {
      "bench --metrics mae,mse,log-cosh,exp,quantile,neg-quantile,huber,inlier-count "
      "--sweep t --values 4:8:2 --trials 5 --n-points 2000 --seed 3",
      "bench --metrics mae,pc-dist,overlap-count --sweep holes --values 0,2 --trials 3 "
      "--n-points 2000 --iterations 200 --seed 4",
      "bench --metrics mae,inlier-count --sweep decimation-random --values 0.5,1 --trials 4 "
      "--n-points 2000 --sigma 1 --seed 5 --threads 2",
  };
  int identical = 0;
  for (const std::string& args : invocations) {
    const int a = testing::run_cli(args + " --out " + (dir / "a.csv").string()).exit_code;
    const int b = testing::run_cli(args + " --out " + (dir / "b.csv").string()).exit_code;
    const bool same = a == 0 && b == 0 &&
                      testing::strip_timing(dir / "a.csv") == testing::strip_timing(dir / "b.csv");
    out.require(same, args);
    identical += same;
  }
  fs::remove_all(dir);
  out.note(std::to_string(identical) + "/" + std::to_string(std::size(invocations)) +
           " invocations byte-identical modulo timing columns");
  return out;
}

// 9. Property suites.
Outcome criterion_9() {
  Outcome out;
  const auto start = Clock::now();
  Rng rng(90);
  constexpr int kCases = 1000;

  int mono_bad = 0;
  for (int i = 0; i < kCases; ++i) {
    const double t = rng.uniform(0.5, 20.0);
    const double pr = rng.uniform(0.1, 2.0);
    const double m = rng.uniform(0.05, 0.95);
    for (MetricKind kind : {MetricKind::kMae, MetricKind::kMse, MetricKind::kLogCosh,
                            MetricKind::kExp, MetricKind::kQuantile}) {
      const MetricSpec spec(kind, t, m, 1.0, pr);
      const double hi = kind == MetricKind::kQuantile ? m : 1.0;
      double prev = score_correspondence(spec, 0.0);
      mono_bad += !(prev > 0.0 && prev <= hi);
      for (int k = 1; k < 100; ++k) {
        const double cur = score_correspondence(spec, t * k / 100.0);
        mono_bad += !(cur < prev && cur > 0.0 && cur <= hi);
        prev = cur;
      }
      const double far = score_correspondence(spec, t + rng.uniform(0.0, 100.0));
      if (kind == MetricKind::kQuantile) mono_bad += !(far >= 0.0 && far < 1.0 - m);
      else mono_bad += far != 0.0;
    }
  }
  out.require(mono_bad == 0, "monotonicity/bounds");

  int outlier_bad = 0;
  for (int i = 0; i < kCases; ++i) {
    const double t = rng.uniform(1.0, 10.0);
    const testing::DiscriminationCase c = testing::make_discrimination_case(rng, t, 10, 20);
    CorrespondenceSet moved = c.corrs;
    for (std::size_t j = c.inliers; j < moved.size(); ++j) {
      const Point3 predicted = c.coarse * moved[j].source;
      moved[j].target = predicted + (moved[j].target - predicted) * rng.uniform(1.0, 10.0);
    }
    for (MetricKind kind : {MetricKind::kMae, MetricKind::kMse, MetricKind::kLogCosh,
                            MetricKind::kExp}) {
      const MetricSpec spec(kind, t, 0.9, 1.0, 0.5);
      outlier_bad += evaluate_hypothesis(spec, c.coarse, c.corrs).value !=
                     evaluate_hypothesis(spec, c.coarse, moved).value;
    }
  }
  out.require(outlier_bad == 0, "outlier insensitivity");

  int scale_bad = 0;
  for (int i = 0; i < kCases; ++i) {
    const double lambda = std::exp(rng.uniform(-3.0, 3.0));
    const double t = rng.uniform(1.0, 10.0);
    const double pr = rng.uniform(0.2, 1.5);
    std::vector<Point3> src = testing::random_points(rng, 30, 5.0);
    std::vector<Point3> tgt = testing::random_points(rng, 30, 5.0);
    CorrespondenceSet corrs, scaled;
    std::vector<Point3> src_s, tgt_s;
    for (int j = 0; j < 30; ++j) {
      corrs.push_back({src[j], tgt[j]});
      scaled.push_back({lambda * src[j], lambda * tgt[j]});
      src_s.push_back(lambda * src[j]);
      tgt_s.push_back(lambda * tgt[j]);
    }
    const PointCloud source(src), target(tgt), source_s(src_s), target_s(tgt_s);
    const NeighborIndex index(target), index_s(target_s);
    std::vector<RigidTransform> hyps, hyps_s;
    for (int h = 0; h < 6; ++h) {
      hyps.push_back(testing::random_transform(rng, 2.0));
      hyps_s.emplace_back(hyps.back().rotation(), lambda * hyps.back().translation());
    }
    for (MetricKind kind : kAllMetricKinds) {
      const MetricSpec spec(kind, t, 0.9, 1.0, pr);
      const MetricSpec spec_s(kind, lambda * t, 0.9, lambda, lambda * pr);
      const bool value_level = kind != MetricKind::kHuber && kind != MetricKind::kPcDist &&
                               kind != MetricKind::kOverlapCount;
      std::size_t best = 0, best_s = 0;
      double bv = -1e300, bsv = -1e300;
      for (std::size_t h = 0; h < hyps.size(); ++h) {
        const double v = score_hypothesis(spec, hyps[h], corrs, &source, &index).value;
        const double sv = score_hypothesis(spec_s, hyps_s[h], scaled, &source_s, &index_s).value;
        if (value_level) scale_bad += !near(v, sv, 1e-9 * std::max(1.0, std::abs(v)));
        if (v > bv) { bv = v; best = h; }
        if (sv > bsv) { bsv = sv; best_s = h; }
      }
      if (kind != MetricKind::kOverlapCount) scale_bad += best != best_s;
    }
  }
  out.require(scale_bad == 0, "scale invariance");

  int so3_bad = 0;
  int so3_checked = 0;
  for (int i = 0; i < kCases; ++i) {
    std::vector<PointPair> pairs;
    const RigidTransform gt = testing::random_transform(rng);
    const double noise = rng.uniform(0.0, 2.0);
    for (int j = 0; j < 3 + static_cast<int>(rng.uniform_index(20)); ++j) {
      const Point3 s = testing::random_point(rng);
      pairs.push_back({s, gt * s + noise * testing::random_point(rng, 1.0)});
    }
    if (is_degenerate_sample(pairs, 0.0)) continue;
    so3_bad += !is_rotation(estimate_rigid_transform(pairs).rotation(), 1e-9);
    ++so3_checked;
  }
  // Hypotheses generated inside RANSAC.
  SceneConfig sc;
  sc.n_points = 2000;
  sc.seed = 91;
  const ScenePair scene = generate_scene(sc);
  CorrespondenceConfig cc;
  cc.n_correspondences = 200;
  cc.inlier_sigma_pr = 1.0;
  const CorrespondenceSet corrs = generate_correspondences(scene, cc).corrs;
  RansacConfig rc(MetricSpec::from_pr_units(MetricKind::kMae, scene.pr));
  rc.iterations = 1000;
  rc.record_trace = true;
  for (const RigidTransform& h : run_ransac(rc, corrs).trace) {
    so3_bad += !is_rotation(h.rotation(), 1e-9);
    ++so3_checked;
  }
  out.require(so3_checked >= kCases && so3_bad == 0, "SO(3)");
  out.note("violations: monotonicity/bounds " + std::to_string(mono_bad) + ", outliers " +
           std::to_string(outlier_bad) + ", scale " + std::to_string(scale_bad) + ", SO(3) " +
           std::to_string(so3_bad) + "/" + std::to_string(so3_checked) + "; " +
           std::to_string(kCases) + " cases each, " + fmt(elapsed(start), 3) + " s");
  return out;
}

}  // namespace
}  // namespace regmetrics

int main(int argc, char** argv) {
  using regmetrics::Outcome;
  const std::function<Outcome()> criteria[] = {
      regmetrics::criterion_1, regmetrics::criterion_2, regmetrics::criterion_3,
      regmetrics::criterion_4, regmetrics::criterion_5, regmetrics::criterion_6,
      regmetrics::criterion_7, regmetrics::criterion_8, regmetrics::criterion_9,
  };
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);
  }
  if (only < 0 || only > 9) {
    std::fprintf(stderr, "usage: %s [--criterion 1..9]\n", argv[0]);
    return 2;
  }
  int failures = 0;
  for (int n = 1; n <= 9; ++n) {
    if (only != 0 && n != only) continue;
    Outcome o;
    try {
      o = criteria[n - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
