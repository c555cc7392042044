// Command-line front end: register, bench, synth, info.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regmetrics/cloud_io.h"
#include "regmetrics/errors.h"
#include "regmetrics/evalbench.h"
#include "regmetrics/metrics.h"
#include "regmetrics/neighbor_index.h"
#include "regmetrics/ransac.h"
#include "regmetrics/report.h"
#include "regmetrics/synth.h"

namespace fs = std::filesystem;
using namespace regmetrics;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct MetricOptions {
  double t_pr = kDefaultInlierThresholdPr;
  double m = kDefaultQuantileWeight;
  double t_overlap_pr = kDefaultOverlapThresholdPr;
};

void add_metric_options(CLI::App* cmd, MetricOptions& opts) {
  cmd->add_option("--t", opts.t_pr, "Inlier threshold t, in pr")
      ->capture_default_str();
  cmd->add_option("--m", opts.m, "Quantile weight m, in (0,1)")
      ->capture_default_str();
  cmd->add_option("--t-overlap", opts.t_overlap_pr,
                  "Overlap threshold for overlap-count, in pr")
      ->capture_default_str();
}

CloudFormat resolve_format(const std::string& flag, const fs::path& path) {
  return flag.empty() ? format_from_extension(path) : parse_cloud_format(flag);
}

SceneShape parse_shape(const std::string& name) {
  if (name == "blob") return SceneShape::kRandomBlob;
  if (name == "lattice") return SceneShape::kLattice;
  if (name == "file") return SceneShape::kFile;
  throw Error(ErrorCode::kBadConfig, "unknown shape '" + name + "'");
}

std::string g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct SceneOptions {
  int n_points = 10000;
  std::string shape = "blob";
  std::string cloud;
  double diameter = 100.0;
  double rotation_deg = 45.0;
  double translation = 50.0;
  int n_corrs = 1000;
  double inlier_ratio = 0.1;
  double sigma_pr = 0.0;
};

void add_scene_options(CLI::App* cmd, SceneOptions& opts) {
  cmd->add_option("--n-points", opts.n_points, "Synthetic cloud size")
      ->capture_default_str();
  cmd->add_option("--shape", opts.shape, "blob | lattice | file")
      ->capture_default_str();
  cmd->add_option("--cloud", opts.cloud, "Cloud file for --shape file");
  cmd->add_option("--diameter", opts.diameter, "Blob diameter, world units")
      ->capture_default_str();
  cmd->add_option("--rotation-deg", opts.rotation_deg,
                  "Ground-truth rotation angle, degrees")
      ->capture_default_str();
  cmd->add_option("--translation", opts.translation,
                  "Ground-truth translation magnitude, world units")
      ->capture_default_str();
  cmd->add_option("--n-corrs", opts.n_corrs, "Correspondences per pair")
      ->capture_default_str();
  cmd->add_option("--inlier-ratio", opts.inlier_ratio, "Inlier ratio in (0,1]")
      ->capture_default_str();
  cmd->add_option("--sigma", opts.sigma_pr, "Inlier noise std-dev, in pr")
      ->capture_default_str();
}

SceneConfig scene_config(const SceneOptions& opts) {
  SceneConfig sc;
  sc.n_points = opts.n_points;
  sc.shape = parse_shape(opts.shape);
  sc.diameter = opts.diameter;
  sc.gt_rotation_angle = opts.rotation_deg * 3.14159265358979323846 / 180.0;
  sc.gt_translation_magnitude = opts.translation;
  if (sc.shape == SceneShape::kFile) {
    if (opts.cloud.empty()) {
      throw Error(ErrorCode::kBadConfig, "--shape file needs --cloud");
    }
    sc.file_cloud =
        parse_cloud_file(opts.cloud, format_from_extension(opts.cloud));
  }
  return sc;
}

CorrespondenceConfig correspondence_config(const SceneOptions& opts) {
  CorrespondenceConfig cc;
  cc.n_correspondences = opts.n_corrs;
  cc.inlier_ratio = opts.inlier_ratio;
  cc.inlier_sigma_pr = opts.sigma_pr;
  return cc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RANSAC hypothesis-evaluation metrics for 3D rigid registration"};
  app.require_subcommand(1);

  // register
  auto* reg = app.add_subcommand("register", "Register one cloud pair");
  std::string reg_source, reg_target, reg_format, reg_corrs, reg_gt;
  std::string reg_metric = "mae";
  MetricOptions reg_metric_opts;
  int reg_iterations = 1000;
  std::uint64_t reg_seed = 0;
  double reg_d_rmse = kDefaultDRmsePr;
  int reg_threads = 1;
  reg->add_option("--source", reg_source, "Source cloud")->required();
  reg->add_option("--target", reg_target, "Target cloud")->required();
  reg->add_option("--format", reg_format, "xyz | ply (default: by extension)");
  reg->add_option("--corrs", reg_corrs,
                  "Correspondence file 'sx sy sz tx ty tz' per line "
                  "(default: pair points by index)");
  reg->add_option("--gt", reg_gt,
                  "Ground-truth transform file (3x4 or 4x4) or 'identity'");
  reg->add_option("--metric", reg_metric, "Metric name")->capture_default_str();
  add_metric_options(reg, reg_metric_opts);
  reg->add_option("--iterations", reg_iterations, "RANSAC iterations")
      ->capture_default_str();
  reg->add_option("--seed", reg_seed, "RNG seed")->capture_default_str();
  reg->add_option("--d-rmse", reg_d_rmse, "Correctness threshold, in pr")
      ->capture_default_str();
  reg->add_option("--threads", reg_threads, "Evaluation workers")
      ->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Run a metric-comparison sweep");
  std::string bench_metrics = "mae,inlier-count";
  std::string bench_sweep = "t";
  std::string bench_values;
  std::string bench_out;
  int bench_trials = 100;
  std::uint64_t bench_seed = 0;
  int bench_iterations = 1000;
  double bench_d_rmse = kDefaultDRmsePr;
  double bench_hole_fraction = kDefaultHoleFraction;
  int bench_threads = 1;
  MetricOptions bench_metric_opts;
  SceneOptions bench_scene;
  bench->add_option("--metrics", bench_metrics, "Comma-separated metric names")
      ->capture_default_str();
  bench->add_option("--sweep", bench_sweep,
                    "t | iterations | d_rmse | inlier_ratio | noise | "
                    "decimation-uniform | decimation-random | holes")
      ->capture_default_str();
  bench->add_option("--values", bench_values, "first:last:step or v1,v2,...")
      ->required();
  bench->add_option("--trials", bench_trials, "Trials per configuration")
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "Base seed")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV report path")->required();
  bench->add_option("--iterations", bench_iterations, "RANSAC iterations")
      ->capture_default_str();
  bench->add_option("--d-rmse", bench_d_rmse, "Correctness threshold, in pr")
      ->capture_default_str();
  bench->add_option("--hole-fraction", bench_hole_fraction,
                    "Fraction of the cloud removed per hole")
      ->capture_default_str();
  bench->add_option("--threads", bench_threads, "Parallel trials")
      ->capture_default_str();
  add_metric_options(bench, bench_metric_opts);
  add_scene_options(bench, bench_scene);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic scene to files");
  std::string synth_dir;
  std::string synth_format = "xyz";
  std::uint64_t synth_seed = 0;
  SceneOptions synth_scene;
  synth->add_option("--out-dir", synth_dir, "Output directory")->required();
  synth->add_option("--format", synth_format, "xyz | ply")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();
  add_scene_options(synth, synth_scene);

  // info
  auto* info = app.add_subcommand("info", "Print cloud statistics and pr");
  std::string info_path, info_format;
  info->add_option("cloud", info_path, "Cloud file")->required();
  info->add_option("--format", info_format, "xyz | ply (default: by extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*reg) {
      const PointCloud source = parse_cloud_file(
          reg_source, resolve_format(reg_format, reg_source));
      const PointCloud target = PointCloud::with_resolution(
          parse_cloud_file(reg_target, resolve_format(reg_format, reg_target))
              .points());
      const double pr = target.resolution();
      const CorrespondenceSet corrs = reg_corrs.empty()
                                          ? pair_by_index(source, target)
                                          : parse_correspondence_file(reg_corrs);
      const MetricSpec spec = MetricSpec::from_pr_units(
          parse_metric_kind(reg_metric), pr, reg_metric_opts.t_pr,
          reg_metric_opts.m, reg_metric_opts.t_overlap_pr);
      RansacConfig rc(spec);
      rc.iterations = reg_iterations;
      rc.seed = reg_seed;
      rc.threads = reg_threads;
      std::optional<NeighborIndex> index;
      if (!is_correspondence_based(spec.kind())) index.emplace(target);
      const RegistrationResult result =
          run_ransac(rc, corrs, &source, index ? &*index : nullptr);

      std::cout << "transform:\n";
      write_transform(std::cout, result.best_transform);
      std::cout << "metric: " << metric_name(spec.kind()) << '\n'
                << "score: " << g(result.best_score.value) << '\n'
                << "best_iteration: " << result.best_iteration << '\n'
                << "pr: " << g(pr) << '\n';
      if (!reg_gt.empty()) {
        const RigidTransform gt = reg_gt == "identity"
                                      ? RigidTransform::identity()
                                      : parse_transform_file(reg_gt);
        const double error =
            rmse(result.best_transform, ground_truth_pairs(source, gt));
        std::cout << "rmse: " << g(error) << '\n'
                  << "rmse_pr: " << g(error / pr) << '\n'
                  << "correct: "
                  << (is_correct(error, reg_d_rmse, pr) ? "yes" : "no") << '\n';
      }
      return 0;
    }

    if (*bench) {
      EvalConfig cfg;
      cfg.d_rmse_pr = bench_d_rmse;
      cfg.trials = bench_trials;
      cfg.axis = parse_sweep_axis(bench_sweep);
      cfg.values = parse_sweep_values(bench_values);
      cfg.seed = bench_seed;
      cfg.iterations = bench_iterations;
      cfg.hole_fraction = bench_hole_fraction;
      cfg.threads = bench_threads;
      std::stringstream names(bench_metrics);
      for (std::string name; std::getline(names, name, ',');) {
        MetricSetting setting;
        setting.kind = parse_metric_kind(name);
        setting.t_pr = bench_metric_opts.t_pr;
        setting.m = bench_metric_opts.m;
        setting.t_overlap_pr = bench_metric_opts.t_overlap_pr;
        // Fail fast on invalid parameters before the sweep starts.
        (void)setting.to_spec(1.0);
        cfg.metrics.push_back(setting);
      }
      const auto rows = run_experiment(cfg, scene_config(bench_scene),
                                       correspondence_config(bench_scene));
      std::ofstream out(bench_out);
      if (!out) {
        throw Error(ErrorCode::kIoError, "cannot write '" + bench_out + "'");
      }
      write_report_csv(out, rows);
      std::cerr << "wrote " << rows.size() << " rows to " << bench_out << '\n';
      return 0;
    }

    if (*synth) {
      SceneConfig sc = scene_config(synth_scene);
      sc.seed = synth_seed;
      const ScenePair scene = generate_scene(sc);
      CorrespondenceConfig cc = correspondence_config(synth_scene);
      cc.seed = mix_seed(synth_seed, 1);
      const CorrespondenceSample sample = generate_correspondences(scene, cc);
      const CloudFormat format = parse_cloud_format(synth_format);
      const std::string ext = format == CloudFormat::kPlyAscii ? ".ply" : ".xyz";
      const fs::path dir(synth_dir);
      fs::create_directories(dir);
      write_cloud_file(dir / ("source" + ext), scene.source, format);
      write_cloud_file(dir / ("target" + ext), scene.target, format);
      {
        std::ofstream out(dir / "correspondences.txt");
        write_correspondences(out, sample.corrs);
        std::ofstream mask(dir / "inlier_mask.txt");
        for (bool inlier : sample.inlier_mask) mask << (inlier ? 1 : 0) << '\n';
        std::ofstream gt(dir / "gt.txt");
        write_transform(gt, scene.gt);
      }
      std::cout << "pr: " << g(scene.pr) << '\n'
                << "points: " << scene.target.size() << '\n'
                << "correspondences: " << sample.corrs.size() << '\n';
      return 0;
    }

    if (*info) {
      const PointCloud cloud =
          parse_cloud_file(info_path, resolve_format(info_format, info_path));
      Eigen::Vector3d lo = cloud[0];
      Eigen::Vector3d hi = lo;
      Eigen::Vector3d sum = Eigen::Vector3d::Zero();
      for (const Point3& p : cloud.points()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
        sum += p;
      }
      const Eigen::Vector3d centroid = sum / static_cast<double>(cloud.size());
      std::cout << "points: " << cloud.size() << '\n';
      if (cloud.size() >= 2) std::cout << "pr: " << g(cloud_resolution(cloud)) << '\n';
      std::cout << "bbox_min: " << g(lo.x()) << ' ' << g(lo.y()) << ' ' << g(lo.z()) << '\n'
                << "bbox_max: " << g(hi.x()) << ' ' << g(hi.y()) << ' ' << g(hi.z()) << '\n'
                << "centroid: " << g(centroid.x()) << ' ' << g(centroid.y()) << ' '
                << g(centroid.z()) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::kBadConfig ||
                       e.code() == ErrorCode::kInvalidSpec;
    return usage ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
