#include "regmetrics/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "regmetrics/errors.h"
#include "regmetrics/neighbor_index.h"
#include "regmetrics/random.h"

namespace regmetrics {
namespace {

constexpr int kMaxOutlierAttempts = 10000;

Eigen::Vector3d random_unit_vector(Rng& rng) {
  for (;;) {
    const Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

std::vector<Point3> blob_points(int n, double diameter, Rng& rng) {
  const double radius = 0.5 * diameter;
  std::vector<Point3> points;
  points.reserve(static_cast<std::size_t>(n));
  while (static_cast<int>(points.size()) < n) {
    const Point3 p(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                   rng.uniform(-1.0, 1.0));
    if (p.squaredNorm() <= 1.0) points.push_back(radius * p);
  }
  return points;
}

std::vector<Point3> lattice_points(int n, double spacing) {
  int side = 1;
  while (side * side * side < n) ++side;
  const double offset = 0.5 * (side - 1) * spacing;
  std::vector<Point3> points;
  points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int x = i % side;
    const int y = (i / side) % side;
    const int z = i / (side * side);
    points.emplace_back(x * spacing - offset, y * spacing - offset,
                        z * spacing - offset);
  }
  return points;
}

void require_keep_fraction(double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw Error(ErrorCode::kBadConfig, "keep fraction must lie in (0, 1]");
  }
}

PointCloud select_points(const PointCloud& cloud,
                         const std::vector<std::size_t>& indices) {
  std::vector<Point3> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(cloud[i]);
  return PointCloud(std::move(out));
}

// First `k` entries of a partial Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> choose_distinct(std::size_t n, std::size_t k,
                                         Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

// Restricts the scene's target to `kept` (ascending original indices).
ScenePair restrict_target(const ScenePair& scene,
                          const std::vector<std::size_t>& kept) {
  constexpr std::size_t kGone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> remap(scene.target.size(), kGone);
  for (std::size_t i = 0; i < kept.size(); ++i) remap[kept[i]] = i;

  ScenePair out{scene.source, select_points(scene.target, kept), scene.gt,
                {}, {}, scene.pr};
  for (std::size_t i = 0; i < scene.gt_pairs.size(); ++i) {
    const std::size_t mapped = remap[scene.pair_target_index[i]];
    if (mapped == kGone) continue;
    out.gt_pairs.push_back(scene.gt_pairs[i]);
    out.pair_target_index.push_back(mapped);
  }
  return out;
}

}  // namespace

ScenePair generate_scene(const SceneConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<Point3> target_points;
  switch (cfg.shape) {
    case SceneShape::kRandomBlob:
    case SceneShape::kLattice:
      if (cfg.n_points < 10) {
        throw Error(ErrorCode::kBadConfig, "n_points must be at least 10");
      }
      if (cfg.shape == SceneShape::kRandomBlob) {
        if (!(cfg.diameter > 0.0)) {
          throw Error(ErrorCode::kBadConfig, "diameter must be positive");
        }
        target_points = blob_points(cfg.n_points, cfg.diameter, rng);
      } else {
        if (!(cfg.lattice_spacing > 0.0)) {
          throw Error(ErrorCode::kBadConfig, "lattice spacing must be positive");
        }
        target_points = lattice_points(cfg.n_points, cfg.lattice_spacing);
      }
      break;
    case SceneShape::kFile:
      if (!cfg.file_cloud || cfg.file_cloud->size() < 10) {
        throw Error(ErrorCode::kBadConfig,
                    "file scene needs a cloud of at least 10 points");
      }
      target_points = cfg.file_cloud->points();
      break;
  }
  if (!std::isfinite(cfg.gt_rotation_angle) ||
      !std::isfinite(cfg.gt_translation_magnitude)) {
    throw Error(ErrorCode::kBadConfig, "ground-truth motion must be finite");
  }

  const Eigen::Vector3d axis = random_unit_vector(rng);
  const Eigen::Vector3d direction = random_unit_vector(rng);
  const RigidTransform gt = make_transform(
      axis, cfg.gt_rotation_angle, cfg.gt_translation_magnitude * direction);

  PointCloud target = PointCloud::with_resolution(std::move(target_points));
  const RigidTransform to_source = invert(gt);
  std::vector<Point3> source_points;
  source_points.reserve(target.size());
  for (const Point3& p : target.points()) source_points.push_back(to_source * p);

  ScenePair scene{PointCloud(std::move(source_points)), std::move(target), gt,
                  {}, {}, 0.0};
  scene.pr = scene.target.resolution();
  scene.gt_pairs.reserve(scene.target.size());
  scene.pair_target_index.reserve(scene.target.size());
  for (std::size_t i = 0; i < scene.target.size(); ++i) {
    scene.gt_pairs.push_back({scene.source[i], scene.target[i]});
    scene.pair_target_index.push_back(i);
  }
  return scene;
}

CorrespondenceSample generate_correspondences(const ScenePair& scene,
                                              const CorrespondenceConfig& cfg) {
  if (cfg.n_correspondences < 3) {
    throw Error(ErrorCode::kBadConfig, "need at least 3 correspondences");
  }
  if (!(cfg.inlier_ratio > 0.0 && cfg.inlier_ratio <= 1.0)) {
    throw Error(ErrorCode::kBadConfig, "inlier ratio must lie in (0, 1]");
  }
  if (!(cfg.inlier_sigma_pr >= 0.0) || !std::isfinite(cfg.inlier_sigma_pr)) {
    throw Error(ErrorCode::kBadConfig, "inlier sigma must be non-negative");
  }
  const auto n = static_cast<std::size_t>(cfg.n_correspondences);
  const auto k = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * cfg.inlier_ratio));
  if (k < 3) {
    throw Error(ErrorCode::kBadConfig,
                "round(n * inlier_ratio) must be at least 3");
  }
  if (k > scene.gt_pairs.size()) {
    throw Error(ErrorCode::kBadConfig,
                "more inliers requested than ground-truth pairs (" +
                    std::to_string(scene.gt_pairs.size()) + ")");
  }
  if (scene.source.empty() || scene.target.empty()) {
    throw Error(ErrorCode::kBadConfig, "scene clouds must be non-empty");
  }

  Rng rng(cfg.seed);
  const double sigma = cfg.inlier_sigma_pr * scene.pr;
  CorrespondenceSample sample;
  sample.corrs.reserve(n);
  sample.inlier_mask.reserve(n);

  for (std::size_t pair : choose_distinct(scene.gt_pairs.size(), k, rng)) {
    Point3 target = scene.target[scene.pair_target_index[pair]];
    if (sigma > 0.0) {
      target += sigma * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    }
    sample.corrs.push_back({scene.gt_pairs[pair].source, target});
    sample.inlier_mask.push_back(true);
  }

  Eigen::Vector3d lo = scene.target[0];
  Eigen::Vector3d hi = lo;
  for (const Point3& p : scene.target.points()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double reject = kOutlierRejectRadiusPr * scene.pr;
  for (std::size_t i = k; i < n; ++i) {
    const Point3& source = scene.source[rng.uniform_index(scene.source.size())];
    const Point3 truth = scene.gt * source;
    int attempts = 0;
    for (;;) {
      const Point3 candidate(rng.uniform(lo.x(), hi.x()),
                             rng.uniform(lo.y(), hi.y()),
                             rng.uniform(lo.z(), hi.z()));
      if ((candidate - truth).norm() > reject) {
        sample.corrs.push_back({source, candidate});
        sample.inlier_mask.push_back(false);
        break;
      }
      if (++attempts >= kMaxOutlierAttempts) {
        throw Error(ErrorCode::kBadConfig,
                    "target volume too small to place outliers 15 pr away");
      }
    }
  }

  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(sample.corrs[i], sample.corrs[j]);
    const bool tmp = sample.inlier_mask[i];
    sample.inlier_mask[i] = sample.inlier_mask[j];
    sample.inlier_mask[j] = tmp;
  }
  return sample;
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma_pr,
                              std::uint64_t seed, std::optional<double> pr) {
  if (!(sigma_pr >= 0.0) || !std::isfinite(sigma_pr)) {
    throw Error(ErrorCode::kBadConfig, "noise sigma must be non-negative");
  }
  if (sigma_pr == 0.0) return cloud;
  double unit = 0.0;
  if (pr) {
    unit = *pr;
  } else if (cloud.cached_resolution()) {
    unit = *cloud.cached_resolution();
  } else {
    unit = cloud_resolution(cloud);
  }
  const double sigma = sigma_pr * unit;
  Rng rng(seed);
  std::vector<Point3> out;
  out.reserve(cloud.size());
  for (const Point3& p : cloud.points()) {
    const double dx = rng.normal();
    const double dy = rng.normal();
    const double dz = rng.normal();
    out.push_back(p + sigma * Eigen::Vector3d(dx, dy, dz));
  }
  if (out.size() < 2) return PointCloud(std::move(out));
  return PointCloud::with_resolution(std::move(out));
}

std::vector<std::size_t> uniform_decimation_indices(std::size_t n,
                                                    double keep_fraction) {
  require_keep_fraction(keep_fraction);
  const auto count = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * keep_fraction));
  std::vector<std::size_t> kept;
  kept.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto i = static_cast<std::size_t>(
        std::llround(static_cast<double>(j) / keep_fraction));
    kept.push_back(std::min(i, n - 1));
  }
  return kept;
}

PointCloud decimate_uniform(const PointCloud& cloud, double keep_fraction) {
  return select_points(cloud,
                       uniform_decimation_indices(cloud.size(), keep_fraction));
}

std::vector<std::size_t> random_decimation_indices(std::size_t n,
                                                   double keep_fraction,
                                                   std::uint64_t seed) {
  require_keep_fraction(keep_fraction);
  const auto count = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * keep_fraction));
  Rng rng(seed);
  std::vector<std::size_t> kept = choose_distinct(n, count, rng);
  std::sort(kept.begin(), kept.end());
  return kept;
}

PointCloud decimate_random(const PointCloud& cloud, double keep_fraction,
                           std::uint64_t seed) {
  return select_points(
      cloud, random_decimation_indices(cloud.size(), keep_fraction, seed));
}

HolePunchResult punch_holes_detailed(const PointCloud& cloud, int n_holes,
                                     double hole_fraction, std::uint64_t seed) {
  if (n_holes < 0 || !(hole_fraction >= 0.0) ||
      !(n_holes * hole_fraction < 1.0)) {
    throw Error(ErrorCode::kBadConfig,
                "need n_holes >= 0, hole_fraction >= 0 and their product < 1");
  }
  HolePunchResult result;
  result.kept.resize(cloud.size());
  std::iota(result.kept.begin(), result.kept.end(), std::size_t{0});
  const auto k = static_cast<std::size_t>(
      std::llround(hole_fraction * static_cast<double>(cloud.size())));

  Rng rng(seed);
  for (int h = 0; h < n_holes && !result.kept.empty(); ++h) {
    std::vector<Point3> survivors;
    survivors.reserve(result.kept.size());
    for (std::size_t i : result.kept) survivors.push_back(cloud[i]);

    Hole hole;
    const std::size_t seed_pos = rng.uniform_index(survivors.size());
    hole.seed_index = result.kept[seed_pos];
    const std::size_t take = std::min(k, survivors.size());
    if (take > 0) {
      const NeighborIndex index(survivors);
      std::vector<bool> drop(survivors.size(), false);
      for (const Neighbor& nb : index.knn(survivors[seed_pos], take)) {
        drop[nb.index] = true;
        hole.removed.push_back(result.kept[nb.index]);
      }
      std::vector<std::size_t> next;
      next.reserve(result.kept.size() - take);
      for (std::size_t i = 0; i < result.kept.size(); ++i) {
        if (!drop[i]) next.push_back(result.kept[i]);
      }
      result.kept = std::move(next);
    }
    result.holes.push_back(std::move(hole));
  }
  return result;
}

PointCloud punch_holes(const PointCloud& cloud, int n_holes,
                       double hole_fraction, std::uint64_t seed) {
  return select_points(
      cloud, punch_holes_detailed(cloud, n_holes, hole_fraction, seed).kept);
}

ScenePair apply_nuisance(const ScenePair& scene, const NuisanceConfig& cfg) {
  switch (cfg.kind) {
    case Nuisance::kNone:
      return scene;
    case Nuisance::kNoise: {
      ScenePair out = scene;
      out.target = add_gaussian_noise(scene.target, cfg.level, cfg.seed, scene.pr);
      return out;
    }
    case Nuisance::kDecimateUniform:
      return restrict_target(
          scene, uniform_decimation_indices(scene.target.size(), cfg.level));
    case Nuisance::kDecimateRandom:
      return restrict_target(
          scene, random_decimation_indices(scene.target.size(), cfg.level,
                                           cfg.seed));
    case Nuisance::kHoles: {
      const double rounded = std::round(cfg.level);
      if (rounded != cfg.level || rounded < 0.0) {
        throw Error(ErrorCode::kBadConfig, "hole count must be a whole number");
      }
      return restrict_target(
          scene, punch_holes_detailed(scene.target, static_cast<int>(rounded),
                                      cfg.hole_fraction, cfg.seed)
                     .kept);
    }
  }
  return scene;
}

}  // namespace regmetrics
