#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regmetrics/geometry.h"
#include "regmetrics/metrics.h"

namespace regmetrics {

enum class SceneShape { kRandomBlob, kLattice, kFile };

struct SceneConfig {
  int n_points = 10000;
  SceneShape shape = SceneShape::kRandomBlob;
  // Blob: ball diameter. Lattice: ignored (spacing below).
  double diameter = 100.0;
  double lattice_spacing = 1.0;
  double gt_rotation_angle = 0.7853981633974483;  // pi / 4
  double gt_translation_magnitude = 50.0;
  std::uint64_t seed = 0;
  // Used for kFile; n_points is ignored then.
  std::optional<PointCloud> file_cloud;
};

// Source, target and the ground truth that maps source onto target.
//
// gt_pairs holds the noise-free pairing (p_s, R_gt p_s + t_gt) for every
// surviving target twin; pair_target_index[i] is the target-cloud index of
// the observed (possibly perturbed) twin of gt_pairs[i].
struct ScenePair {
  PointCloud source;
  PointCloud target;
  RigidTransform gt;
  std::vector<PointPair> gt_pairs;
  std::vector<std::size_t> pair_target_index;
  // Resolution of the clean target; the unit for every pr-scaled quantity.
  double pr = 1.0;
};

// Throws kBadConfig for n_points < 10, a missing file cloud, or bad sizes.
ScenePair generate_scene(const SceneConfig& cfg);

inline constexpr double kOutlierRejectRadiusPr = 15.0;

struct CorrespondenceConfig {
  int n_correspondences = 1000;
  double inlier_ratio = 0.1;
  double inlier_sigma_pr = 0.0;
  std::uint64_t seed = 0;
};

struct CorrespondenceSample {
  CorrespondenceSet corrs;
  std::vector<bool> inlier_mask;
};

// round(n * ratio) inliers built from distinct ground-truth pairs, target
// perturbed by N(0, (sigma * pr)^2) per axis; the rest are outliers pairing a
// random source point with a uniform point of the target bounding box that
// lies more than 15 pr from its true match. Items are shuffled.
CorrespondenceSample generate_correspondences(const ScenePair& scene,
                                              const CorrespondenceConfig& cfg);

// Each coordinate perturbed by N(0, (sigma_pr * pr)^2); the output caches its
// own resolution. `pr` defaults to the input's cached resolution.
PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma_pr,
                              std::uint64_t seed,
                              std::optional<double> pr = std::nullopt);

// Kept indices, ascending. Index round(j / keep) for j < round(n * keep),
// which is every k-th point when keep = 1/k.
std::vector<std::size_t> uniform_decimation_indices(std::size_t n,
                                                    double keep_fraction);
PointCloud decimate_uniform(const PointCloud& cloud, double keep_fraction);

// round(n * keep) indices drawn without replacement, returned ascending.
std::vector<std::size_t> random_decimation_indices(std::size_t n,
                                                   double keep_fraction,
                                                   std::uint64_t seed);
PointCloud decimate_random(const PointCloud& cloud, double keep_fraction,
                           std::uint64_t seed);

inline constexpr double kDefaultHoleFraction = 0.01;

struct Hole {
  std::size_t seed_index;                // original index
  std::vector<std::size_t> removed;      // original indices, nearest first
};

struct HolePunchResult {
  std::vector<std::size_t> kept;  // original indices, ascending
  std::vector<Hole> holes;
};

// n_holes times: pick a random surviving point, remove its
// k = round(hole_fraction * n) nearest survivors (itself included).
// Throws kBadConfig unless n_holes >= 0, hole_fraction >= 0 and
// n_holes * hole_fraction < 1.
HolePunchResult punch_holes_detailed(const PointCloud& cloud, int n_holes,
                                     double hole_fraction, std::uint64_t seed);
PointCloud punch_holes(const PointCloud& cloud, int n_holes,
                       double hole_fraction, std::uint64_t seed);

// Target-side nuisances, applied to a scene while keeping gt_pairs aligned.
enum class Nuisance { kNone, kNoise, kDecimateUniform, kDecimateRandom, kHoles };

struct NuisanceConfig {
  Nuisance kind = Nuisance::kNone;
  // Noise: sigma in pr. Decimation: keep fraction. Holes: hole count.
  double level = 0.0;
  double hole_fraction = kDefaultHoleFraction;
  std::uint64_t seed = 0;
};

ScenePair apply_nuisance(const ScenePair& scene, const NuisanceConfig& cfg);

}  // namespace regmetrics
