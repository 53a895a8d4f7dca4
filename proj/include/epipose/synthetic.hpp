#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "epipose/errors.hpp"
#include "epipose/fundamental.hpp"
#include "epipose/metrics.hpp"
#include "epipose/random.hpp"
#include "epipose/rotation.hpp"
#include "epipose/types.hpp"

namespace epipose {

enum class TranslationDirection { kForward, kLateral, kRandom };

template <typename Scalar>
struct SceneConfigT {
  int num_points = 100;
  Scalar depth_min = Scalar(4), depth_max = Scalar(10);  // meters
  Scalar rotation_magnitude = Scalar(5);                 // degrees
  TranslationDirection translation_direction = TranslationDirection::kRandom;
  int image_width = 640, image_height = 480;
  CameraIntrinsicsT<Scalar> intrinsics{Scalar(500), Scalar(500), Scalar(320),
                                       Scalar(240), Scalar(0)};
  std::uint64_t seed = 0;
};

// A two-view geometry with every 3D point visible in both cameras.
// pose.translation is the unit direction of t in x2 = R x1 + t; the metric
// translation is baseline * pose.translation.
template <typename Scalar>
struct SyntheticSceneT {
  std::vector<Vec3<Scalar>> points3d;  // camera-1 frame
  RelativePoseT<Scalar> pose;          // unit translation
  Scalar baseline = 0;                 // meters
  CameraIntrinsicsT<Scalar> intrinsics;
  int image_width = 0, image_height = 0;

  Vec3<Scalar> metric_translation() const {
    return baseline * pose.translation;
  }
};

namespace detail {

template <typename Scalar>
Vec3<Scalar> unit_sphere_direction(PortableRng& rng) {
  Vec3<Scalar> v;
  Scalar n;
  do {
    v = {Scalar(rng.normal()), Scalar(rng.normal()), Scalar(rng.normal())};
    n = v.norm();
  } while (!(n > Scalar(1e-6)));
  return v / n;
}

template <typename Scalar>
bool inside_image(const Vec2<Scalar>& p, int w, int h) {
  return p.x() >= Scalar(0) && p.x() < Scalar(w) && p.y() >= Scalar(0) &&
         p.y() < Scalar(h);
}

}  // namespace detail

// Seeded scene synthesis. The pose is drawn first: a rotation of exactly
// rotation_magnitude degrees about a uniform random axis (identity at 0),
// and a unit translation from the preset — (0,0,1) forward, (1,0,0)
// lateral, or a uniform sphere direction. The baseline is fixed at
// 0.1 * depth_min, small enough against the scene depth that visibility in
// both views is satisfiable for moderate rotations.
//
// Points are rejection-sampled: a pixel uniform in image 1 and a depth
// uniform in [depth_min, depth_max] are back-projected and kept only if the
// point lands inside image 2 with positive depth. A bounded attempt budget
// turns impossible configurations (e.g. extreme rotations) into
// GenerationFailed instead of a hang.
template <typename Scalar>
SyntheticSceneT<Scalar> generate_scene(const SceneConfigT<Scalar>& config) {
  if (config.num_points < 8)
    throw InvalidInput("scene needs at least 8 points");
  if (!(config.depth_min > Scalar(0)) ||
      !(config.depth_max >= config.depth_min))
    throw InvalidInput("scene depth range must satisfy 0 < min <= max");
  if (config.image_width < 2 || config.image_height < 2)
    throw InvalidInput("scene image dimensions are too small");
  config.intrinsics.validate();

  PortableRng rng(config.seed);
  SyntheticSceneT<Scalar> scene;
  scene.intrinsics = config.intrinsics;
  scene.image_width = config.image_width;
  scene.image_height = config.image_height;
  scene.baseline = Scalar(0.1) * config.depth_min;

  const Scalar angle = deg_to_rad(config.rotation_magnitude);
  if (angle == Scalar(0)) {
    scene.pose.rotation = Mat3<Scalar>::Identity();
  } else {
    const Vec3<Scalar> axis = detail::unit_sphere_direction<Scalar>(rng);
    scene.pose.rotation = rodrigues_to_rotation(Vec3<Scalar>(angle * axis));
  }
  switch (config.translation_direction) {
    case TranslationDirection::kForward:
      scene.pose.translation = {Scalar(0), Scalar(0), Scalar(1)};
      break;
    case TranslationDirection::kLateral:
      scene.pose.translation = {Scalar(1), Scalar(0), Scalar(0)};
      break;
    case TranslationDirection::kRandom:
      scene.pose.translation = detail::unit_sphere_direction<Scalar>(rng);
      break;
  }

  const Mat3<Scalar> k_inv = config.intrinsics.inverse_matrix();
  const Vec3<Scalar> t_metric = scene.baseline * scene.pose.translation;
  long attempts_left = static_cast<long>(config.num_points) * 1000;
  scene.points3d.reserve(static_cast<std::size_t>(config.num_points));
  while (static_cast<int>(scene.points3d.size()) < config.num_points) {
    if (--attempts_left < 0)
      throw GenerationFailed(
          "could not satisfy two-view visibility within the retry budget");
    const Scalar u = Scalar(rng.uniform(0.0, config.image_width));
    const Scalar v = Scalar(rng.uniform(0.0, config.image_height));
    const Scalar depth =
        Scalar(rng.uniform(static_cast<double>(config.depth_min),
                           static_cast<double>(config.depth_max)));
    Vec3<Scalar> ray = k_inv * Vec3<Scalar>{u, v, Scalar(1)};
    const Vec3<Scalar> x = ray * (depth / ray.z());
    const Vec3<Scalar> x2 = scene.pose.rotation * x + t_metric;
    if (!(x2.z() > Scalar(0))) continue;
    if (!detail::inside_image(config.intrinsics.project(x2),
                              config.image_width, config.image_height))
      continue;
    scene.points3d.push_back(x);
  }
  return scene;
}

// Exact pinhole projections of the scene points through both cameras; no
// rounding anywhere.
template <typename Scalar>
CorrespondenceSetT<Scalar> project_scene(const SyntheticSceneT<Scalar>& scene) {
  CorrespondenceSetT<Scalar> set;
  set.reserve(scene.points3d.size());
  const Vec3<Scalar> t_metric = scene.metric_translation();
  for (const auto& x : scene.points3d) {
    const Vec2<Scalar> p1 = scene.intrinsics.project(x);
    const Vec2<Scalar> p2 =
        scene.intrinsics.project(Vec3<Scalar>(scene.pose.rotation * x + t_metric));
    set.push_back({p1.x(), p1.y(), p2.x(), p2.y()});
  }
  return set;
}

// Ground truth for estimator comparisons: the canonical fundamental matrix
// and the unit-translation pose.
template <typename Scalar>
std::pair<FundamentalMatrixT<Scalar>, RelativePoseT<Scalar>>
scene_ground_truth(const SyntheticSceneT<Scalar>& scene) {
  if (!(scene.baseline > Scalar(1e-15)))
    throw ZeroBaseline("scene has no baseline; F is undefined");
  return {fundamental_from_pose(scene.intrinsics, scene.intrinsics, scene.pose),
          scene.pose};
}

template <typename Scalar>
struct CorruptionConfigT {
  Scalar noise_sigma = Scalar(0);        // pixels, image-2 coordinates
  Scalar outlier_ratio = Scalar(0);      // fraction in [0, 1)
  Scalar outlier_min_offset = Scalar(10);  // pixels
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct CorruptedSetT {
  CorrespondenceSetT<Scalar> set;
  std::vector<bool> inlier_mask;  // true = untouched-by-outlier entry
};

// Controlled degradation: floor(ratio * N) entries, chosen by a seeded
// shuffle, have their image-2 point displaced in a uniform random direction
// by a magnitude uniform in [min_offset, 2 * min_offset]; every other entry
// gets isotropic Gaussian noise of noise_sigma on its image-2 coordinates.
// Only image-2 moves, so the inlier/outlier residual separation stays
// analyzable. The required gap min_offset > 5 * sigma keeps the two
// populations statistically separated.
template <typename Scalar>
CorruptedSetT<Scalar> corrupt(const CorrespondenceSetT<Scalar>& set,
                              const CorruptionConfigT<Scalar>& config) {
  if (!(config.noise_sigma >= Scalar(0)))
    throw InvalidInput("noise sigma must be >= 0");
  if (!(config.outlier_ratio >= Scalar(0)) ||
      !(config.outlier_ratio < Scalar(1)))
    throw InvalidInput("outlier ratio must lie in [0, 1)");
  if (config.outlier_ratio > Scalar(0) &&
      !(config.outlier_min_offset > 5 * config.noise_sigma))
    throw InvalidInput(
        "outlier offset must exceed 5x the noise sigma to keep the "
        "populations separated");

  const Eigen::Index n = set.size();
  const auto num_outliers = static_cast<Eigen::Index>(
      std::floor(static_cast<double>(config.outlier_ratio) *
                 static_cast<double>(n)));

  PortableRng rng(config.seed);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index k = 0; k < num_outliers; ++k) {
    const auto j = k + static_cast<Eigen::Index>(
                           rng.bounded(static_cast<std::uint64_t>(n - k)));
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
  }

  CorruptedSetT<Scalar> out;
  out.set = set;
  out.inlier_mask.assign(static_cast<std::size_t>(n), true);
  for (Eigen::Index k = 0; k < num_outliers; ++k)
    out.inlier_mask[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] =
        false;

  for (Eigen::Index i = 0; i < n; ++i) {
    auto& c = out.set[i];
    if (!out.inlier_mask[static_cast<std::size_t>(i)]) {
      const double theta = rng.uniform(0.0, 2.0 * kPi);
      const Scalar mag =
          Scalar(rng.uniform(static_cast<double>(config.outlier_min_offset),
                             2.0 * static_cast<double>(config.outlier_min_offset)));
      c.u2 += mag * Scalar(std::cos(theta));
      c.v2 += mag * Scalar(std::sin(theta));
    } else if (config.noise_sigma > Scalar(0)) {
      c.u2 += config.noise_sigma * Scalar(rng.normal());
      c.v2 += config.noise_sigma * Scalar(rng.normal());
    }
  }
  return out;
}

using SceneConfig = SceneConfigT<double>;
using SyntheticScene = SyntheticSceneT<double>;
using CorruptionConfig = CorruptionConfigT<double>;
using CorruptedSet = CorruptedSetT<double>;

}  // namespace epipose
