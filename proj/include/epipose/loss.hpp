#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "epipose/errors.hpp"
#include "epipose/fundamental.hpp"
#include "epipose/rotation.hpp"
#include "epipose/types.hpp"

namespace epipose {

template <typename Scalar>
struct FLossConfigT {
  int grid_rows = 10, grid_cols = 10;
  Scalar image_width = 640, image_height = 480;
  Scalar margin_fraction = Scalar(0.05);  // grid inset from each border
};

template <typename Scalar>
struct FLossResultT {
  Scalar value = 0;        // mean halved symmetric epipolar distance, pixels
  int skipped_points = 0;  // grid points whose epipolar line degenerated
};

// Agreement of an estimated fundamental matrix with ground truth, measured
// on virtual correspondences: each grid point g in image 1 is paired with
// the point m on its ground-truth epipolar line closest to the image
// center. The pair (g, m) satisfies F_gt exactly; the loss is the mean over
// the grid of the halved symmetric epipolar distance of (g, m) under F_est.
// Grid points sitting on an epipole (of either matrix) are skipped and
// counted.
template <typename Scalar>
FLossResultT<Scalar> f_loss(const FundamentalMatrixT<Scalar>& f_est,
                            const FundamentalMatrixT<Scalar>& f_gt,
                            const FLossConfigT<Scalar>& config) {
  if (config.grid_rows < 2 || config.grid_cols < 2)
    throw InvalidInput("f_loss grid must be at least 2x2");
  if (!(config.image_width > Scalar(0)) || !(config.image_height > Scalar(0)))
    throw InvalidInput("f_loss needs positive image dimensions");

  const Scalar mx = config.margin_fraction * config.image_width;
  const Scalar my = config.margin_fraction * config.image_height;
  const Vec2<Scalar> center{config.image_width / 2, config.image_height / 2};

  FLossResultT<Scalar> out;
  Scalar sum = 0;
  int used = 0;
  for (int row = 0; row < config.grid_rows; ++row) {
    for (int col = 0; col < config.grid_cols; ++col) {
      const Vec2<Scalar> g{
          mx + (config.image_width - 2 * mx) * Scalar(col) /
                   Scalar(config.grid_cols - 1),
          my + (config.image_height - 2 * my) * Scalar(row) /
                   Scalar(config.grid_rows - 1)};
      try {
        // Virtual match: foot of the image center on the gt epipolar line.
        const Vec3<Scalar> l_gt = epipolar_line(f_gt, g, 2);
        const Scalar off =
            l_gt.x() * center.x() + l_gt.y() * center.y() + l_gt.z();
        const Vec2<Scalar> m{center.x() - off * l_gt.x(),
                             center.y() - off * l_gt.y()};

        const Scalar d2 = point_line_distance(m, epipolar_line(f_est, g, 2));
        const Scalar d1 = point_line_distance(g, epipolar_line(f_est, m, 1));
        sum += (d1 + d2) / 2;
        ++used;
      } catch (const EpipoleDegenerate&) {
        ++out.skipped_points;
      }
    }
  }
  if (used == 0)
    throw DegenerateConfiguration(
        "every grid point degenerated; f_loss undefined");
  out.value = sum / Scalar(used);
  return out;
}

template <typename Scalar>
struct PoseLossConfigT {
  Scalar c_r = Scalar(0.1);       // rotation clamp
  Scalar c_t = Scalar(0.5);       // translation clamp
  Scalar lambda_rt = Scalar(0.1);  // translation term weight
  // When set, the clipped rotation+translation sum is minimized over
  // candidates jointly instead of picking each minimum independently.
  // The reported l_rot / l_trans stay the independent minima either way.
  bool joint_candidate = false;
};

template <typename Scalar>
struct PoseLossResultT {
  Scalar l_pose = 0;
  Scalar l_rot = 0;
  Scalar l_trans = 0;
};

// Candidate pose supervision:
//
//   L_rot  = min_i || q(R_i) - q(R_gt) ||_2      (canonical-sign quaternions)
//   L_trans = min_i || t_i - t_gt ||_2           (unit translations)
//   L_pose = min(L_rot, c_r) + lambda_rt * min(L_trans, c_t)
//
// The clamps bound the loss by c_r + lambda_rt * c_t no matter how wrong
// the candidates are.
template <typename Scalar>
PoseLossResultT<Scalar> pose_loss(
    const std::vector<RelativePoseT<Scalar>>& candidates,
    const RelativePoseT<Scalar>& gt, const PoseLossConfigT<Scalar>& config) {
  if (candidates.empty())
    throw InvalidInput("pose_loss needs at least one candidate");
  if (candidates.size() > 4)
    throw InvalidInput("pose_loss takes at most the 4 decomposition "
                       "candidates");
  if (!(config.c_r > Scalar(0)) || !(config.c_t > Scalar(0)) ||
      !(config.lambda_rt > Scalar(0)))
    throw InvalidInput("pose_loss constants must be positive");

  const QuaternionT<Scalar> q_gt = rotation_to_quaternion(gt.rotation);
  const Scalar tn_gt = gt.translation.norm();
  if (!(tn_gt > Scalar(1e-15)))
    throw InvalidInput("pose_loss needs a nonzero ground-truth translation");
  const Vec3<Scalar> t_gt = gt.translation / tn_gt;

  PoseLossResultT<Scalar> out;
  Scalar best_rot = std::numeric_limits<Scalar>::infinity();
  Scalar best_trans = best_rot;
  Scalar best_joint = best_rot;
  for (const auto& cand : candidates) {
    const QuaternionT<Scalar> q = rotation_to_quaternion(cand.rotation);
    const Scalar rot = (q.coeffs() - q_gt.coeffs()).norm();
    const Scalar tn = cand.translation.norm();
    if (!(tn > Scalar(1e-15)))
      throw InvalidInput("pose_loss candidate has a zero translation");
    const Scalar trans = (cand.translation / tn - t_gt).norm();
    best_rot = std::min(best_rot, rot);
    best_trans = std::min(best_trans, trans);
    best_joint = std::min(best_joint, std::min(rot, config.c_r) +
                                          config.lambda_rt *
                                              std::min(trans, config.c_t));
  }

  out.l_rot = best_rot;
  out.l_trans = best_trans;
  out.l_pose = config.joint_candidate
                   ? best_joint
                   : std::min(best_rot, config.c_r) +
                         config.lambda_rt * std::min(best_trans, config.c_t);
  return out;
}

using FLossConfig = FLossConfigT<double>;
using FLossResult = FLossResultT<double>;
using PoseLossConfig = PoseLossConfigT<double>;
using PoseLossResult = PoseLossResultT<double>;

}  // namespace epipose
