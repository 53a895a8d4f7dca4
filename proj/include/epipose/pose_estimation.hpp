#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "epipose/essential.hpp"
#include "epipose/fundamental.hpp"
#include "epipose/irls.hpp"
#include "epipose/ransac.hpp"
#include "epipose/triangulation.hpp"
#include "epipose/types.hpp"

namespace epipose {

enum class EstimationMethod { kIrls, kRansac };

template <typename Scalar>
struct PoseEstimationConfigT {
  EstimationMethod method = EstimationMethod::kIrls;
  IrlsConfigT<Scalar> irls;
  RansacConfigT<Scalar> ransac;
};

template <typename Scalar>
struct PoseEstimateT {
  RelativePoseT<Scalar> pose;  // x2 = R x1 + t, unit translation
  FundamentalMatrixT<Scalar> f;
  EssentialMatrixT<Scalar> e;

  // Estimator diagnostics. weights / residual_means are filled by IRLS,
  // inlier_mask / inlier_count / ransac_iterations by RANSAC.
  VecX<Scalar> weights;
  std::vector<Scalar> residual_means;
  std::vector<bool> inlier_mask;
  Eigen::Index inlier_count = 0;
  int ransac_iterations = 0;

  // Decomposition diagnostics.
  std::array<int, 4> positive_depth_counts{};
  int selected_candidate = -1;
  bool cheirality_tie = false;

  // Epipole locations under the estimated F; containment in a concrete
  // image is the caller's check since image bounds are not an input here.
  EpipoleT<Scalar> epipole1, epipole2;
};

// Full relative-pose recovery: estimate F (IRLS or RANSAC), lift to the
// essential matrix, decompose, and let the cheirality vote pick the
// candidate. The vote runs over the full input set — with a majority of
// (even noisy) inliers the true candidate's count dominates, and the
// per-candidate counts are reported so a caller can see how decisive the
// vote was.
template <typename Scalar>
PoseEstimateT<Scalar> estimate_relative_pose(
    const CorrespondenceSetT<Scalar>& set, const CameraIntrinsicsT<Scalar>& k1,
    const CameraIntrinsicsT<Scalar>& k2,
    const PoseEstimationConfigT<Scalar>& config) {
  if (set.size() < 8)
    throw InsufficientData("pose estimation needs at least 8 correspondences");

  PoseEstimateT<Scalar> out;
  if (config.method == EstimationMethod::kIrls) {
    IrlsResultT<Scalar> r = irls_estimate(set, config.irls);
    out.f = r.f;
    out.weights = std::move(r.final_weights);
    out.residual_means = std::move(r.residual_means);
  } else {
    RansacResultT<Scalar> r = ransac_estimate(set, config.ransac);
    out.f = r.f;
    out.inlier_mask = std::move(r.inlier_mask);
    out.inlier_count = r.inlier_count;
    out.ransac_iterations = r.iterations_run;
  }

  out.e = essential_from_fundamental(out.f, k1, k2);
  const auto candidates = decompose_essential(out.e);
  const CheiralityResultT<Scalar> sel =
      cheirality_select(candidates, set, k1, k2);
  out.pose = sel.pose;
  out.positive_depth_counts = sel.positive_depth_counts;
  out.selected_candidate = sel.selected;
  out.cheirality_tie = sel.tie_broken;

  const auto [e1, e2] = epipoles(out.f);
  out.epipole1 = e1;
  out.epipole2 = e2;
  return out;
}

using PoseEstimationConfig = PoseEstimationConfigT<double>;
using PoseEstimate = PoseEstimateT<double>;

}  // namespace epipose
