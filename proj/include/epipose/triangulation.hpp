#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <array>
#include <cmath>

#include "epipose/errors.hpp"
#include "epipose/types.hpp"

namespace epipose {

template <typename Scalar>
struct TriangulationT {
  Vec3<Scalar> point = Vec3<Scalar>::Zero();  // camera-1 frame
  Scalar depth1 = 0;                          // z in camera 1
  Scalar depth2 = 0;                          // z in camera 2
};

// Linear DLT triangulation of one correspondence under the motion
// x2 = R x1 + t. Rows of the 4x4 design are normalized to unit length so
// the result is independent of the projection matrices' scale. Exact on
// noise-free data, which is all cheirality selection needs.
template <typename Scalar>
TriangulationT<Scalar> triangulate_dlt(const CorrespondenceT<Scalar>& c,
                                       const RelativePoseT<Scalar>& pose,
                                       const CameraIntrinsicsT<Scalar>& k1,
                                       const CameraIntrinsicsT<Scalar>& k2) {
  Mat34<Scalar> p1 = Mat34<Scalar>::Zero();
  p1.template leftCols<3>() = k1.matrix();
  Mat34<Scalar> p2;
  p2.template leftCols<3>() = pose.rotation;
  p2.col(3) = pose.translation;
  p2 = k2.matrix() * p2;

  Eigen::Matrix<Scalar, 4, 4> a;
  a.row(0) = c.u1 * p1.row(2) - p1.row(0);
  a.row(1) = c.v1 * p1.row(2) - p1.row(1);
  a.row(2) = c.u2 * p2.row(2) - p2.row(0);
  a.row(3) = c.v2 * p2.row(2) - p2.row(1);
  for (int i = 0; i < 4; ++i) {
    const Scalar n = a.row(i).norm();
    if (n > Scalar(0)) a.row(i) /= n;
  }

  Eigen::JacobiSVD<Eigen::Matrix<Scalar, 4, 4>> svd(a, Eigen::ComputeFullV);
  const Vec4<Scalar> x = svd.matrixV().col(3);
  if (!(std::abs(x(3)) > Scalar(1e-10)))
    throw PointAtInfinity("triangulated point has vanishing homogeneous scale");

  TriangulationT<Scalar> out;
  out.point = x.template head<3>() / x(3);
  out.depth1 = out.point.z();
  out.depth2 = (pose.rotation * out.point + pose.translation).z();
  return out;
}

template <typename Scalar>
struct CheiralityResultT {
  RelativePoseT<Scalar> pose;
  std::array<int, 4> positive_depth_counts{};
  int selected = -1;
  bool tie_broken = false;  // another candidate matched the winning count
};

// Picks the decomposition candidate that places the most correspondences in
// front of both cameras (depth > 0 in each frame). Points that triangulate
// to infinity under a candidate count as not-in-front for it rather than
// aborting the vote. Ties go to the lowest candidate index, flagged; a
// unanimous zero is a hard failure.
template <typename Scalar>
CheiralityResultT<Scalar> cheirality_select(
    const std::array<RelativePoseT<Scalar>, 4>& candidates,
    const CorrespondenceSetT<Scalar>& set, const CameraIntrinsicsT<Scalar>& k1,
    const CameraIntrinsicsT<Scalar>& k2) {
  if (set.empty())
    throw InsufficientData("cheirality vote needs at least one correspondence");

  CheiralityResultT<Scalar> out;
  for (int c = 0; c < 4; ++c) {
    const auto& cand = candidates[static_cast<std::size_t>(c)];
    int count = 0;
    for (const auto& corr : set) {
      TriangulationT<Scalar> tri;
      try {
        tri = triangulate_dlt(corr, cand, k1, k2);
      } catch (const PointAtInfinity&) {
        continue;
      }
      if (tri.depth1 > Scalar(0) && tri.depth2 > Scalar(0)) ++count;
    }
    out.positive_depth_counts[static_cast<std::size_t>(c)] = count;
  }

  int best = 0;
  for (int c = 1; c < 4; ++c)
    if (out.positive_depth_counts[static_cast<std::size_t>(c)] >
        out.positive_depth_counts[static_cast<std::size_t>(best)])
      best = c;
  const int best_count =
      out.positive_depth_counts[static_cast<std::size_t>(best)];
  if (best_count == 0)
    throw NoValidPose("no decomposition candidate places any point in front "
                      "of both cameras");
  for (int c = 0; c < 4; ++c)
    if (c != best &&
        out.positive_depth_counts[static_cast<std::size_t>(c)] == best_count)
      out.tie_broken = true;

  out.selected = best;
  out.pose = candidates[static_cast<std::size_t>(best)];
  return out;
}

using Triangulation = TriangulationT<double>;
using CheiralityResult = CheiralityResultT<double>;

}  // namespace epipose
