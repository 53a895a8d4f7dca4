#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

#include "epipose/errors.hpp"
#include "epipose/metrics.hpp"
#include "epipose/types.hpp"

namespace epipose {

// Ordered camera-to-world poses [R|t] (KITTI odometry convention): column 3
// is the camera position in world coordinates, meters.
template <typename Scalar>
struct TrajectoryT {
  std::vector<Mat34<Scalar>> poses;

  std::size_t size() const { return poses.size(); }
};

template <typename Scalar>
struct Sim3T {
  Scalar scale = 1;
  Mat3<Scalar> rotation = Mat3<Scalar>::Identity();
  Vec3<Scalar> translation = Vec3<Scalar>::Zero();

  Vec3<Scalar> apply(const Vec3<Scalar>& p) const {
    return scale * (rotation * p) + translation;
  }
};

template <typename Scalar>
struct AlignmentT {
  Sim3T<Scalar> transform;       // maps est positions onto gt
  TrajectoryT<Scalar> aligned;   // est with the transform applied
};

// Closed-form least-squares Sim(3) (Umeyama): centroids, the 3x3
// cross-covariance's SVD, a det-sign correction S so the rotation never
// degenerates into a reflection, and scale = trace(D S) / sigma^2_est.
// Minimizes sum || gt_i - (s R est_i + t) ||^2 over the camera positions.
// Orientation parts of the aligned trajectory are rotated by R (scale does
// not touch them).
template <typename Scalar>
AlignmentT<Scalar> umeyama_sim3_align(const TrajectoryT<Scalar>& est,
                                      const TrajectoryT<Scalar>& gt) {
  const std::size_t n = est.size();
  if (n != gt.size())
    throw InvalidInput("trajectories differ in length");
  if (n < 3)
    throw DegenerateAlignment("Sim(3) alignment needs at least 3 poses");

  Vec3<Scalar> mu_est = Vec3<Scalar>::Zero();
  Vec3<Scalar> mu_gt = Vec3<Scalar>::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_est += est.poses[i].col(3);
    mu_gt += gt.poses[i].col(3);
  }
  mu_est /= Scalar(n);
  mu_gt /= Scalar(n);

  Mat3<Scalar> cov = Mat3<Scalar>::Zero();
  Scalar var_est = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3<Scalar> de = est.poses[i].col(3) - mu_est;
    const Vec3<Scalar> dg = gt.poses[i].col(3) - mu_gt;
    cov += dg * de.transpose();
    var_est += de.squaredNorm();
  }
  cov /= Scalar(n);
  var_est /= Scalar(n);
  if (!(var_est > Scalar(1e-18)))
    throw DegenerateAlignment("estimated positions have no spread");

  Eigen::JacobiSVD<Mat3<Scalar>> svd(
      cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3<Scalar>& d = svd.singularValues();
  // Collinear positions leave the rotation about the line unconstrained.
  if (!(d(1) > Scalar(1e-12) * std::max(d(0), Scalar(1e-30))))
    throw DegenerateAlignment("positions are collinear; rotation ambiguous");

  Vec3<Scalar> s_diag = Vec3<Scalar>::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < Scalar(0))
    s_diag(2) = Scalar(-1);

  AlignmentT<Scalar> out;
  out.transform.rotation =
      svd.matrixU() * s_diag.asDiagonal() * svd.matrixV().transpose();
  out.transform.scale = (d.dot(s_diag)) / var_est;
  out.transform.translation =
      mu_gt - out.transform.scale * (out.transform.rotation * mu_est);

  out.aligned.poses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Mat34<Scalar> p;
    p.template leftCols<3>() =
        out.transform.rotation * est.poses[i].template leftCols<3>();
    p.col(3) = out.transform.apply(est.poses[i].col(3));
    out.aligned.poses.push_back(p);
  }
  return out;
}

// Relative motion between two camera-to-world poses: T_a^-1 T_b.
template <typename Scalar>
Mat34<Scalar> relative_motion(const Mat34<Scalar>& a, const Mat34<Scalar>& b) {
  Mat34<Scalar> out;
  const Mat3<Scalar> ra_t = a.template leftCols<3>().transpose();
  out.template leftCols<3>() = ra_t * b.template leftCols<3>();
  out.col(3) = ra_t * (b.col(3) - a.col(3));
  return out;
}

// Chains relative poses into an absolute trajectory:
// T_0 = I, T_{i+1} = T_i * [R_i | t_i * step_length]. With unit
// translations this is the scale-free accumulation that Sim(3) alignment
// later rescales.
template <typename Scalar>
TrajectoryT<Scalar> compose_trajectory(
    const std::vector<RelativePoseT<Scalar>>& relative_poses,
    Scalar step_length = Scalar(1)) {
  if (relative_poses.empty())
    throw InvalidInput("cannot compose an empty pose sequence");
  TrajectoryT<Scalar> out;
  out.poses.reserve(relative_poses.size() + 1);
  Mat34<Scalar> cur = Mat34<Scalar>::Zero();
  cur.template leftCols<3>() = Mat3<Scalar>::Identity();
  out.poses.push_back(cur);
  for (const auto& rel : relative_poses) {
    Mat34<Scalar> next;
    next.template leftCols<3>() =
        cur.template leftCols<3>() * rel.rotation;
    next.col(3) =
        cur.template leftCols<3>() * (rel.translation * step_length) +
        cur.col(3);
    out.poses.push_back(next);
    cur = next;
  }
  return out;
}

using Trajectory = TrajectoryT<double>;
using Sim3 = Sim3T<double>;
using Alignment = AlignmentT<double>;

}  // namespace epipose
