#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cmath>
#include <utility>

#include "epipose/errors.hpp"
#include "epipose/rotation.hpp"
#include "epipose/types.hpp"

namespace epipose {

// Spectrum-collapse tolerance: sigma_2 / sigma_1 below this means a matrix
// has (numerically) rank < 2 and cannot carry epipolar geometry.
inline constexpr double kRankCollapseTol = 1e-9;

// Scales to unit Frobenius norm and fixes the sign so that the first entry
// of maximal magnitude in column-major order is positive. Every estimator
// output is passed through this, which is what makes results comparable
// across code paths and reruns.
template <typename Scalar>
Mat3<Scalar> canonicalize(const Mat3<Scalar>& m) {
  const Scalar n = m.norm();
  if (!(n > Scalar(0)) || !std::isfinite(static_cast<double>(n)))
    throw ZeroMatrix("cannot canonicalize a zero (or non-finite) matrix");
  Mat3<Scalar> f = m / n;
  Eigen::Index r = 0, c = 0;
  f.cwiseAbs().maxCoeff(&r, &c);
  if (f(r, c) < Scalar(0)) f = -f;
  return f;
}

template <typename Scalar>
FundamentalMatrixT<Scalar> canonicalize_fundamental(const Mat3<Scalar>& m) {
  return {canonicalize(m)};
}

// Nearest rank-2 matrix in Frobenius norm (smallest singular value zeroed),
// canonicalized. Idempotent on canonical rank-2 input; a rank-1 input passes
// through unchanged up to scale, only the zero matrix is rejected.
template <typename Scalar>
FundamentalMatrixT<Scalar> enforce_rank2(const Mat3<Scalar>& m) {
  if (!(m.norm() > Scalar(0)))
    throw ZeroMatrix("cannot rank-project the zero matrix");
  Eigen::JacobiSVD<Mat3<Scalar>> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3<Scalar> sv = svd.singularValues();
  sv(2) = Scalar(0);
  return {canonicalize(
      Mat3<Scalar>(svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose()))};
}

// F = K2^-T [t]x R K1^-1 for the motion x2 = R x1 + t, canonicalized.
// Exact construction from ground truth; zero baseline leaves no epipolar
// geometry to speak of.
template <typename Scalar>
FundamentalMatrixT<Scalar> fundamental_from_pose(
    const CameraIntrinsicsT<Scalar>& k1, const CameraIntrinsicsT<Scalar>& k2,
    const RelativePoseT<Scalar>& pose) {
  check_rotation(pose.rotation);
  if (!(pose.translation.norm() > Scalar(1e-12)))
    throw ZeroBaseline("fundamental matrix undefined for zero baseline");
  const Mat3<Scalar> f = k2.inverse_matrix().transpose() *
                         skew(pose.translation) * pose.rotation *
                         k1.inverse_matrix();
  return {canonicalize(f)};
}

// Epipolar line for p, as coefficients (a, b, c) of a*u + b*v + c = 0 with
// (a, b) unit — so the point-to-line distance is just |a*u + b*v + c|.
// which_image selects where the LINE lives: 2 means p is an image-1 point
// and the line F p is in image 2; 1 means p is an image-2 point and the
// line F^T p is in image 1.
template <typename Scalar>
Vec3<Scalar> epipolar_line(const FundamentalMatrixT<Scalar>& f,
                           const Vec2<Scalar>& p, int which_image) {
  if (which_image != 1 && which_image != 2)
    throw InvalidInput("which_image must be 1 or 2");
  const Vec3<Scalar> ph{p.x(), p.y(), Scalar(1)};
  const Vec3<Scalar> line =
      which_image == 2 ? Vec3<Scalar>(f.m * ph)
                       : Vec3<Scalar>(f.m.transpose() * ph);
  const Scalar n = std::hypot(line.x(), line.y());
  // Scale-aware: the direction part is measured against the line's natural
  // magnitude ||F|| * ||p||.
  if (!(n > Scalar(1e-12) * f.m.norm() * ph.norm()))
    throw EpipoleDegenerate("point maps to an epipole; its epipolar line is "
                            "undefined");
  return line / n;
}

// Perpendicular pixel distance from p to the line (a, b, c); tolerates
// unnormalized coefficients.
template <typename Scalar>
Scalar point_line_distance(const Vec2<Scalar>& p, const Vec3<Scalar>& line) {
  const Scalar n = std::hypot(line.x(), line.y());
  if (!(n > Scalar(0)))
    throw EpipoleDegenerate("line has zero direction");
  return std::abs(line.x() * p.x() + line.y() * p.y() + line.z()) / n;
}

// Epipole in pixel coordinates plus a flag telling whether it is finite
// (false: the epipole is at infinity and `pixel` is meaningless).
template <typename Scalar>
struct EpipoleT {
  Vec2<Scalar> pixel = Vec2<Scalar>::Zero();
  bool finite = false;
};

// Left/right null vectors of F: F e1 = 0 (epipole in image 1),
// F^T e2 = 0 (epipole in image 2).
template <typename Scalar>
std::pair<EpipoleT<Scalar>, EpipoleT<Scalar>> epipoles(
    const FundamentalMatrixT<Scalar>& f) {
  Eigen::JacobiSVD<Mat3<Scalar>> svd(
      f.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3<Scalar> e1 = svd.matrixV().col(2);
  const Vec3<Scalar> e2 = svd.matrixU().col(2);
  auto to_pixel = [](const Vec3<Scalar>& e) {
    EpipoleT<Scalar> out;
    // The null vector is unit length, so |w| compares against 1.
    out.finite = std::abs(e.z()) > Scalar(1e-10);
    if (out.finite) out.pixel = {e.x() / e.z(), e.y() / e.z()};
    return out;
  };
  return {to_pixel(e1), to_pixel(e2)};
}

using Epipole = EpipoleT<double>;

}  // namespace epipose
