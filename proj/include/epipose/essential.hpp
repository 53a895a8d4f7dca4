#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <array>
#include <cmath>

#include "epipose/errors.hpp"
#include "epipose/fundamental.hpp"
#include "epipose/types.hpp"

namespace epipose {

// E = K2^T F K1, projected onto the essential manifold (two equal nonzero
// singular values) and scaled to ||E||_F = sqrt(2), i.e. spectrum (1, 1, 0).
template <typename Scalar>
EssentialMatrixT<Scalar> essential_from_fundamental(
    const FundamentalMatrixT<Scalar>& f, const CameraIntrinsicsT<Scalar>& k1,
    const CameraIntrinsicsT<Scalar>& k2) {
  const Mat3<Scalar> raw = k2.matrix().transpose() * f.m * k1.matrix();
  Eigen::JacobiSVD<Mat3<Scalar>> svd(
      raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3<Scalar>& sv = svd.singularValues();
  if (!(sv(1) > Scalar(kRankCollapseTol) * sv(0)))
    throw DegenerateConfiguration(
        "essential projection impossible: singular spectrum collapsed");
  // Projecting to (s, s, 0) with s the mean of the top two, then scaling to
  // Frobenius norm sqrt(2), lands on spectrum (1, 1, 0) exactly.
  const Vec3<Scalar> unit{Scalar(1), Scalar(1), Scalar(0)};
  return {Mat3<Scalar>(svd.matrixU() * unit.asDiagonal() *
                       svd.matrixV().transpose())};
}

// The four (R, t) candidates of an essential matrix: twisted pair times the
// translation sign, in the fixed order
//   [(R_a, +t), (R_a, -t), (R_b, +t), (R_b, -t)]
// with R_a = U W V^T, R_b = U W^T V^T and t = third column of U (unit).
// U and V are sign-corrected to det +1 first, which keeps both candidates
// proper rotations; the candidate set is identical for E and -E.
template <typename Scalar>
std::array<RelativePoseT<Scalar>, 4> decompose_essential(
    const EssentialMatrixT<Scalar>& e) {
  Eigen::JacobiSVD<Mat3<Scalar>> svd(
      e.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3<Scalar>& sv = svd.singularValues();
  if (!(sv(1) > Scalar(kRankCollapseTol) * sv(0)))
    throw DegenerateConfiguration(
        "cannot decompose an essential matrix with collapsed spectrum");
  Mat3<Scalar> u = svd.matrixU();
  Mat3<Scalar> v = svd.matrixV();
  if (u.determinant() < Scalar(0)) u = -u;
  if (v.determinant() < Scalar(0)) v = -v;

  Mat3<Scalar> w;
  w << Scalar(0), Scalar(-1), Scalar(0), Scalar(1), Scalar(0), Scalar(0),
      Scalar(0), Scalar(0), Scalar(1);

  const Mat3<Scalar> ra = u * w * v.transpose();
  const Mat3<Scalar> rb = u * w.transpose() * v.transpose();
  const Vec3<Scalar> t = u.col(2);

  std::array<RelativePoseT<Scalar>, 4> out;
  out[0] = {ra, t};
  out[1] = {ra, -t};
  out[2] = {rb, t};
  out[3] = {rb, -t};
  return out;
}

}  // namespace epipose
