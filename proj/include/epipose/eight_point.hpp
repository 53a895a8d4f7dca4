#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cmath>

#include "epipose/errors.hpp"
#include "epipose/fundamental.hpp"
#include "epipose/types.hpp"

namespace epipose {

// Relative spectrum threshold below which the stacked epipolar constraints
// are treated as rank-deficient (coplanar / coincident configurations).
inline constexpr double kEightPointDegenerateTol = 1e-9;

template <typename Scalar>
struct HartleyNormalizationT {
  CorrespondenceSetT<Scalar> normalized;
  Mat3<Scalar> t1 = Mat3<Scalar>::Identity();  // applied to image-1 points
  Mat3<Scalar> t2 = Mat3<Scalar>::Identity();  // applied to image-2 points
};

// Similarity transforms per image moving the centroid to the origin and the
// mean distance from it to sqrt(2). Standard conditioning step; without it
// the stacked constraint matrix mixes terms of order 1 and order 10^5 on
// pixel data.
template <typename Scalar>
HartleyNormalizationT<Scalar> hartley_normalize(
    const CorrespondenceSetT<Scalar>& set) {
  if (set.empty()) throw InsufficientData("cannot normalize an empty set");

  auto transform_for = [&](bool second) {
    Vec2<Scalar> centroid = Vec2<Scalar>::Zero();
    for (const auto& c : set) centroid += second ? c.p2() : c.p1();
    centroid /= Scalar(set.size());
    Scalar mean_dist = 0;
    for (const auto& c : set)
      mean_dist += ((second ? c.p2() : c.p1()) - centroid).norm();
    mean_dist /= Scalar(set.size());
    if (!(mean_dist > Scalar(1e-12)))
      throw DegenerateConfiguration(
          "all points coincide in one image; normalization undefined");
    const Scalar s = std::sqrt(Scalar(2)) / mean_dist;
    Mat3<Scalar> t;
    t << s, Scalar(0), -s * centroid.x(), Scalar(0), s, -s * centroid.y(),
        Scalar(0), Scalar(0), Scalar(1);
    return t;
  };

  HartleyNormalizationT<Scalar> out;
  out.t1 = transform_for(false);
  out.t2 = transform_for(true);
  out.normalized.reserve(static_cast<std::size_t>(set.size()));
  for (const auto& c : set) {
    CorrespondenceT<Scalar> n;
    n.u1 = out.t1(0, 0) * c.u1 + out.t1(0, 2);
    n.v1 = out.t1(1, 1) * c.v1 + out.t1(1, 2);
    n.u2 = out.t2(0, 0) * c.u2 + out.t2(0, 2);
    n.v2 = out.t2(1, 1) * c.v2 + out.t2(1, 2);
    out.normalized.push_back(n);
  }
  return out;
}

// Weighted linear eight-point estimate: minimizes
//
//   sum_i w_i (p2_i^T F p1_i)^2   subject to   ||F|| = 1
//
// in Hartley-normalized coordinates, via the smallest right singular vector
// of the sqrt(w)-scaled design matrix. Pipeline: normalize -> solve ->
// denormalize (F = T2^T F_hat T1) -> rank-2 projection -> canonicalize.
//
// The normalizing transforms are computed from the strictly-positive-weight
// points only, so zero-weighted outliers cannot skew the conditioning; their
// design rows would be identically zero and are skipped.
template <typename Scalar>
FundamentalMatrixT<Scalar> weighted_eight_point(
    const CorrespondenceSetT<Scalar>& set, const VecX<Scalar>& weights) {
  if (weights.size() != set.size())
    throw InvalidInput("weight vector length does not match correspondences");
  CorrespondenceSetT<Scalar> active;
  std::vector<Scalar> active_w;
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    const Scalar w = weights(i);
    if (!std::isfinite(static_cast<double>(w)) || w < Scalar(0))
      throw InvalidInput("weights must be finite and non-negative");
    if (w > Scalar(0)) {
      active.push_back(set[i]);
      active_w.push_back(w);
    }
  }
  if (active.size() < 8)
    throw InsufficientData(
        "eight-point solve needs at least 8 positively weighted "
        "correspondences, got " +
        std::to_string(active.size()));

  const HartleyNormalizationT<Scalar> norm = hartley_normalize(active);

  MatX<Scalar> a(active.size(), 9);
  for (Eigen::Index i = 0; i < active.size(); ++i) {
    const auto& c = norm.normalized[i];
    const Scalar sw = std::sqrt(active_w[static_cast<std::size_t>(i)]);
    a.row(i) << c.u2 * c.u1, c.u2 * c.v1, c.u2, c.v2 * c.u1, c.v2 * c.v1,
        c.v2, c.u1, c.v1, Scalar(1);
    a.row(i) *= sw;
  }

  Eigen::JacobiSVD<MatX<Scalar>> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A unique null direction needs the 8 leading singular values alive.
  if (!(sv(7) > Scalar(kEightPointDegenerateTol) * sv(0)))
    throw DegenerateConfiguration(
        "epipolar constraints are rank-deficient (degenerate configuration)");

  const VecX<Scalar> f = svd.matrixV().col(8);
  Mat3<Scalar> f_hat;
  f_hat << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);
  const Mat3<Scalar> denorm = norm.t2.transpose() * f_hat * norm.t1;
  return enforce_rank2(denorm);
}

using HartleyNormalization = HartleyNormalizationT<double>;

}  // namespace epipose
