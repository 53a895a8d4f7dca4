#pragma once

#include <Eigen/Core>

#include <cmath>

#include "epipose/errors.hpp"
#include "epipose/types.hpp"

namespace epipose {

// Epipolar residual with reciprocal line-norm weighting:
//
//   r(p, F) = |p2^T F p1| * (1 / ||F p1||_2 + 1 / ||F^T p2||_2)
//
// with p1, p2 homogeneous pixel coordinates and the norms taken over the
// full 3-vectors. Degree-0 in the scale of F, so canonical and raw scalings
// of the same matrix give identical residuals. Not a pixel distance: the
// homogeneous component dominates the line norms, so on pixel-scale data the
// values run a few orders of magnitude below point-to-line distances (see
// sampson_distance for the metric variant).
//
// When p1 sits at the right epipole (F p1 = 0) the algebraic error is zero
// while a denominator vanishes; the residual is defined as 0 there (same for
// the left epipole). Use sampson_residual_checked to observe that case.

namespace detail {

// Scale-aware vanishing test: ||F p|| is compared against ||F|| * ||p||,
// its natural magnitude.
template <typename Scalar>
bool line_norm_vanishes(Scalar n, const Mat3<Scalar>& f,
                        const Vec3<Scalar>& p) {
  return !(n > Scalar(1e-12) * f.norm() * p.norm());
}

}  // namespace detail

template <typename Scalar>
struct SampsonValueT {
  Scalar value = 0;
  bool degenerate = false;  // a line norm vanished; value pinned to 0
};

template <typename Scalar>
SampsonValueT<Scalar> sampson_residual_checked(
    const CorrespondenceT<Scalar>& c, const FundamentalMatrixT<Scalar>& f) {
  const Vec3<Scalar> p1 = c.hom1();
  const Vec3<Scalar> p2 = c.hom2();
  const Vec3<Scalar> l2 = f.m * p1;
  const Vec3<Scalar> l1 = f.m.transpose() * p2;
  const Scalar n1 = l2.norm();
  const Scalar n2 = l1.norm();
  if (detail::line_norm_vanishes(n1, f.m, p1) ||
      detail::line_norm_vanishes(n2, f.m, p2))
    return {Scalar(0), true};
  const Scalar s = p2.dot(f.m * p1);
  return {std::abs(s) * (Scalar(1) / n1 + Scalar(1) / n2), false};
}

template <typename Scalar>
Scalar sampson_residual(const CorrespondenceT<Scalar>& c,
                        const FundamentalMatrixT<Scalar>& f) {
  return sampson_residual_checked(c, f).value;
}

template <typename Scalar>
VecX<Scalar> sampson_residuals(const CorrespondenceSetT<Scalar>& set,
                               const FundamentalMatrixT<Scalar>& f) {
  VecX<Scalar> r(set.size());
  for (Eigen::Index i = 0; i < set.size(); ++i)
    r(i) = sampson_residual(set[i], f);
  return r;
}

// Classical first-order Sampson distance |p2^T F p1| / sqrt(a1^2 + b1^2 +
// a2^2 + b2^2) over the line-direction components only. Approximates the
// geometric reprojection error and carries pixel units, which makes it the
// interpretable choice for thresholds on pixel-coordinate data.
template <typename Scalar>
Scalar sampson_distance(const CorrespondenceT<Scalar>& c,
                        const FundamentalMatrixT<Scalar>& f) {
  const Vec3<Scalar> p1 = c.hom1();
  const Vec3<Scalar> p2 = c.hom2();
  const Vec3<Scalar> l2 = f.m * p1;
  const Vec3<Scalar> l1 = f.m.transpose() * p2;
  const Scalar d2 =
      l2.x() * l2.x() + l2.y() * l2.y() + l1.x() * l1.x() + l1.y() * l1.y();
  if (!(d2 > Scalar(1e-24) * f.m.squaredNorm() *
                std::max(p1.squaredNorm(), p2.squaredNorm())))
    return Scalar(0);
  return std::abs(p2.dot(f.m * p1)) / std::sqrt(d2);
}

// Analytic derivatives of sampson_residual with respect to the four point
// coordinates (u1, v1, u2, v2) and, separately, the nine entries of F.
// r = |s| * (1/n1 + 1/n2) gives, with g = sign(s) (one-sided +1 at s = 0),
//
//   dr = g * ds * (1/n1 + 1/n2) - |s| * (dn1 / n1^2 + dn2 / n2^2)
//
// where ds/dp1 = F^T p2, ds/dp2 = F p1, n1 dn1/dp1 = F^T (F p1),
// n2 dn2/dp2 = F (F^T p2), ds/dF = p2 p1^T, n1 dn1/dF = (F p1) p1^T and
// n2 dn2/dF = p2 (F^T p2)^T. Undefined where a line norm vanishes.
template <typename Scalar>
struct SampsonGradientT {
  Vec2<Scalar> d_p1 = Vec2<Scalar>::Zero();
  Vec2<Scalar> d_p2 = Vec2<Scalar>::Zero();
  Mat3<Scalar> d_f = Mat3<Scalar>::Zero();
};

template <typename Scalar>
SampsonGradientT<Scalar> sampson_gradient(const CorrespondenceT<Scalar>& c,
                                          const FundamentalMatrixT<Scalar>& f) {
  const Vec3<Scalar> p1 = c.hom1();
  const Vec3<Scalar> p2 = c.hom2();
  const Vec3<Scalar> fp1 = f.m * p1;
  const Vec3<Scalar> ftp2 = f.m.transpose() * p2;
  const Scalar n1 = fp1.norm();
  const Scalar n2 = ftp2.norm();
  if (detail::line_norm_vanishes(n1, f.m, p1) ||
      detail::line_norm_vanishes(n2, f.m, p2))
    throw GradientUndefined(
        "sampson gradient undefined where an epipolar line norm vanishes");

  const Scalar s = p2.dot(fp1);
  const Scalar g = s < Scalar(0) ? Scalar(-1) : Scalar(1);
  const Scalar w = Scalar(1) / n1 + Scalar(1) / n2;
  const Scalar mag = std::abs(s);

  SampsonGradientT<Scalar> out;
  const Vec3<Scalar> dn1_p1 = f.m.transpose() * fp1 / n1;
  const Vec3<Scalar> dn2_p2 = f.m * ftp2 / n2;
  out.d_p1 = (g * w) * ftp2.template head<2>() -
             (mag / (n1 * n1)) * dn1_p1.template head<2>();
  out.d_p2 = (g * w) * fp1.template head<2>() -
             (mag / (n2 * n2)) * dn2_p2.template head<2>();
  out.d_f = (g * w) * (p2 * p1.transpose()) -
            mag * ((fp1 * p1.transpose()) / (n1 * n1 * n1) +
                   (p2 * ftp2.transpose()) / (n2 * n2 * n2));
  return out;
}

using SampsonValue = SampsonValueT<double>;
using SampsonGradient = SampsonGradientT<double>;

}  // namespace epipose
