#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

#include "epipose/errors.hpp"
#include "epipose/rotation.hpp"
#include "epipose/types.hpp"

namespace epipose {

inline constexpr double kPi = 3.14159265358979323846;

template <typename Scalar>
Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180.0 / kPi);
}

template <typename Scalar>
Scalar deg_to_rad(Scalar deg) {
  return deg * Scalar(kPi / 180.0);
}

// Angle of the residual rotation R_est * R_gt^T, i.e. the Rodrigues-vector
// norm, in degrees. Symmetric in its arguments and zero iff they agree.
template <typename Scalar>
Scalar rotation_error(const Mat3<Scalar>& r_est, const Mat3<Scalar>& r_gt) {
  const Vec3<Scalar> omega =
      rodrigues_vector(Mat3<Scalar>(r_est * r_gt.transpose()));
  return rad_to_deg(omega.norm());
}

// Unsigned angle between two translation directions, in degrees. Evaluated
// as atan2(|cross|, dot) rather than arccos of the normalized dot: the same
// function, but exact for identical inputs and free of the half-precision
// cliff near 0 and 180. Scale of either argument is irrelevant.
template <typename Scalar>
Scalar translation_angular_error(const Vec3<Scalar>& t_est,
                                 const Vec3<Scalar>& t_gt) {
  if (!(t_est.norm() > Scalar(1e-15)) || !(t_gt.norm() > Scalar(1e-15)))
    throw InvalidInput("translation angle undefined for a zero vector");
  return rad_to_deg(
      std::atan2(t_est.cross(t_gt).norm(), t_est.dot(t_gt)));
}

}  // namespace epipose
