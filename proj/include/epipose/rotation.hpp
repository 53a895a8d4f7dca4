#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>

#include "epipose/errors.hpp"
#include "epipose/random.hpp"
#include "epipose/types.hpp"

namespace epipose {

// Orthonormality tolerance for matrices handed in as rotations.
inline constexpr double kRotationCheckTol = 1e-6;

template <typename Scalar>
Mat3<Scalar> skew(const Vec3<Scalar>& v) {
  Mat3<Scalar> s;
  s << Scalar(0), -v.z(), v.y(), v.z(), Scalar(0), -v.x(), -v.y(), v.x(),
      Scalar(0);
  return s;
}

template <typename Scalar>
void check_rotation(const Mat3<Scalar>& r) {
  const Scalar defect =
      (r.transpose() * r - Mat3<Scalar>::Identity()).norm();
  if (!(defect <= Scalar(kRotationCheckTol)) ||
      !(r.determinant() > Scalar(0)))
    throw InvalidRotation("matrix is not a rotation (orthonormality defect " +
                          std::to_string(static_cast<double>(defect)) + ")");
}

// Fixes the double cover: scalar part non-negative; if it is zero, the first
// nonzero vector component is made positive. Gives every rotation a unique
// representative, which the chord-distance losses rely on.
template <typename Scalar>
QuaternionT<Scalar> canonicalize_quaternion(QuaternionT<Scalar> q) {
  bool flip = q.w < Scalar(0);
  if (q.w == Scalar(0)) {
    if (q.x != Scalar(0))
      flip = q.x < Scalar(0);
    else if (q.y != Scalar(0))
      flip = q.y < Scalar(0);
    else
      flip = q.z < Scalar(0);
  }
  if (flip) {
    q.w = -q.w;
    q.x = -q.x;
    q.y = -q.y;
    q.z = -q.z;
  }
  return q;
}

// Shepperd's method: branch on the largest of {trace, R00, R11, R22} so the
// divisor is always well away from zero. Result is normalized and canonical.
template <typename Scalar>
QuaternionT<Scalar> rotation_to_quaternion(const Mat3<Scalar>& r) {
  check_rotation(r);
  QuaternionT<Scalar> q;
  const Scalar t = r.trace();
  if (t >= r(0, 0) && t >= r(1, 1) && t >= r(2, 2)) {
    const Scalar s = std::sqrt(Scalar(1) + t);
    const Scalar inv = Scalar(0.5) / s;
    q.w = Scalar(0.5) * s;
    q.x = (r(2, 1) - r(1, 2)) * inv;
    q.y = (r(0, 2) - r(2, 0)) * inv;
    q.z = (r(1, 0) - r(0, 1)) * inv;
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const Scalar s = std::sqrt(Scalar(1) + r(0, 0) - r(1, 1) - r(2, 2));
    const Scalar inv = Scalar(0.5) / s;
    q.w = (r(2, 1) - r(1, 2)) * inv;
    q.x = Scalar(0.5) * s;
    q.y = (r(0, 1) + r(1, 0)) * inv;
    q.z = (r(0, 2) + r(2, 0)) * inv;
  } else if (r(1, 1) >= r(2, 2)) {
    const Scalar s = std::sqrt(Scalar(1) - r(0, 0) + r(1, 1) - r(2, 2));
    const Scalar inv = Scalar(0.5) / s;
    q.w = (r(0, 2) - r(2, 0)) * inv;
    q.x = (r(0, 1) + r(1, 0)) * inv;
    q.y = Scalar(0.5) * s;
    q.z = (r(1, 2) + r(2, 1)) * inv;
  } else {
    const Scalar s = std::sqrt(Scalar(1) - r(0, 0) - r(1, 1) + r(2, 2));
    const Scalar inv = Scalar(0.5) / s;
    q.w = (r(1, 0) - r(0, 1)) * inv;
    q.x = (r(0, 2) + r(2, 0)) * inv;
    q.y = (r(1, 2) + r(2, 1)) * inv;
    q.z = Scalar(0.5) * s;
  }
  const Scalar n = q.norm();
  q.w /= n;
  q.x /= n;
  q.y /= n;
  q.z /= n;
  return canonicalize_quaternion(q);
}

template <typename Scalar>
Mat3<Scalar> quaternion_to_rotation(const QuaternionT<Scalar>& q_in) {
  const Scalar n = q_in.norm();
  if (!(n > Scalar(0)))
    throw InvalidInput("cannot build a rotation from a zero quaternion");
  const Scalar w = q_in.w / n, x = q_in.x / n, y = q_in.y / n, z = q_in.z / n;
  Mat3<Scalar> r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

// Exponential map. theta = |v|; versine form 1 - cos t = 2 sin^2(t/2) keeps
// the quadratic coefficient exact for small angles.
template <typename Scalar>
Mat3<Scalar> rodrigues_to_rotation(const Vec3<Scalar>& v) {
  const Scalar theta = v.norm();
  const Mat3<Scalar> k = skew(v);
  if (theta < Scalar(1e-12))
    return Mat3<Scalar>::Identity() + k + Scalar(0.5) * k * k;
  const Scalar s_half = std::sin(theta / 2);
  const Scalar a = std::sin(theta) / theta;
  const Scalar b = Scalar(2) * s_half * s_half / (theta * theta);
  return Mat3<Scalar>::Identity() + a * k + b * k * k;
}

// Logarithm map: axis times angle, with the angle in [0, pi]. The angle
// comes from atan2 of the skew-part norm against the trace, which stays
// accurate where acos loses digits (near 0 and pi). Past 3*pi/4 the axis is
// read off the symmetric part n n^T = ((R + R^T)/2 - cos(t) I) / (1 -
// cos(t)), whose denominator is large exactly where the skew part collapses.
template <typename Scalar>
Vec3<Scalar> rodrigues_vector(const Mat3<Scalar>& r) {
  check_rotation(r);
  Vec3<Scalar> s{(r(2, 1) - r(1, 2)) / 2, (r(0, 2) - r(2, 0)) / 2,
                 (r(1, 0) - r(0, 1)) / 2};  // sin(theta) * axis
  Scalar c = (r.trace() - 1) / 2;
  c = std::min(Scalar(1), std::max(Scalar(-1), c));
  const Scalar sin_norm = s.norm();
  const Scalar theta = std::atan2(sin_norm, c);

  if (theta < Scalar(3 * 3.14159265358979323846 / 4)) {
    if (theta < Scalar(1e-4)) {
      // theta / sin(theta) = 1 + t^2/6 + 7 t^4/360 + O(t^6)
      const Scalar t2 = theta * theta;
      return (Scalar(1) + t2 / 6 + Scalar(7) / 360 * t2 * t2) * s;
    }
    return (theta / sin_norm) * s;
  }

  const Mat3<Scalar> sym =
      (r + r.transpose()) / 2 - c * Mat3<Scalar>::Identity();
  const Mat3<Scalar> nnt = sym / (1 - c);
  int j = 0;
  nnt.diagonal().maxCoeff(&j);
  Vec3<Scalar> axis = nnt.col(j) / std::sqrt(nnt(j, j));
  // Align with the skew part; at exactly pi the sign is a free choice and
  // the canonical-quaternion rule is reused to make it deterministic.
  const Scalar dot = axis.dot(s);
  if (dot < Scalar(0)) {
    axis = -axis;
  } else if (dot == Scalar(0)) {
    QuaternionT<Scalar> pick{Scalar(0), axis.x(), axis.y(), axis.z()};
    pick = canonicalize_quaternion(pick);
    axis = {pick.x, pick.y, pick.z};
  }
  return theta * axis;
}

// Uniform random rotation: normalized 4-normal quaternion.
template <typename Scalar = double>
Mat3<Scalar> uniform_random_rotation(PortableRng& rng) {
  QuaternionT<Scalar> q;
  do {
    q.w = Scalar(rng.normal());
    q.x = Scalar(rng.normal());
    q.y = Scalar(rng.normal());
    q.z = Scalar(rng.normal());
  } while (!(q.norm() > Scalar(1e-6)));
  return quaternion_to_rotation(q);
}

}  // namespace epipose
