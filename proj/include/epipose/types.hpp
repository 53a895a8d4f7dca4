#pragma once

#include <Eigen/Core>

#include <vector>

#include "epipose/errors.hpp"

namespace epipose {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Mat34 = Eigen::Matrix<Scalar, 3, 4>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// One putative match between pixel (u1, v1) in the first image and
// (u2, v2) in the second.
template <typename Scalar>
struct CorrespondenceT {
  Scalar u1 = 0, v1 = 0;
  Scalar u2 = 0, v2 = 0;

  Vec3<Scalar> hom1() const { return {u1, v1, Scalar(1)}; }
  Vec3<Scalar> hom2() const { return {u2, v2, Scalar(1)}; }
  Vec2<Scalar> p1() const { return {u1, v1}; }
  Vec2<Scalar> p2() const { return {u2, v2}; }
};

// An ordered list of correspondences. Iteration order is insertion order and
// is part of the contract: estimators, residual vectors and weight vectors
// all index into it consistently.
template <typename Scalar>
class CorrespondenceSetT {
 public:
  CorrespondenceSetT() = default;
  explicit CorrespondenceSetT(std::vector<CorrespondenceT<Scalar>> items)
      : items_(std::move(items)) {}

  Eigen::Index size() const { return static_cast<Eigen::Index>(items_.size()); }
  bool empty() const { return items_.empty(); }
  void reserve(std::size_t n) { items_.reserve(n); }
  void push_back(const CorrespondenceT<Scalar>& c) { items_.push_back(c); }

  const CorrespondenceT<Scalar>& operator[](Eigen::Index i) const {
    return items_[static_cast<std::size_t>(i)];
  }
  CorrespondenceT<Scalar>& operator[](Eigen::Index i) {
    return items_[static_cast<std::size_t>(i)];
  }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  // N x 4 view (u1, v1, u2, v2), one row per correspondence.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 4> as_matrix() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 4> m(size(), 4);
    for (Eigen::Index i = 0; i < size(); ++i) {
      const auto& c = items_[static_cast<std::size_t>(i)];
      m.row(i) << c.u1, c.v1, c.u2, c.v2;
    }
    return m;
  }

 private:
  std::vector<CorrespondenceT<Scalar>> items_;
};

// Pinhole intrinsics. Zero skew unless set explicitly.
template <typename Scalar>
struct CameraIntrinsicsT {
  Scalar fx = 1, fy = 1;
  Scalar cx = 0, cy = 0;
  Scalar skew = 0;

  Mat3<Scalar> matrix() const {
    Mat3<Scalar> k;
    k << fx, skew, cx, Scalar(0), fy, cy, Scalar(0), Scalar(0), Scalar(1);
    return k;
  }

  Mat3<Scalar> inverse_matrix() const {
    validate();
    Mat3<Scalar> ki;
    // Closed-form inverse of an upper-triangular calibration matrix.
    ki << Scalar(1) / fx, -skew / (fx * fy), (skew * cy - cx * fy) / (fx * fy),
        Scalar(0), Scalar(1) / fy, -cy / fy,
        Scalar(0), Scalar(0), Scalar(1);
    return ki;
  }

  void validate() const {
    if (!(fx > Scalar(0)) || !(fy > Scalar(0)))
      throw InvalidInput("camera intrinsics require fx > 0 and fy > 0");
  }

  Vec2<Scalar> project(const Vec3<Scalar>& x_cam) const {
    return {fx * x_cam.x() / x_cam.z() + skew * x_cam.y() / x_cam.z() + cx,
            fy * x_cam.y() / x_cam.z() + cy};
  }
};

// Rigid motion taking first-camera coordinates to second-camera coordinates:
// x2 = R x1 + t. For poses recovered from an essential matrix, t is unit
// length (the scale is unobservable).
template <typename Scalar>
struct RelativePoseT {
  Mat3<Scalar> rotation = Mat3<Scalar>::Identity();
  Vec3<Scalar> translation = Vec3<Scalar>::Zero();
};

// Unit quaternion, scalar part first.
template <typename Scalar>
struct QuaternionT {
  Scalar w = 1, x = 0, y = 0, z = 0;

  Vec4<Scalar> coeffs() const { return {w, x, y, z}; }
  Scalar norm() const { return coeffs().norm(); }
};

// A fundamental matrix in the convention p2^T F p1 = 0 (pixel coordinates,
// homogeneous). The wrapper carries no hidden state; canonical scaling and
// the rank-2 property are established by the factory routines that produce
// it, not enforced on every construction (losses accept perturbed inputs).
template <typename Scalar>
struct FundamentalMatrixT {
  Mat3<Scalar> m = Mat3<Scalar>::Zero();
};

// An essential matrix, normalized to Frobenius norm sqrt(2) (both nonzero
// singular values equal 1).
template <typename Scalar>
struct EssentialMatrixT {
  Mat3<Scalar> m = Mat3<Scalar>::Zero();
};

using Correspondence = CorrespondenceT<double>;
using CorrespondenceSet = CorrespondenceSetT<double>;
using CameraIntrinsics = CameraIntrinsicsT<double>;
using RelativePose = RelativePoseT<double>;
using Quaternion = QuaternionT<double>;
using FundamentalMatrix = FundamentalMatrixT<double>;
using EssentialMatrix = EssentialMatrixT<double>;

}  // namespace epipose
