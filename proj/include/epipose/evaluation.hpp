#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "epipose/errors.hpp"
#include "epipose/fundamental.hpp"
#include "epipose/metrics.hpp"
#include "epipose/sampson.hpp"
#include "epipose/trajectory.hpp"
#include "epipose/types.hpp"

namespace epipose {

// One evaluated pair. translation_error_m is only meaningful for trajectory
// records (metric ground truth); image-pair records leave it 0.
template <typename Scalar>
struct PoseErrorRecordT {
  std::size_t pair_id = 0;
  Scalar rotation_error = 0;       // degrees
  Scalar translation_error = 0;    // degrees (angular)
  Scalar translation_error_m = 0;  // meters (Euclidean)
};

template <typename Scalar>
struct ErrorStatsT {
  Scalar mean = 0;
  Scalar median = 0;
  std::map<Scalar, Scalar> inlier_ratios;  // threshold (deg) -> fraction
};

namespace detail {

// Median is the lower of the two middle elements for even counts, so the
// reported value is always an observed error, not an interpolation.
template <typename Scalar>
Scalar lower_median(std::vector<Scalar> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

template <typename Scalar>
ErrorStatsT<Scalar> stats_of(const std::vector<Scalar>& values,
                             const std::vector<Scalar>& thresholds) {
  ErrorStatsT<Scalar> out;
  Scalar sum = 0;
  for (Scalar v : values) sum += v;
  out.mean = sum / Scalar(values.size());
  out.median = lower_median(values);
  for (Scalar th : thresholds) {
    std::size_t below = 0;
    for (Scalar v : values)
      if (v < th) ++below;
    out.inlier_ratios[th] = Scalar(below) / Scalar(values.size());
  }
  return out;
}

}  // namespace detail

// Mean, lower-middle median, and fraction-strictly-below per threshold, for
// the rotation and angular-translation errors separately.
template <typename Scalar>
std::pair<ErrorStatsT<Scalar>, ErrorStatsT<Scalar>> aggregate_pose_errors(
    const std::vector<PoseErrorRecordT<Scalar>>& records,
    const std::vector<Scalar>& thresholds) {
  if (records.empty())
    throw InvalidInput("cannot aggregate zero pose-error records");
  std::vector<Scalar> rot, trans;
  rot.reserve(records.size());
  trans.reserve(records.size());
  for (const auto& r : records) {
    rot.push_back(r.rotation_error);
    trans.push_back(r.translation_error);
  }
  return {detail::stats_of(rot, thresholds),
          detail::stats_of(trans, thresholds)};
}

template <typename Scalar>
struct SampsonTableRowT {
  Scalar threshold = 0;  // pixels
  Scalar inlier_ratio = 0;
};

template <typename Scalar>
struct SampsonTableT {
  std::vector<SampsonTableRowT<Scalar>> rows;
  std::size_t num_correspondences = 0;
};

inline std::vector<double> default_sampson_thresholds() {
  return {0.2, 0.5, 1.0, 2.0};
}

// Fraction of correspondences whose residual against F_gt is <= threshold
// (inclusive), one row per threshold in the given order.
template <typename Scalar>
SampsonTableT<Scalar> sampson_inlier_table(
    const CorrespondenceSetT<Scalar>& set, const FundamentalMatrixT<Scalar>& f,
    const std::vector<Scalar>& thresholds) {
  SampsonTableT<Scalar> out;
  out.num_correspondences = set.size();
  std::vector<Scalar> residuals;
  residuals.reserve(set.size());
  for (const auto& c : set) residuals.push_back(sampson_residual(c, f));
  for (Scalar th : thresholds) {
    std::size_t inliers = 0;
    for (Scalar r : residuals)
      if (r <= th) ++inliers;
    SampsonTableRowT<Scalar> row;
    row.threshold = th;
    row.inlier_ratio =
        set.empty() ? Scalar(0) : Scalar(inliers) / Scalar(set.size());
    out.rows.push_back(row);
  }
  return out;
}

using SampsonTable = SampsonTableT<double>;

inline SampsonTable sampson_inlier_table(const CorrespondenceSet& set,
                                         const FundamentalMatrix& f) {
  return sampson_inlier_table(set, f, default_sampson_thresholds());
}

// Relative-motion errors between aligned estimate and ground truth:
// ΔT = T_i^-1 T_{i+step} on each side, compared by rotation angle, by the
// angle between relative translations (0 when either is shorter than
// 1e-12 m, where direction is meaningless), and by their metric distance.
template <typename Scalar>
std::vector<PoseErrorRecordT<Scalar>> relative_trajectory_errors(
    const TrajectoryT<Scalar>& est_aligned, const TrajectoryT<Scalar>& gt,
    std::size_t step = 1) {
  if (est_aligned.size() != gt.size())
    throw InvalidInput("trajectories differ in length");
  if (step < 1) throw InvalidInput("step must be >= 1");
  if (est_aligned.size() <= step)
    throw InvalidInput("trajectory shorter than the comparison step");

  std::vector<PoseErrorRecordT<Scalar>> out;
  out.reserve(est_aligned.size() - step);
  for (std::size_t i = 0; i + step < est_aligned.size(); ++i) {
    const Mat34<Scalar> de =
        relative_motion(est_aligned.poses[i], est_aligned.poses[i + step]);
    const Mat34<Scalar> dg =
        relative_motion(gt.poses[i], gt.poses[i + step]);
    PoseErrorRecordT<Scalar> rec;
    rec.pair_id = i;
    rec.rotation_error = rotation_error(
        Mat3<Scalar>(de.template leftCols<3>()),
        Mat3<Scalar>(dg.template leftCols<3>()));
    const Vec3<Scalar> te = de.col(3);
    const Vec3<Scalar> tg = dg.col(3);
    rec.translation_error_m = (te - tg).norm();
    if (te.norm() <= Scalar(1e-12) || tg.norm() <= Scalar(1e-12))
      rec.translation_error = 0;
    else
      rec.translation_error = translation_angular_error(te, tg);
    out.push_back(rec);
  }
  return out;
}

using PoseErrorRecord = PoseErrorRecordT<double>;
using ErrorStats = ErrorStatsT<double>;
using SampsonTableRow = SampsonTableRowT<double>;

}  // namespace epipose
