#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "epipose/eight_point.hpp"
#include "epipose/errors.hpp"
#include "epipose/random.hpp"
#include "epipose/sampson.hpp"
#include "epipose/types.hpp"

namespace epipose {

template <typename Scalar>
struct RansacConfigT {
  Scalar threshold = Scalar(1e-2);  // inlier bound on the Sampson residual
  int max_iterations = 1000;
  double confidence = 0.99;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct RansacResultT {
  FundamentalMatrixT<Scalar> f;
  std::vector<bool> inlier_mask;  // consensus of the refit model, input order
  Eigen::Index inlier_count = 0;
  int iterations_run = 0;
  int best_iteration = -1;
};

// Hypothesize-and-verify eight-point RANSAC. Determinism contract: the
// sampling domain is the correspondence list sorted lexicographically by
// (u1, v1, u2, v2), so permuting the input changes nothing but the order of
// the returned mask, which always follows the input. Iterations stop at the
// adaptive bound ceil(log(1 - confidence) / log(1 - rho^8)) for the best
// inlier ratio rho seen so far, capped by max_iterations. The best consensus
// is refit by a least-squares solve over its members and the returned mask
// re-scores the whole set under that refit model.
template <typename Scalar>
RansacResultT<Scalar> ransac_estimate(const CorrespondenceSetT<Scalar>& set,
                                      const RansacConfigT<Scalar>& config) {
  const Eigen::Index n = set.size();
  if (n < 8) throw InsufficientData("RANSAC needs at least 8 correspondences");
  if (!(config.threshold > Scalar(0)))
    throw InvalidInput("RANSAC threshold must be > 0");
  if (!(config.confidence > 0.0 && config.confidence < 1.0))
    throw InvalidInput("RANSAC confidence must lie strictly in (0, 1)");
  if (config.max_iterations < 1)
    throw InvalidInput("RANSAC needs at least one iteration");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const auto& ca = set[a];
    const auto& cb = set[b];
    if (ca.u1 != cb.u1) return ca.u1 < cb.u1;
    if (ca.v1 != cb.v1) return ca.v1 < cb.v1;
    if (ca.u2 != cb.u2) return ca.u2 < cb.u2;
    return ca.v2 < cb.v2;
  });

  PortableRng rng(config.seed);
  long bound = config.max_iterations;
  Eigen::Index best_count = 0;
  std::vector<bool> best_mask;
  int best_iteration = -1;
  int it = 0;

  for (; it < config.max_iterations && it < bound; ++it) {
    // Partial Fisher-Yates over a fresh copy of the sorted order: the first
    // 8 slots become the minimal sample.
    std::vector<Eigen::Index> pick = order;
    CorrespondenceSetT<Scalar> sample;
    sample.reserve(8);
    for (int k = 0; k < 8; ++k) {
      const auto j =
          k + static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(n - k)));
      std::swap(pick[static_cast<std::size_t>(k)], pick[static_cast<std::size_t>(j)]);
      sample.push_back(set[pick[static_cast<std::size_t>(k)]]);
    }

    FundamentalMatrixT<Scalar> hypothesis;
    try {
      const VecX<Scalar> ones = VecX<Scalar>::Ones(8);
      hypothesis = weighted_eight_point(sample, ones);
    } catch (const DegenerateConfiguration&) {
      continue;  // the iteration still counts against the bound
    }

    Eigen::Index count = 0;
    std::vector<bool> mask(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool in = sampson_residual(set[i], hypothesis) <= config.threshold;
      mask[static_cast<std::size_t>(i)] = in;
      if (in) ++count;
    }

    if (count > best_count) {
      best_count = count;
      best_mask = std::move(mask);
      best_iteration = it;
      const double rho =
          static_cast<double>(count) / static_cast<double>(n);
      const double miss = 1.0 - std::pow(rho, 8);
      if (miss <= 0.0) {
        bound = it + 1;  // perfect consensus: nothing left to find
      } else {
        bound = static_cast<long>(
            std::ceil(std::log(1.0 - config.confidence) / std::log(miss)));
        bound = std::max(bound, 1L);
      }
    }
  }

  if (best_count < 8)
    throw NoConsensus("no hypothesis reached 8 inliers in " +
                      std::to_string(it) + " iterations");

  VecX<Scalar> refit_w = VecX<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (best_mask[static_cast<std::size_t>(i)]) refit_w(i) = Scalar(1);

  RansacResultT<Scalar> out;
  out.f = weighted_eight_point(set, refit_w);
  out.inlier_mask.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool in = sampson_residual(set[i], out.f) <= config.threshold;
    out.inlier_mask[static_cast<std::size_t>(i)] = in;
    if (in) ++out.inlier_count;
  }
  out.iterations_run = it;
  out.best_iteration = best_iteration;
  return out;
}

using RansacConfig = RansacConfigT<double>;
using RansacResult = RansacResultT<double>;

}  // namespace epipose
