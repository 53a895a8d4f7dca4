#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "epipose/eight_point.hpp"
#include "epipose/errors.hpp"
#include "epipose/predictors.hpp"
#include "epipose/sampson.hpp"
#include "epipose/types.hpp"

namespace epipose {

template <typename Scalar>
struct IrlsConfigT {
  int iterations = 5;
  WeightPredictorPtr<Scalar> predictor;  // defaults to uniform when null
};

template <typename Scalar>
struct IrlsResultT {
  FundamentalMatrixT<Scalar> f;
  VecX<Scalar> final_weights;            // after the last update, max = 1
  std::vector<Scalar> residual_means;    // mean residual per iteration
};

// Recurrent reweighted estimation: D rounds of
//
//   solve weighted_eight_point  ->  residuals of all pairs  ->
//   predictor update  ->  rescale weights to max 1
//
// starting from uniform weights. The recorded means track the residual of
// the whole set after each solve. Rescaling removes the scale freedom the
// homogeneous solve cannot see and keeps prev_weight a stable feature for
// learned predictors; a predictor driving every weight to zero (or anything
// non-finite) is a WeightCollapse.
template <typename Scalar>
IrlsResultT<Scalar> irls_estimate(const CorrespondenceSetT<Scalar>& set,
                                  const IrlsConfigT<Scalar>& config) {
  if (config.iterations < 1)
    throw InvalidInput("IRLS needs at least one iteration");
  if (set.size() < 8)
    throw InsufficientData("IRLS needs at least 8 correspondences");
  const WeightPredictorPtr<Scalar> predictor =
      config.predictor ? config.predictor : uniform_predictor<Scalar>();

  IrlsResultT<Scalar> out;
  VecX<Scalar> w = VecX<Scalar>::Ones(set.size());
  out.residual_means.reserve(static_cast<std::size_t>(config.iterations));
  for (int d = 0; d < config.iterations; ++d) {
    out.f = weighted_eight_point(set, w);
    const VecX<Scalar> r = sampson_residuals(set, out.f);
    out.residual_means.push_back(r.mean());

    VecX<Scalar> next = predictor->update(set, w, r);
    if (next.size() != set.size())
      throw InvalidInput("weight predictor returned a wrong-sized vector");
    const Scalar peak = next.maxCoeff();
    if (!std::isfinite(static_cast<double>(peak)) || !(peak > Scalar(0)) ||
        !next.allFinite() || (next.array() < Scalar(0)).any())
      throw WeightCollapse(
          "weight update produced no usable weights (all zero, negative, or "
          "non-finite)");
    w = next / peak;
  }
  out.final_weights = w;
  return out;
}

using IrlsConfig = IrlsConfigT<double>;
using IrlsResult = IrlsResultT<double>;

}  // namespace epipose
