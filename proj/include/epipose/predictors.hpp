#pragma once

#include <Eigen/Core>

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "epipose/errors.hpp"
#include "epipose/types.hpp"

namespace epipose {

// One step of the recurrent weighting loop: given the correspondences, the
// previous weights and the current residuals, produce the next weights.
// Implementations must be deterministic and return nonnegative values; the
// estimation loop rescales whatever comes back so the maximum weight is 1.
template <typename Scalar>
class WeightPredictorT {
 public:
  virtual ~WeightPredictorT() = default;
  virtual VecX<Scalar> update(const CorrespondenceSetT<Scalar>& set,
                              const VecX<Scalar>& prev_weights,
                              const VecX<Scalar>& residuals) const = 0;
};

template <typename Scalar>
using WeightPredictorPtr = std::shared_ptr<const WeightPredictorT<Scalar>>;

namespace detail {

template <typename Scalar>
class UniformPredictor final : public WeightPredictorT<Scalar> {
 public:
  VecX<Scalar> update(const CorrespondenceSetT<Scalar>& set,
                      const VecX<Scalar>&, const VecX<Scalar>&) const override {
    return VecX<Scalar>::Ones(set.size());
  }
};

template <typename Scalar>
class GemanMcClurePredictor final : public WeightPredictorT<Scalar> {
 public:
  explicit GemanMcClurePredictor(Scalar scale) : s2_(scale * scale) {}

  VecX<Scalar> update(const CorrespondenceSetT<Scalar>&, const VecX<Scalar>&,
                      const VecX<Scalar>& residuals) const override {
    VecX<Scalar> w(residuals.size());
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
      const Scalar d = s2_ + residuals(i) * residuals(i);
      w(i) = s2_ / (d * d);
    }
    return w;
  }

 private:
  Scalar s2_;
};

template <typename Scalar>
class HuberPredictor final : public WeightPredictorT<Scalar> {
 public:
  explicit HuberPredictor(Scalar delta) : delta_(delta) {}

  VecX<Scalar> update(const CorrespondenceSetT<Scalar>&, const VecX<Scalar>&,
                      const VecX<Scalar>& residuals) const override {
    VecX<Scalar> w(residuals.size());
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
      const Scalar r = std::abs(residuals(i));
      w(i) = r <= delta_ ? Scalar(1) : delta_ / r;
    }
    return w;
  }

 private:
  Scalar delta_;
};

}  // namespace detail

template <typename Scalar = double>
WeightPredictorPtr<Scalar> uniform_predictor() {
  return std::make_shared<detail::UniformPredictor<Scalar>>();
}

// Geman-McClure kernel weights w_i = s^2 / (s^2 + r_i^2)^2. The absolute
// scale of the output is immaterial (the loop rescales to max 1); what
// matters is the relative down-weighting, e.g. w(s) = w(0) / 4.
template <typename Scalar = double>
WeightPredictorPtr<Scalar> geman_mcclure_predictor(Scalar scale) {
  if (!(scale > Scalar(0)))
    throw InvalidInput("Geman-McClure scale must be > 0");
  return std::make_shared<detail::GemanMcClurePredictor<Scalar>>(scale);
}

// Huber weights: 1 inside delta, delta / |r| outside.
template <typename Scalar = double>
WeightPredictorPtr<Scalar> huber_predictor(Scalar delta) {
  if (!(delta > Scalar(0))) throw InvalidInput("Huber delta must be > 0");
  return std::make_shared<detail::HuberPredictor<Scalar>>(delta);
}

// Small dense MLP: relu on hidden layers, sigmoid on the single output.
template <typename Scalar>
struct MlpLayerT {
  MatX<Scalar> weights;  // rows_out x cols_in
  VecX<Scalar> bias;     // rows_out
};

template <typename Scalar>
struct MlpModelT {
  std::vector<MlpLayerT<Scalar>> layers;

  // Shape validation; `input_dim` pins the first layer when >= 0.
  void validate(Eigen::Index input_dim = -1) const {
    if (layers.empty()) throw ModelLoadError("MLP has no layers");
    Eigen::Index prev = input_dim;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      if (l.weights.rows() < 1 || l.weights.cols() < 1)
        throw ModelLoadError("MLP layer " + std::to_string(i) +
                             " has an empty weight matrix");
      if (l.bias.size() != l.weights.rows())
        throw ModelLoadError("MLP layer " + std::to_string(i) +
                             " bias length does not match its rows");
      if (prev >= 0 && l.weights.cols() != prev)
        throw ModelLoadError("MLP layer " + std::to_string(i) +
                             " input width does not chain with the previous "
                             "layer");
      prev = l.weights.rows();
    }
  }

  VecX<Scalar> forward(VecX<Scalar> x) const {
    for (std::size_t i = 0; i + 1 < layers.size(); ++i)
      x = ((layers[i].weights * x + layers[i].bias).array().max(Scalar(0)))
              .matrix();
    const auto& last = layers.back();
    VecX<Scalar> y = last.weights * x + last.bias;
    return (Scalar(1) / (Scalar(1) + (-y.array()).exp())).matrix();
  }
};

namespace detail {

// Applies a loaded MLP per point to the feature vector
// (u1, v1, u2, v2, residual, prev_weight); sigmoid keeps outputs in (0, 1).
template <typename Scalar>
class MlpPredictor final : public WeightPredictorT<Scalar> {
 public:
  explicit MlpPredictor(MlpModelT<Scalar> model) : model_(std::move(model)) {}

  VecX<Scalar> update(const CorrespondenceSetT<Scalar>& set,
                      const VecX<Scalar>& prev_weights,
                      const VecX<Scalar>& residuals) const override {
    VecX<Scalar> w(set.size());
    VecX<Scalar> feat(6);
    for (Eigen::Index i = 0; i < set.size(); ++i) {
      const auto& c = set[i];
      feat << c.u1, c.v1, c.u2, c.v2, residuals(i), prev_weights(i);
      w(i) = model_.forward(feat)(0);
    }
    return w;
  }

 private:
  MlpModelT<Scalar> model_;
};

}  // namespace detail

template <typename Scalar = double>
WeightPredictorPtr<Scalar> mlp_predictor(MlpModelT<Scalar> model) {
  model.validate(6);
  if (model.layers.back().weights.rows() != 1)
    throw ModelLoadError("weight-predictor MLP must end in a single output");
  return std::make_shared<detail::MlpPredictor<Scalar>>(std::move(model));
}

using MlpLayer = MlpLayerT<double>;
using MlpModel = MlpModelT<double>;
using WeightPredictor = WeightPredictorT<double>;

}  // namespace epipose
