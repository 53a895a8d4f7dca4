#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <vector>

#include "epipose/errors.hpp"
#include "epipose/types.hpp"

namespace epipose {

// Dense detection scores, values(row, col) = score at pixel (x = col,
// y = row).
template <typename Scalar>
struct HeatmapT {
  MatX<Scalar> values;

  int width() const { return static_cast<int>(values.cols()); }
  int height() const { return static_cast<int>(values.rows()); }
};

template <typename Scalar>
struct KeypointT {
  Scalar u = 0, v = 0;  // subpixel pixel coordinates (x, y)
  Scalar score = 0;     // heatmap value at the integer seed
};

namespace detail {

// Total order used everywhere a detection comparison happens: higher score
// wins, equal scores go to the smaller row-major index. Gives NMS and the
// output ordering a single deterministic rule.
template <typename Scalar>
bool detection_beats(Scalar score_a, long idx_a, Scalar score_b, long idx_b) {
  if (score_a != score_b) return score_a > score_b;
  return idx_a < idx_b;
}

}  // namespace detail

// Non-maximum suppression with Chebyshev radius `window`: a pixel survives
// iff its score passes the threshold and it beats every other pixel in the
// (2*window+1)^2 square around it (ties resolved by row-major index, so a
// tied plateau keeps exactly its first pixel). Survivors are returned in
// descending-score order, ties again by row-major index.
template <typename Scalar>
std::vector<KeypointT<Scalar>> nms(const HeatmapT<Scalar>& heatmap, int window,
                                   Scalar score_threshold) {
  if (window < 1) throw InvalidInput("nms window must be >= 1");
  const int h = heatmap.height();
  const int w = heatmap.width();
  std::vector<KeypointT<Scalar>> out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Scalar score = heatmap.values(y, x);
      if (!(score >= score_threshold)) continue;
      const long idx = static_cast<long>(y) * w + x;
      bool is_max = true;
      const int y0 = std::max(0, y - window), y1 = std::min(h - 1, y + window);
      const int x0 = std::max(0, x - window), x1 = std::min(w - 1, x + window);
      for (int ny = y0; ny <= y1 && is_max; ++ny)
        for (int nx = x0; nx <= x1; ++nx) {
          if (ny == y && nx == x) continue;
          const long nidx = static_cast<long>(ny) * w + nx;
          if (!detail::detection_beats(score, idx, heatmap.values(ny, nx),
                                       nidx)) {
            is_max = false;
            break;
          }
        }
      if (is_max)
        out.push_back({Scalar(x), Scalar(y), score});
    }
  }
  std::sort(out.begin(), out.end(), [w](const KeypointT<Scalar>& a,
                                        const KeypointT<Scalar>& b) {
    const long ia = static_cast<long>(a.v) * w + static_cast<long>(a.u);
    const long ib = static_cast<long>(b.v) * w + static_cast<long>(b.u);
    return detail::detection_beats(a.score, ia, b.score, ib);
  });
  return out;
}

// Exp-weighted subpixel refinement around an integer seed:
//
//   du = sum e^{f(i,j)} * i / sum e^{f(i,j)},  i, j in [-r, r]
//
// over the patch_size x patch_size window (temperature 1, raw values in the
// exponent). The patch max is subtracted inside the exponentials — the
// expression is exactly shift-invariant, this only guards overflow. At the
// border the window is clamped and offsets stay relative to the true seed.
// The refined point keeps the seed's score.
template <typename Scalar>
KeypointT<Scalar> softargmax_refine(const HeatmapT<Scalar>& heatmap,
                                    const KeypointT<Scalar>& seed,
                                    int patch_size = 5) {
  if (patch_size < 1 || patch_size % 2 == 0)
    throw InvalidInput("softargmax patch size must be odd and positive");
  if (heatmap.height() < patch_size || heatmap.width() < patch_size)
    throw InvalidInput("heatmap smaller than the softargmax patch");
  const int r = patch_size / 2;
  const int u0 = static_cast<int>(std::lround(static_cast<double>(seed.u)));
  const int v0 = static_cast<int>(std::lround(static_cast<double>(seed.v)));
  if (u0 < 0 || u0 >= heatmap.width() || v0 < 0 || v0 >= heatmap.height())
    throw InvalidInput("softargmax seed outside the heatmap");

  const int dy0 = std::max(-r, -v0), dy1 = std::min(r, heatmap.height() - 1 - v0);
  const int dx0 = std::max(-r, -u0), dx1 = std::min(r, heatmap.width() - 1 - u0);

  Scalar peak = heatmap.values(v0 + dy0, u0 + dx0);
  for (int dy = dy0; dy <= dy1; ++dy)
    for (int dx = dx0; dx <= dx1; ++dx)
      peak = std::max(peak, heatmap.values(v0 + dy, u0 + dx));

  Scalar zsum = 0, usum = 0, vsum = 0;
  for (int dy = dy0; dy <= dy1; ++dy)
    for (int dx = dx0; dx <= dx1; ++dx) {
      const Scalar e = std::exp(heatmap.values(v0 + dy, u0 + dx) - peak);
      zsum += e;
      usum += e * Scalar(dx);
      vsum += e * Scalar(dy);
    }

  KeypointT<Scalar> out;
  out.u = Scalar(u0) + usum / zsum;
  out.v = Scalar(v0) + vsum / zsum;
  out.score = heatmap.values(v0, u0);
  return out;
}

// Jacobian of the softargmax offsets with respect to the full 5x5 patch,
// flattened row-major (k = (j + 2) * 5 + (i + 2)):
//
//   d(du)/df_k = p_k * (i_k - du),   d(dv)/df_k = p_k * (j_k - dv)
//
// with p = softmax(patch). Row 0 is du, row 1 is dv.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 25> softargmax_gradient(
    const Eigen::Matrix<Scalar, 5, 5>& patch) {
  const Scalar peak = patch.maxCoeff();
  Eigen::Matrix<Scalar, 5, 5> p =
      (patch.array() - peak).exp().matrix();
  p /= p.sum();

  Scalar du = 0, dv = 0;
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) {
      du += p(j, i) * Scalar(i - 2);
      dv += p(j, i) * Scalar(j - 2);
    }

  Eigen::Matrix<Scalar, 2, 25> g;
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) {
      const int k = j * 5 + i;
      g(0, k) = p(j, i) * (Scalar(i - 2) - du);
      g(1, k) = p(j, i) * (Scalar(j - 2) - dv);
    }
  return g;
}

// Detection labels: per pixel, the sum of unnormalized Gaussians
// exp(-((x-u)^2 + (y-v)^2) / (2 sigma^2)) over all points, clamped at 1.
// Pixel (x, y) samples the field at integer coordinates, so a point exactly
// on a pixel peaks that pixel at 1.
template <typename Scalar>
HeatmapT<Scalar> render_gaussian_labels(
    const std::vector<KeypointT<Scalar>>& points, int width, int height,
    Scalar sigma) {
  if (width < 1 || height < 1)
    throw InvalidInput("label heatmap needs positive dimensions");
  if (!(sigma > Scalar(0))) throw InvalidInput("label sigma must be > 0");
  HeatmapT<Scalar> out;
  out.values = MatX<Scalar>::Zero(height, width);
  const Scalar inv = Scalar(1) / (2 * sigma * sigma);
  // Beyond 6 sigma a bump contributes < 1.6e-8; restricting the stamp keeps
  // rendering O(points) instead of O(points * pixels).
  const int reach = static_cast<int>(std::ceil(6 * static_cast<double>(sigma))) + 1;
  for (const auto& pt : points) {
    const int xc = static_cast<int>(std::lround(static_cast<double>(pt.u)));
    const int yc = static_cast<int>(std::lround(static_cast<double>(pt.v)));
    const int x0 = std::max(0, xc - reach), x1 = std::min(width - 1, xc + reach);
    const int y0 = std::max(0, yc - reach), y1 = std::min(height - 1, yc + reach);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const Scalar dx = Scalar(x) - pt.u;
        const Scalar dy = Scalar(y) - pt.v;
        out.values(y, x) += std::exp(-(dx * dx + dy * dy) * inv);
      }
  }
  out.values = out.values.cwiseMin(Scalar(1));
  return out;
}

// log(value + eps), elementwise. Exponential weighting of log-values makes
// the softargmax weights proportional to the raw values themselves — the
// right domain for probability-scaled heatmaps such as rendered labels,
// whose [0, 1] range is otherwise too flat for e^f to localize anything.
template <typename Scalar>
HeatmapT<Scalar> log_transform(const HeatmapT<Scalar>& heatmap,
                               Scalar eps = Scalar(1e-12)) {
  if (!(eps > Scalar(0))) throw InvalidInput("log-transform eps must be > 0");
  if ((heatmap.values.array() + eps <= Scalar(0)).any())
    throw InvalidInput("log transform needs values with value + eps > 0");
  HeatmapT<Scalar> out;
  out.values = (heatmap.values.array() + eps).log().matrix();
  return out;
}

using Heatmap = HeatmapT<double>;
using Keypoint = KeypointT<double>;

}  // namespace epipose
