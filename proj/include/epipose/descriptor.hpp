#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "epipose/errors.hpp"
#include "epipose/types.hpp"

namespace epipose {

// Descriptor grid at 1/8 image resolution: column (yc * width_c + xc) of
// `data` holds the D-vector of cell (xc, yc). A full-resolution coordinate p
// maps to cell coordinate p / 8 with cell centers at integer cell
// coordinates.
template <typename Scalar>
struct DescriptorMapT {
  static constexpr int kCell = 8;

  int width_c = 0, height_c = 0;
  MatX<Scalar> data;  // D x (height_c * width_c)

  int dim() const { return static_cast<int>(data.rows()); }

  auto cell(int xc, int yc) const { return data.col(yc * width_c + xc); }
};

// Bilinear interpolation of the four surrounding cells at full-res point
// (u, v), L2-normalized. Outside the grid the lookup clamps to the border
// cells. An all-zero neighborhood normalizes to the zero vector.
template <typename Scalar>
VecX<Scalar> bilinear_sample_descriptor(const DescriptorMapT<Scalar>& map,
                                        Scalar u, Scalar v) {
  if (map.width_c < 1 || map.height_c < 1 || map.dim() < 1)
    throw InvalidInput("descriptor map is empty");
  const Scalar gx = u / Scalar(DescriptorMapT<Scalar>::kCell);
  const Scalar gy = v / Scalar(DescriptorMapT<Scalar>::kCell);
  const int x0 = static_cast<int>(std::floor(static_cast<double>(gx)));
  const int y0 = static_cast<int>(std::floor(static_cast<double>(gy)));
  const Scalar fx = gx - Scalar(x0);
  const Scalar fy = gy - Scalar(y0);

  auto clamp_x = [&](int x) { return std::clamp(x, 0, map.width_c - 1); };
  auto clamp_y = [&](int y) { return std::clamp(y, 0, map.height_c - 1); };

  VecX<Scalar> d =
      (1 - fx) * (1 - fy) * map.cell(clamp_x(x0), clamp_y(y0)) +
      fx * (1 - fy) * map.cell(clamp_x(x0 + 1), clamp_y(y0)) +
      (1 - fx) * fy * map.cell(clamp_x(x0), clamp_y(y0 + 1)) +
      fx * fy * map.cell(clamp_x(x0 + 1), clamp_y(y0 + 1));
  const Scalar n = d.norm();
  if (n > Scalar(0)) d /= n;
  return d;
}

// Two-way nearest-neighbor matching on L2 distance: (i, j) is kept iff j is
// i's nearest neighbor in B, i is j's nearest neighbor in A, and the
// distance is <= max_distance. Nearest-neighbor ties resolve to the smaller
// index, making the result deterministic and symmetric. Pairs come back
// sorted by first index.
template <typename Scalar>
std::vector<std::pair<int, int>> mutual_nearest_neighbor_match(
    const std::vector<VecX<Scalar>>& desc_a,
    const std::vector<VecX<Scalar>>& desc_b, Scalar max_distance) {
  const int na = static_cast<int>(desc_a.size());
  const int nb = static_cast<int>(desc_b.size());
  std::vector<std::pair<int, int>> out;
  if (na == 0 || nb == 0) return out;

  auto nearest = [](const VecX<Scalar>& q, const std::vector<VecX<Scalar>>& pool) {
    int best = 0;
    Scalar best_d2 = (q - pool[0]).squaredNorm();
    for (int k = 1; k < static_cast<int>(pool.size()); ++k) {
      const Scalar d2 = (q - pool[static_cast<std::size_t>(k)]).squaredNorm();
      if (d2 < best_d2) {  // strict: ties keep the smaller index
        best_d2 = d2;
        best = k;
      }
    }
    return std::pair<int, Scalar>{best, best_d2};
  };

  std::vector<int> nn_ba(static_cast<std::size_t>(nb));
  for (int j = 0; j < nb; ++j)
    nn_ba[static_cast<std::size_t>(j)] =
        nearest(desc_b[static_cast<std::size_t>(j)], desc_a).first;

  for (int i = 0; i < na; ++i) {
    const auto [j, d2] = nearest(desc_a[static_cast<std::size_t>(i)], desc_b);
    if (nn_ba[static_cast<std::size_t>(j)] != i) continue;
    if (!(std::sqrt(d2) <= max_distance)) continue;
    out.emplace_back(i, j);
  }
  return out;  // i ascends by construction
}

using DescriptorMap = DescriptorMapT<double>;

}  // namespace epipose
