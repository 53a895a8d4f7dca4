#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epipose/descriptor.hpp"
#include "epipose/fundamental.hpp"
#include "epipose/heatmap.hpp"
#include "epipose/predictors.hpp"
#include "epipose/trajectory.hpp"
#include "epipose/types.hpp"

// File formats. All text output is UTF-8 with LF line endings and floats
// printed with 17 significant digits so values round-trip bit-exactly.

namespace epipose {

// "%.17g" rendering used for every float we write.
std::string format_g17(double value);

// ---- correspondence CSV: header "u1,v1,u2,v2" or "u1,v1,u2,v2,weight" ----

struct CorrespondenceFileData {
  CorrespondenceSet set;
  std::vector<double> weights;  // empty unless the file had a weight column
  bool has_weights = false;
};

CorrespondenceFileData read_correspondences(const std::string& path);
void write_correspondences(const std::string& path,
                           const CorrespondenceSet& set,
                           const std::vector<double>* weights = nullptr);

// ---- KITTI pose text: 12 space-separated values per line, the row-major
// upper 3x4 of the camera-to-world matrix ----

Trajectory read_kitti_trajectory(const std::string& path);
void write_kitti_trajectory(const std::string& path, const Trajectory& traj);

// ---- EPHM binary tensors: magic "EPHM", little-endian u32 height, width,
// depth, then float32 data indexed (y*width + x)*depth + d ----

struct EphmTensor {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t depth = 0;
  std::vector<float> data;

  float at(std::uint32_t y, std::uint32_t x, std::uint32_t d) const {
    return data[(std::size_t(y) * width + x) * depth + d];
  }
};

EphmTensor load_ephm(const std::string& path);
void save_ephm(const std::string& path, const EphmTensor& tensor);

Heatmap heatmap_from_ephm(const EphmTensor& tensor);       // depth must be 1
EphmTensor ephm_from_heatmap(const Heatmap& heatmap);
DescriptorMap descriptor_map_from_ephm(const EphmTensor& tensor);

// ---- MLP weight model: JSON {"layers": [{"rows", "cols", "weights"
// (row-major), "bias"}...], "activation": "relu"} ----

MlpModel load_mlp_model(const std::string& path);
WeightPredictorPtr<double> file_weight_predictor(const std::string& path);

// ---- fundamental matrix JSON: {"fundamental": [9 row-major values]} ----

FundamentalMatrix read_fundamental_json(const std::string& path);
void write_fundamental_json(const std::string& path,
                            const FundamentalMatrix& f);

}  // namespace epipose
