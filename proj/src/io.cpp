#include "epipose/io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "epipose/errors.hpp"
#include "epipose/json_out.hpp"

namespace epipose {

namespace {

std::string line_tag(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no) + ": ";
}

// Strict float field: strtod must consume the whole token.
double parse_double_field(const std::string& field, const std::string& path,
                          std::size_t line_no) {
  if (field.empty())
    throw ParseError(line_tag(path, line_no) + "empty numeric field");
  const char* begin = field.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + field.size())
    throw ParseError(line_tag(path, line_no) + "malformed number '" + field +
                     "'");
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::ifstream open_for_read(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw ParseError("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: we control every byte
  if (!out) throw ParseError("cannot open " + path + " for writing");
  return out;
}

}  // namespace

std::string format_g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

CorrespondenceFileData read_correspondences(const std::string& path) {
  std::ifstream in = open_for_read(path);
  CorrespondenceFileData out;

  std::string line;
  if (!std::getline(in, line))
    throw ParseError(line_tag(path, 1) + "missing header");
  line = strip_cr(line);
  if (line == "u1,v1,u2,v2") {
    out.has_weights = false;
  } else if (line == "u1,v1,u2,v2,weight") {
    out.has_weights = true;
  } else {
    throw ParseError(line_tag(path, 1) +
                     "header must be 'u1,v1,u2,v2' or 'u1,v1,u2,v2,weight'");
  }

  const std::size_t want = out.has_weights ? 5 : 4;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;  // tolerate a trailing blank line
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != want)
      throw ParseError(line_tag(path, line_no) + "expected " +
                       std::to_string(want) + " fields, got " +
                       std::to_string(fields.size()));
    Correspondence c;
    c.u1 = parse_double_field(fields[0], path, line_no);
    c.v1 = parse_double_field(fields[1], path, line_no);
    c.u2 = parse_double_field(fields[2], path, line_no);
    c.v2 = parse_double_field(fields[3], path, line_no);
    out.set.push_back(c);
    if (out.has_weights)
      out.weights.push_back(parse_double_field(fields[4], path, line_no));
  }
  return out;
}

void write_correspondences(const std::string& path,
                           const CorrespondenceSet& set,
                           const std::vector<double>* weights) {
  if (weights && Eigen::Index(weights->size()) != set.size())
    throw InvalidInput("weight count does not match correspondence count");
  std::ofstream out = open_for_write(path);
  out << (weights ? "u1,v1,u2,v2,weight" : "u1,v1,u2,v2") << "\n";
  for (std::size_t i = 0; i < std::size_t(set.size()); ++i) {
    const Correspondence& c = set[i];
    out << format_g17(c.u1) << "," << format_g17(c.v1) << ","
        << format_g17(c.u2) << "," << format_g17(c.v2);
    if (weights) out << "," << format_g17((*weights)[i]);
    out << "\n";
  }
}

Trajectory read_kitti_trajectory(const std::string& path) {
  std::ifstream in = open_for_read(path);
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    Mat34<double> pose;
    for (int i = 0; i < 12; ++i) {
      double v;
      if (!(ss >> v))
        throw ParseError(line_tag(path, line_no) +
                         "expected 12 pose values per line");
      pose(i / 4, i % 4) = v;
    }
    double extra;
    if (ss >> extra)
      throw ParseError(line_tag(path, line_no) + "more than 12 pose values");
    traj.poses.push_back(pose);
  }
  if (traj.poses.empty()) throw ParseError(path + ": no poses found");
  return traj;
}

void write_kitti_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_for_write(path);
  for (const auto& pose : traj.poses) {
    for (int i = 0; i < 12; ++i) {
      if (i) out << " ";
      out << format_g17(pose(i / 4, i % 4));
    }
    out << "\n";
  }
}

namespace {

std::uint32_t read_u32_le(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {char(v & 0xff), char((v >> 8) & 0xff),
                         char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

}  // namespace

EphmTensor load_ephm(const std::string& path) {
  std::ifstream in = open_for_read(path, /*binary=*/true);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 16)
    throw ParseError(path + ": truncated EPHM header");
  if (bytes.compare(0, 4, "EPHM") != 0)
    throw ParseError(path + ": bad magic, expected 'EPHM'");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  EphmTensor tensor;
  tensor.height = read_u32_le(p + 4);
  tensor.width = read_u32_le(p + 8);
  tensor.depth = read_u32_le(p + 12);
  const std::uint64_t count = std::uint64_t(tensor.height) * tensor.width *
                              tensor.depth;
  if (count == 0) throw ParseError(path + ": zero-sized tensor");
  if (bytes.size() != 16 + count * 4)
    throw ParseError(path + ": payload size does not match header");
  tensor.data.resize(count);
  for (std::uint64_t i = 0; i < count; ++i)
    tensor.data[i] = std::bit_cast<float>(read_u32_le(p + 16 + i * 4));
  return tensor;
}

void save_ephm(const std::string& path, const EphmTensor& tensor) {
  const std::uint64_t count = std::uint64_t(tensor.height) * tensor.width *
                              tensor.depth;
  if (count == 0 || tensor.data.size() != count)
    throw InvalidInput("EPHM tensor dimensions do not match its data");
  std::ofstream out = open_for_write(path);
  out.write("EPHM", 4);
  write_u32_le(out, tensor.height);
  write_u32_le(out, tensor.width);
  write_u32_le(out, tensor.depth);
  for (float f : tensor.data) write_u32_le(out, std::bit_cast<std::uint32_t>(f));
}

Heatmap heatmap_from_ephm(const EphmTensor& tensor) {
  if (tensor.depth != 1)
    throw InvalidInput("heatmap tensors must have depth 1");
  Heatmap h;
  h.values.resize(tensor.height, tensor.width);
  for (std::uint32_t y = 0; y < tensor.height; ++y)
    for (std::uint32_t x = 0; x < tensor.width; ++x)
      h.values(y, x) = tensor.at(y, x, 0);
  return h;
}

EphmTensor ephm_from_heatmap(const Heatmap& heatmap) {
  EphmTensor tensor;
  tensor.height = std::uint32_t(heatmap.values.rows());
  tensor.width = std::uint32_t(heatmap.values.cols());
  tensor.depth = 1;
  tensor.data.resize(std::size_t(tensor.height) * tensor.width);
  for (std::uint32_t y = 0; y < tensor.height; ++y)
    for (std::uint32_t x = 0; x < tensor.width; ++x)
      tensor.data[std::size_t(y) * tensor.width + x] =
          float(heatmap.values(y, x));
  return tensor;
}

DescriptorMap descriptor_map_from_ephm(const EphmTensor& tensor) {
  DescriptorMap map;
  map.height_c = int(tensor.height);
  map.width_c = int(tensor.width);
  map.data.resize(tensor.depth, std::size_t(tensor.height) * tensor.width);
  for (std::uint32_t y = 0; y < tensor.height; ++y)
    for (std::uint32_t x = 0; x < tensor.width; ++x)
      for (std::uint32_t d = 0; d < tensor.depth; ++d)
        map.data(d, std::size_t(y) * tensor.width + x) = tensor.at(y, x, d);
  return map;
}

namespace {

nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace

MlpModel load_mlp_model(const std::string& path) {
  const nlohmann::json j = parse_json_file(path);
  if (!j.is_object()) throw ModelLoadError(path + ": model must be an object");
  for (const auto& item : j.items())
    if (item.key() != "layers" && item.key() != "activation")
      throw ModelLoadError(path + ": unknown key '" + item.key() + "'");
  if (!j.contains("activation") || !j["activation"].is_string() ||
      j["activation"].get<std::string>() != "relu")
    throw ModelLoadError(path + ": activation must be \"relu\"");
  if (!j.contains("layers") || !j["layers"].is_array() || j["layers"].empty())
    throw ModelLoadError(path + ": layers must be a non-empty array");

  MlpModel model;
  for (const auto& jl : j["layers"]) {
    if (!jl.is_object())
      throw ModelLoadError(path + ": each layer must be an object");
    for (const auto& item : jl.items())
      if (item.key() != "rows" && item.key() != "cols" &&
          item.key() != "weights" && item.key() != "bias")
        throw ModelLoadError(path + ": unknown layer key '" + item.key() +
                             "'");
    if (!jl.contains("rows") || !jl["rows"].is_number_integer() ||
        !jl.contains("cols") || !jl["cols"].is_number_integer())
      throw ModelLoadError(path + ": layer rows/cols must be integers");
    const long long rows = jl["rows"].get<long long>();
    const long long cols = jl["cols"].get<long long>();
    if (rows <= 0 || cols <= 0)
      throw ModelLoadError(path + ": layer dimensions must be positive");
    if (!jl.contains("weights") || !jl["weights"].is_array() ||
        (long long)jl["weights"].size() != rows * cols)
      throw ModelLoadError(path + ": weights must hold rows*cols values");
    if (!jl.contains("bias") || !jl["bias"].is_array() ||
        (long long)jl["bias"].size() != rows)
      throw ModelLoadError(path + ": bias must hold rows values");

    MlpLayer layer;
    layer.weights.resize(rows, cols);
    for (long long r = 0; r < rows; ++r)
      for (long long c = 0; c < cols; ++c) {
        const auto& v = jl["weights"][std::size_t(r * cols + c)];
        if (!v.is_number())
          throw ModelLoadError(path + ": weights must be numbers");
        layer.weights(r, c) = v.get<double>();
      }
    layer.bias.resize(rows);
    for (long long r = 0; r < rows; ++r) {
      const auto& v = jl["bias"][std::size_t(r)];
      if (!v.is_number())
        throw ModelLoadError(path + ": bias must be numbers");
      layer.bias(r) = v.get<double>();
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

WeightPredictorPtr<double> file_weight_predictor(const std::string& path) {
  return mlp_predictor<double>(load_mlp_model(path));
}

FundamentalMatrix read_fundamental_json(const std::string& path) {
  const nlohmann::json j = parse_json_file(path);
  if (!j.is_object() || !j.contains("fundamental"))
    throw ParseError(path + ": expected object with key 'fundamental'");
  const auto& arr = j["fundamental"];
  if (!arr.is_array() || arr.size() != 9)
    throw ParseError(path + ": 'fundamental' must hold 9 row-major values");
  Mat3<double> m;
  for (int i = 0; i < 9; ++i) {
    if (!arr[i].is_number())
      throw ParseError(path + ": 'fundamental' entries must be numbers");
    m(i / 3, i % 3) = arr[i].get<double>();
  }
  try {
    return canonicalize_fundamental(m);
  } catch (const ZeroMatrix&) {
    throw ParseError(path + ": fundamental matrix is zero or non-finite");
  }
}

void write_fundamental_json(const std::string& path,
                            const FundamentalMatrix& f) {
  nlohmann::json j;
  std::vector<double> values(9);
  for (int i = 0; i < 9; ++i) values[i] = f.m(i / 3, i % 3);
  j["fundamental"] = values;
  std::ofstream out = open_for_write(path);
  out << json_to_string(j) << "\n";
}

}  // namespace epipose
