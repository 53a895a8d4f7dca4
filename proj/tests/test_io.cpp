#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

#include "epipose/io.hpp"
#include "epipose/json_out.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

using namespace epipose;

namespace {

// message of the exception a callable throws; fails the test if none comes
template <typename Exception, typename Fn>
std::string thrown_message(Fn&& fn) {
  try {
    fn();
  } catch (const Exception& e) {
    return e.what();
  }
  FAIL("expected exception was not thrown");
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("format_g17 round-trips doubles through text exactly") {
  PortableRng rng(901);
  std::vector<double> cases{0.0,   1.0,        -1.0,       0.1,
                            1e300, 1e-300,     -2.5e-17,   3.14159,
                            1e17,  123456789.123456789};
  for (int i = 0; i < 200; ++i)
    cases.push_back((rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-30, 30)));
  for (double v : cases) {
    const std::string text = format_g17(v);
    const double back = std::strtod(text.c_str(), nullptr);
    CHECK(back == v);
    CHECK(std::signbit(back) == std::signbit(v));
  }
}

TEST_CASE("correspondence files round-trip bit-exactly") {
  oracles::TempDir dir("io_csv");
  CorrespondenceSet set;
  set.push_back({0.1, -2.5e-17, 123456789.123456789, 1e-300});
  set.push_back({640.0, 480.0, 0.0, -0.0});
  set.push_back({1.0 / 3.0, 2.0 / 3.0, 1e17, 5.5});
  const std::string plain = dir.path("plain.csv");
  write_correspondences(plain, set);
  const CorrespondenceFileData back = read_correspondences(plain);
  CHECK_FALSE(back.has_weights);
  CHECK(back.weights.empty());
  REQUIRE(back.set.size() == set.size());
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    CHECK(back.set[i].u1 == set[i].u1);
    CHECK(back.set[i].v1 == set[i].v1);
    CHECK(back.set[i].u2 == set[i].u2);
    CHECK(back.set[i].v2 == set[i].v2);
  }

  const std::vector<double> weights{1.0, 0.25, 1e-17};
  const std::string weighted = dir.path("weighted.csv");
  write_correspondences(weighted, set, &weights);
  const CorrespondenceFileData wback = read_correspondences(weighted);
  CHECK(wback.has_weights);
  REQUIRE(wback.weights.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(wback.weights[i] == weights[i]);

  // the written form uses LF endings and the exact header
  const std::string bytes = oracles::read_file_bytes(plain);
  CHECK(bytes.rfind("u1,v1,u2,v2\n", 0) == 0);
  CHECK(bytes.find('\r') == std::string::npos);
}

TEST_CASE("correspondence parse errors carry the line number") {
  oracles::TempDir dir("io_csv_err");
  const std::string bad_header = dir.path("h.csv");
  oracles::write_file_bytes(bad_header, "x1,y1,x2,y2\n1,2,3,4\n");
  const std::string m1 = thrown_message<ParseError>(
      [&] { read_correspondences(bad_header); });
  CHECK(contains(m1, ":1:"));
  CHECK(contains(m1, "header"));

  const std::string bad_number = dir.path("n.csv");
  oracles::write_file_bytes(bad_number,
                            "u1,v1,u2,v2\n1,2,3,4\n1,2,three,4\n");
  const std::string m2 = thrown_message<ParseError>(
      [&] { read_correspondences(bad_number); });
  CHECK(contains(m2, ":3:"));
  CHECK(contains(m2, "malformed number 'three'"));

  const std::string bad_count = dir.path("c.csv");
  oracles::write_file_bytes(bad_count, "u1,v1,u2,v2\n1,2,3\n");
  const std::string m3 = thrown_message<ParseError>(
      [&] { read_correspondences(bad_count); });
  CHECK(contains(m3, ":2:"));
  CHECK(contains(m3, "expected 4 fields, got 3"));

  const std::string missing_weight = dir.path("w.csv");
  oracles::write_file_bytes(missing_weight,
                            "u1,v1,u2,v2,weight\n1,2,3,4\n");
  CHECK_THROWS_AS(read_correspondences(missing_weight), const ParseError&);

  CHECK_THROWS_AS(read_correspondences(dir.path("absent.csv")),
                  const ParseError&);

  CorrespondenceSet two;
  two.push_back({1, 2, 3, 4});
  two.push_back({5, 6, 7, 8});
  const std::vector<double> one_weight{1.0};
  CHECK_THROWS_AS(
      write_correspondences(dir.path("mismatch.csv"), two, &one_weight),
      const InvalidInput&);
}

TEST_CASE("an empty data section and trailing blank lines are fine") {
  oracles::TempDir dir("io_csv_edge");
  const std::string header_only = dir.path("empty.csv");
  oracles::write_file_bytes(header_only, "u1,v1,u2,v2\n");
  const CorrespondenceFileData empty = read_correspondences(header_only);
  CHECK(empty.set.size() == 0);

  const std::string trailing = dir.path("trailing.csv");
  oracles::write_file_bytes(trailing, "u1,v1,u2,v2\n1,2,3,4\n\n");
  CHECK(read_correspondences(trailing).set.size() == 1);

  // CRLF input is tolerated on read
  const std::string crlf = dir.path("crlf.csv");
  oracles::write_file_bytes(crlf, "u1,v1,u2,v2\r\n1,2,3,4\r\n");
  CHECK(read_correspondences(crlf).set.size() == 1);
}

TEST_CASE("KITTI trajectories round-trip bit-exactly") {
  oracles::TempDir dir("io_kitti");
  PortableRng rng(907);
  Trajectory traj;
  for (int i = 0; i < 7; ++i) {
    Mat34<double> pose;
    pose.leftCols<3>() = uniform_random_rotation<double>(rng);
    pose.col(3) = Vec3<double>{rng.uniform(-100, 100), rng.uniform(-5, 5),
                               rng.uniform(-100, 100)};
    traj.poses.push_back(pose);
  }
  const std::string path = dir.path("poses.txt");
  write_kitti_trajectory(path, traj);
  const Trajectory back = read_kitti_trajectory(path);
  REQUIRE(back.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    CHECK(back.poses[i] == traj.poses[i]);
  CHECK(oracles::read_file_bytes(path).find('\r') == std::string::npos);
}

TEST_CASE("KITTI parsing rejects short, long, and empty inputs") {
  oracles::TempDir dir("io_kitti_err");
  const std::string short_line = dir.path("short.txt");
  oracles::write_file_bytes(short_line, "1 0 0 0 0 1 0 0 0 0 1\n");
  const std::string m1 = thrown_message<ParseError>(
      [&] { read_kitti_trajectory(short_line); });
  CHECK(contains(m1, ":1:"));
  CHECK(contains(m1, "expected 12"));

  const std::string long_line = dir.path("long.txt");
  oracles::write_file_bytes(long_line,
                            "1 0 0 0 0 1 0 0 0 0 1 0\n"
                            "1 0 0 0 0 1 0 0 0 0 1 0 99\n");
  const std::string m2 = thrown_message<ParseError>(
      [&] { read_kitti_trajectory(long_line); });
  CHECK(contains(m2, ":2:"));
  CHECK(contains(m2, "more than 12"));

  const std::string empty = dir.path("empty.txt");
  oracles::write_file_bytes(empty, "\n\n");
  const std::string m3 = thrown_message<ParseError>(
      [&] { read_kitti_trajectory(empty); });
  CHECK(contains(m3, "no poses found"));
}

TEST_CASE("EPHM tensors round-trip float32 payloads exactly") {
  oracles::TempDir dir("io_ephm");
  EphmTensor tensor;
  tensor.height = 3;
  tensor.width = 4;
  tensor.depth = 2;
  tensor.data.resize(24);
  PortableRng rng(911);
  for (auto& v : tensor.data) v = float(rng.uniform(-10, 10));
  tensor.data[5] = -1.5f;
  tensor.data[6] = 1e-30f;
  const std::string path = dir.path("t.ephm");
  save_ephm(path, tensor);
  const EphmTensor back = load_ephm(path);
  CHECK(back.height == 3);
  CHECK(back.width == 4);
  CHECK(back.depth == 2);
  REQUIRE(back.data.size() == tensor.data.size());
  for (std::size_t i = 0; i < tensor.data.size(); ++i)
    CHECK(back.data[i] == tensor.data[i]);
  // layout: (y * width + x) * depth + d
  CHECK(back.at(1, 2, 1) == tensor.data[(1 * 4 + 2) * 2 + 1]);

  const std::string bytes = oracles::read_file_bytes(path);
  REQUIRE(bytes.size() == 16 + 24 * 4);
  CHECK(bytes.compare(0, 4, "EPHM") == 0);
  // little-endian height 3
  CHECK(int(bytes[4]) == 3);
  CHECK(int(bytes[5]) == 0);
}

TEST_CASE("EPHM loading rejects malformed files") {
  oracles::TempDir dir("io_ephm_err");
  const std::string truncated = dir.path("trunc.ephm");
  oracles::write_file_bytes(truncated, std::string("EPHM") + "\x01\x02");
  CHECK_THROWS_AS(load_ephm(truncated), const ParseError&);

  const std::string bad_magic = dir.path("magic.ephm");
  std::string m(16, '\0');
  m.replace(0, 4, "EPHX");
  oracles::write_file_bytes(bad_magic, m);
  const std::string msg = thrown_message<ParseError>(
      [&] { load_ephm(bad_magic); });
  CHECK(contains(msg, "bad magic"));

  // well-formed header with a zero dimension
  std::string z(16, '\0');
  z.replace(0, 4, "EPHM");
  z[8] = 4;  // width 4, height 0, depth 0
  const std::string zero = dir.path("zero.ephm");
  oracles::write_file_bytes(zero, z);
  CHECK_THROWS_AS(load_ephm(zero), const ParseError&);

  // header claims 1x1x1 but payload holds two floats
  std::string p(16 + 8, '\0');
  p.replace(0, 4, "EPHM");
  p[4] = 1;
  p[8] = 1;
  p[12] = 1;
  const std::string padded = dir.path("padded.ephm");
  oracles::write_file_bytes(padded, p);
  CHECK_THROWS_AS(load_ephm(padded), const ParseError&);

  EphmTensor bad;
  bad.height = 2;
  bad.width = 2;
  bad.depth = 1;
  bad.data.resize(3);  // should be 4
  CHECK_THROWS_AS(save_ephm(dir.path("bad.ephm"), bad), const InvalidInput&);
  bad.data.clear();
  bad.height = 0;
  CHECK_THROWS_AS(save_ephm(dir.path("bad2.ephm"), bad), const InvalidInput&);
}

TEST_CASE("heatmap and descriptor views map the tensor layout") {
  EphmTensor tensor;
  tensor.height = 2;
  tensor.width = 3;
  tensor.depth = 1;
  tensor.data = {0.f, 1.f, 2.f, 3.f, 4.f, 5.f};
  const Heatmap h = heatmap_from_ephm(tensor);
  REQUIRE(h.values.rows() == 2);
  REQUIRE(h.values.cols() == 3);
  for (std::uint32_t y = 0; y < 2; ++y)
    for (std::uint32_t x = 0; x < 3; ++x)
      CHECK(h.values(y, x) == double(tensor.at(y, x, 0)));

  const EphmTensor back = ephm_from_heatmap(h);
  CHECK(back.height == 2);
  CHECK(back.width == 3);
  CHECK(back.depth == 1);
  CHECK(back.data == tensor.data);

  EphmTensor deep = tensor;
  deep.depth = 2;
  deep.data.resize(12);
  for (std::size_t i = 0; i < 12; ++i) deep.data[i] = float(i) * 0.5f;
  CHECK_THROWS_AS(heatmap_from_ephm(deep), const InvalidInput&);

  const DescriptorMap map = descriptor_map_from_ephm(deep);
  CHECK(map.width_c == 3);
  CHECK(map.height_c == 2);
  CHECK(map.dim() == 2);
  for (std::uint32_t y = 0; y < 2; ++y)
    for (std::uint32_t x = 0; x < 3; ++x)
      for (std::uint32_t d = 0; d < 2; ++d)
        CHECK(map.cell(int(x), int(y))(d) == double(deep.at(y, x, d)));
}

TEST_CASE("MLP models load from JSON and run") {
  oracles::TempDir dir("io_mlp");
  const std::string path = dir.path("model.json");
  oracles::write_file_bytes(path, R"({
    "activation": "relu",
    "layers": [
      {"rows": 2, "cols": 6,
       "weights": [0.1, 0, 0, 0, 0, 0,  0, -0.2, 0, 0, 0, 0],
       "bias": [0.5, -0.5]},
      {"rows": 1, "cols": 2, "weights": [1.0, 2.0], "bias": [0.25]}
    ]
  })");
  const MlpModel model = load_mlp_model(path);
  REQUIRE(model.layers.size() == 2);
  CHECK(model.layers[0].weights.rows() == 2);
  CHECK(model.layers[0].weights.cols() == 6);
  CHECK(model.layers[0].weights(0, 0) == 0.1);
  CHECK(model.layers[0].weights(1, 1) == -0.2);
  CHECK(model.layers[0].bias(1) == -0.5);
  CHECK(model.layers[1].weights(0, 1) == 2.0);

  VecX<double> input(6);
  input << 1, 2, 3, 4, 5, 6;
  const VecX<double> out = model.forward(input);
  // hidden: relu(0.1*1 + 0.5) = 0.6, relu(-0.2*2 - 0.5) = 0
  const double expected = 1.0 / (1.0 + std::exp(-(0.6 * 1.0 + 0.25)));
  CHECK(out(0) == doctest::Approx(expected).epsilon(1e-12));

  const WeightPredictorPtr<double> pred = file_weight_predictor(path);
  CorrespondenceSet set;
  set.push_back({1, 2, 3, 4});
  VecX<double> residuals(1), prev(1);
  residuals << 5;
  prev << 6;
  const VecX<double> w = pred->update(set, prev, residuals);
  CHECK(w(0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("MLP loading distinguishes parse errors from model errors") {
  oracles::TempDir dir("io_mlp_err");
  const std::string garbled = dir.path("garbled.json");
  oracles::write_file_bytes(garbled, "{\"layers\": [");
  CHECK_THROWS_AS(load_mlp_model(garbled), const ParseError&);

  const std::string not_object = dir.path("arr.json");
  oracles::write_file_bytes(not_object, "[1, 2, 3]");
  CHECK_THROWS_AS(load_mlp_model(not_object), const ModelLoadError&);

  const std::string unknown_key = dir.path("unk.json");
  oracles::write_file_bytes(
      unknown_key,
      R"({"activation": "relu", "layers": [], "extra": 1})");
  CHECK_THROWS_AS(load_mlp_model(unknown_key), const ModelLoadError&);

  const std::string bad_act = dir.path("act.json");
  oracles::write_file_bytes(
      bad_act,
      R"({"activation": "sigmoid", "layers": [{"rows": 1, "cols": 6, "weights": [0,0,0,0,0,0], "bias": [0]}]})");
  CHECK_THROWS_AS(load_mlp_model(bad_act), const ModelLoadError&);

  const std::string no_layers = dir.path("nolayers.json");
  oracles::write_file_bytes(no_layers,
                            R"({"activation": "relu", "layers": []})");
  CHECK_THROWS_AS(load_mlp_model(no_layers), const ModelLoadError&);

  const std::string short_weights = dir.path("shortw.json");
  oracles::write_file_bytes(
      short_weights,
      R"({"activation": "relu", "layers": [{"rows": 1, "cols": 6, "weights": [0, 0, 0], "bias": [0]}]})");
  CHECK_THROWS_AS(load_mlp_model(short_weights), const ModelLoadError&);

  const std::string bad_bias = dir.path("badb.json");
  oracles::write_file_bytes(
      bad_bias,
      R"({"activation": "relu", "layers": [{"rows": 2, "cols": 6, "weights": [0,0,0,0,0,0,0,0,0,0,0,0], "bias": [0]}]})");
  CHECK_THROWS_AS(load_mlp_model(bad_bias), const ModelLoadError&);

  const std::string zero_rows = dir.path("zr.json");
  oracles::write_file_bytes(
      zero_rows,
      R"({"activation": "relu", "layers": [{"rows": 0, "cols": 6, "weights": [], "bias": []}]})");
  CHECK_THROWS_AS(load_mlp_model(zero_rows), const ModelLoadError&);

  const std::string stringy = dir.path("str.json");
  oracles::write_file_bytes(
      stringy,
      R"({"activation": "relu", "layers": [{"rows": 1, "cols": 6, "weights": [0, 0, "x", 0, 0, 0], "bias": [0]}]})");
  CHECK_THROWS_AS(load_mlp_model(stringy), const ModelLoadError&);

  // loads fine but cannot serve as a weight predictor: 5 inputs, 2 outputs
  const std::string wrong_shape = dir.path("shape.json");
  oracles::write_file_bytes(
      wrong_shape,
      R"({"activation": "relu", "layers": [{"rows": 2, "cols": 5, "weights": [0,0,0,0,0,0,0,0,0,0], "bias": [0, 0]}]})");
  CHECK_NOTHROW(load_mlp_model(wrong_shape));
  CHECK_THROWS_AS(file_weight_predictor(wrong_shape),
                  const ModelLoadError&);
}

TEST_CASE("fundamental-matrix JSON round-trips the canonical form") {
  oracles::TempDir dir("io_fjson");
  const auto fixture = oracles::make_oracle_scene(919, 20);
  const std::string path = dir.path("f.json");
  write_fundamental_json(path, fixture.f_gt);
  const FundamentalMatrix back = read_fundamental_json(path);
  CHECK(back.m == fixture.f_gt.m);

  const std::string arr = dir.path("arr.json");
  oracles::write_file_bytes(arr, "[1, 2]");
  CHECK_THROWS_AS(read_fundamental_json(arr), const ParseError&);

  const std::string eight = dir.path("eight.json");
  oracles::write_file_bytes(eight,
                            R"({"fundamental": [1,2,3,4,5,6,7,8]})");
  CHECK_THROWS_AS(read_fundamental_json(eight), const ParseError&);

  const std::string stringy = dir.path("str.json");
  oracles::write_file_bytes(
      stringy, R"({"fundamental": [1,2,3,4,"five",6,7,8,9]})");
  CHECK_THROWS_AS(read_fundamental_json(stringy), const ParseError&);

  const std::string zeros = dir.path("zeros.json");
  oracles::write_file_bytes(zeros,
                            R"({"fundamental": [0,0,0,0,0,0,0,0,0]})");
  const std::string msg = thrown_message<ParseError>(
      [&] { read_fundamental_json(zeros); });
  CHECK(contains(msg, "zero or non-finite"));

  const std::string broken = dir.path("broken.json");
  oracles::write_file_bytes(broken, "{\"fundamental\": [1,");
  CHECK_THROWS_AS(read_fundamental_json(broken), const ParseError&);
}

TEST_CASE("json_to_string is sorted, escaped, and LF-only") {
  nlohmann::json j;
  j["zeta"] = 1;
  j["alpha"] = nlohmann::json::array({1.5, nlohmann::json(), true});
  j["mid"] = "a\"b\n\tc\x01";
  j["nested"] = nlohmann::json::object();
  j["nested"]["k"] = std::nan("");
  const std::string text = json_to_string(j);
  const std::string expected =
      "{\n"
      "  \"alpha\": [\n"
      "    1.5,\n"
      "    null,\n"
      "    true\n"
      "  ],\n"
      "  \"mid\": \"a\\\"b\\n\\tc\\u0001\",\n"
      "  \"nested\": {\n"
      "    \"k\": null\n"
      "  },\n"
      "  \"zeta\": 1\n"
      "}";
  CHECK(text == expected);
  CHECK(text.find('\r') == std::string::npos);

  // floats render through format_g17 so they parse back identically
  nlohmann::json f;
  f["v"] = 0.1;
  const std::string ftext = json_to_string(f);
  CHECK(contains(ftext, format_g17(0.1)));
}
