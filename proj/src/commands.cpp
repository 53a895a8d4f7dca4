#include "epipose/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

#include "epipose/epipose.hpp"
#include "epipose/io.hpp"
#include "epipose/json_out.hpp"

namespace epipose {

namespace {

// Stable exception -> exit code mapping shared by every command.
int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientData& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelLoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

void write_text_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << content;
}

enum class CliMethod { kRansac, kIrlsUniform, kIrlsGm, kIrlsHuber, kIrlsMlp };

CliMethod parse_method_name(const std::string& name) {
  if (name == "ransac") return CliMethod::kRansac;
  if (name == "irls-uniform") return CliMethod::kIrlsUniform;
  if (name == "irls-gm") return CliMethod::kIrlsGm;
  if (name == "irls-huber") return CliMethod::kIrlsHuber;
  if (name == "irls-mlp") return CliMethod::kIrlsMlp;
  throw ParseError("unknown method '" + name +
                   "' (expected ransac, irls-uniform, irls-gm, irls-huber, "
                   "or irls-mlp)");
}

std::string method_label(CliMethod m) {
  switch (m) {
    case CliMethod::kRansac: return "ransac";
    case CliMethod::kIrlsUniform: return "irls-uniform";
    case CliMethod::kIrlsGm: return "irls-gm";
    case CliMethod::kIrlsHuber: return "irls-huber";
    case CliMethod::kIrlsMlp: return "irls-mlp";
  }
  return "?";
}

struct EstimatorParams {
  double ransac_threshold = 1e-2;
  int ransac_max_iterations = 1000;
  double ransac_confidence = 0.99;
  int irls_iterations = 5;
  double gm_scale = 2e-2;
  double huber_delta = 2e-2;
  std::string mlp_model;  // path, resolved by the caller
};

PoseEstimate run_single_estimate(CliMethod method, const CorrespondenceSet& set,
                                 const CameraIntrinsics& k1,
                                 const CameraIntrinsics& k2,
                                 const EstimatorParams& params,
                                 std::uint64_t ransac_seed,
                                 const std::shared_ptr<const MlpModel>& mlp) {
  PoseEstimationConfig cfg;
  if (method == CliMethod::kRansac) {
    cfg.method = EstimationMethod::kRansac;
    cfg.ransac.threshold = params.ransac_threshold;
    cfg.ransac.max_iterations = params.ransac_max_iterations;
    cfg.ransac.confidence = params.ransac_confidence;
    cfg.ransac.seed = ransac_seed;
  } else {
    cfg.method = EstimationMethod::kIrls;
    cfg.irls.iterations = params.irls_iterations;
    switch (method) {
      case CliMethod::kIrlsUniform:
        cfg.irls.predictor = uniform_predictor<double>();
        break;
      case CliMethod::kIrlsGm:
        cfg.irls.predictor = geman_mcclure_predictor<double>(params.gm_scale);
        break;
      case CliMethod::kIrlsHuber:
        cfg.irls.predictor = huber_predictor<double>(params.huber_delta);
        break;
      case CliMethod::kIrlsMlp:
        if (!mlp)
          throw InvalidInput("irls-mlp requires a loaded weight model");
        cfg.irls.predictor = mlp_predictor<double>(*mlp);
        break;
      default: break;
    }
  }
  return estimate_relative_pose(set, k1, k2, cfg);
}

// ---- strict JSON helpers (unknown keys rejected) ----

void check_keys(const nlohmann::json& obj,
                std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ParseError(where + ": unknown key '" + item.key() + "'");
  }
}

double num_or(const nlohmann::json& obj, const char* key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number())
    throw ParseError(std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

long long int_or(const nlohmann::json& obj, const char* key, long long dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number_integer() && !obj[key].is_number_unsigned())
    throw ParseError(std::string("'") + key + "' must be an integer");
  return obj[key].get<long long>();
}

std::uint64_t u64_or(const nlohmann::json& obj, const char* key,
                     std::uint64_t dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer())
    throw ParseError(std::string("'") + key + "' must be an integer");
  if (obj[key].is_number_integer() && obj[key].get<long long>() < 0)
    throw ParseError(std::string("'") + key + "' must be non-negative");
  return obj[key].get<std::uint64_t>();
}

std::string str_or(const nlohmann::json& obj, const char* key,
                   const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_string())
    throw ParseError(std::string("'") + key + "' must be a string");
  return obj[key].get<std::string>();
}

struct BenchConfig {
  std::size_t num_pairs = 100;
  std::uint64_t seed = 0;
  std::vector<CliMethod> methods;
  int threads = 1;
  std::string output_csv = "bench_pairs.csv";
  std::string output_json = "bench_summary.json";
  std::vector<double> summary_thresholds = {0.5, 1.0, 2.0, 5.0};
  SceneConfig scene;
  CorruptionConfig corruption;
  EstimatorParams estimator;
};

BenchConfig parse_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path + " for reading");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path + ": config must be an object");
  check_keys(j,
             {"num_pairs", "seed", "methods", "threads", "output_csv",
              "output_json", "summary_thresholds", "scene", "corruption",
              "estimator"},
             path);

  BenchConfig cfg;
  const long long pairs = int_or(j, "num_pairs", 100);
  if (pairs < 1) throw ParseError("'num_pairs' must be >= 1");
  cfg.num_pairs = std::size_t(pairs);
  cfg.seed = u64_or(j, "seed", 0);
  cfg.threads = int(int_or(j, "threads", 1));
  if (cfg.threads < 1) throw ParseError("'threads' must be >= 1");
  cfg.output_csv = str_or(j, "output_csv", cfg.output_csv);
  cfg.output_json = str_or(j, "output_json", cfg.output_json);

  if (!j.contains("methods") || !j["methods"].is_array())
    throw ParseError("'methods' must be an array of method names");
  for (const auto& m : j["methods"]) {
    if (!m.is_string()) throw ParseError("'methods' entries must be strings");
    cfg.methods.push_back(parse_method_name(m.get<std::string>()));
  }
  if (cfg.methods.empty()) throw ParseError("'methods' must not be empty");

  if (j.contains("summary_thresholds")) {
    if (!j["summary_thresholds"].is_array())
      throw ParseError("'summary_thresholds' must be an array");
    cfg.summary_thresholds.clear();
    for (const auto& t : j["summary_thresholds"]) {
      if (!t.is_number())
        throw ParseError("'summary_thresholds' entries must be numbers");
      cfg.summary_thresholds.push_back(t.get<double>());
    }
  }

  if (j.contains("scene")) {
    const auto& js = j["scene"];
    if (!js.is_object()) throw ParseError("'scene' must be an object");
    check_keys(js,
               {"num_points", "depth_min", "depth_max",
                "rotation_magnitude_deg", "translation", "image_width",
                "image_height", "fx", "fy", "cx", "cy"},
               path + ": scene");
    cfg.scene.num_points = int(int_or(js, "num_points", cfg.scene.num_points));
    cfg.scene.depth_min = num_or(js, "depth_min", cfg.scene.depth_min);
    cfg.scene.depth_max = num_or(js, "depth_max", cfg.scene.depth_max);
    cfg.scene.rotation_magnitude =
        num_or(js, "rotation_magnitude_deg", cfg.scene.rotation_magnitude);
    const std::string dir = str_or(js, "translation", "random");
    if (dir == "forward")
      cfg.scene.translation_direction = TranslationDirection::kForward;
    else if (dir == "lateral")
      cfg.scene.translation_direction = TranslationDirection::kLateral;
    else if (dir == "random")
      cfg.scene.translation_direction = TranslationDirection::kRandom;
    else
      throw ParseError("'translation' must be forward, lateral, or random");
    cfg.scene.image_width =
        int(int_or(js, "image_width", cfg.scene.image_width));
    cfg.scene.image_height =
        int(int_or(js, "image_height", cfg.scene.image_height));
    cfg.scene.intrinsics.fx = num_or(js, "fx", cfg.scene.intrinsics.fx);
    cfg.scene.intrinsics.fy = num_or(js, "fy", cfg.scene.intrinsics.fy);
    cfg.scene.intrinsics.cx = num_or(js, "cx", cfg.scene.intrinsics.cx);
    cfg.scene.intrinsics.cy = num_or(js, "cy", cfg.scene.intrinsics.cy);
  }

  if (j.contains("corruption")) {
    const auto& jc = j["corruption"];
    if (!jc.is_object()) throw ParseError("'corruption' must be an object");
    check_keys(jc, {"noise_sigma", "outlier_ratio", "outlier_min_offset"},
               path + ": corruption");
    cfg.corruption.noise_sigma =
        num_or(jc, "noise_sigma", cfg.corruption.noise_sigma);
    cfg.corruption.outlier_ratio =
        num_or(jc, "outlier_ratio", cfg.corruption.outlier_ratio);
    cfg.corruption.outlier_min_offset =
        num_or(jc, "outlier_min_offset", cfg.corruption.outlier_min_offset);
  }

  if (j.contains("estimator")) {
    const auto& je = j["estimator"];
    if (!je.is_object()) throw ParseError("'estimator' must be an object");
    check_keys(je,
               {"ransac_threshold", "ransac_max_iterations",
                "ransac_confidence", "irls_iterations", "gm_scale",
                "huber_delta", "mlp_model"},
               path + ": estimator");
    cfg.estimator.ransac_threshold =
        num_or(je, "ransac_threshold", cfg.estimator.ransac_threshold);
    cfg.estimator.ransac_max_iterations = int(
        int_or(je, "ransac_max_iterations",
               cfg.estimator.ransac_max_iterations));
    cfg.estimator.ransac_confidence =
        num_or(je, "ransac_confidence", cfg.estimator.ransac_confidence);
    cfg.estimator.irls_iterations =
        int(int_or(je, "irls_iterations", cfg.estimator.irls_iterations));
    cfg.estimator.gm_scale = num_or(je, "gm_scale", cfg.estimator.gm_scale);
    cfg.estimator.huber_delta =
        num_or(je, "huber_delta", cfg.estimator.huber_delta);
    cfg.estimator.mlp_model = str_or(je, "mlp_model", "");
  }

  return cfg;
}

// ---- shared JSON fragments ----

nlohmann::json mat3_json(const Mat3<double>& m) {
  std::vector<double> v(9);
  for (int i = 0; i < 9; ++i) v[std::size_t(i)] = m(i / 3, i % 3);
  return nlohmann::json(v);
}

nlohmann::json vec3_json(const Vec3<double>& v) {
  return nlohmann::json(std::vector<double>{v(0), v(1), v(2)});
}

nlohmann::json stats_json(const ErrorStats& stats) {
  nlohmann::json j;
  j["mean"] = stats.mean;
  j["median"] = stats.median;
  nlohmann::json ratios = nlohmann::json::object();
  for (const auto& [threshold, ratio] : stats.inlier_ratios)
    ratios[format_g17(threshold)] = ratio;
  j["inlier_ratios"] = ratios;
  return j;
}

// Run everything with deterministic per-index work regardless of schedule:
// each index writes only its own slot.
void parallel_over(std::size_t n, int threads,
                   const std::function<void(std::size_t)>& work) {
  const int t_count = std::max(1, threads);
  if (t_count == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(t_count));
  for (int t = 0; t < t_count; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = std::size_t(t); i < n; i += std::size_t(t_count))
        work(i);
    });
  }
  for (auto& th : pool) th.join();
}

CameraIntrinsics parse_intrinsics_arg(const std::string& text) {
  std::vector<double> parts;
  std::string cur;
  std::istringstream ss(text);
  while (std::getline(ss, cur, ',')) {
    const char* begin = cur.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (cur.empty() || end != begin + cur.size())
      throw ParseError("--intrinsics expects \"fx,fy,cx,cy\", got '" + text +
                       "'");
    parts.push_back(v);
  }
  if (parts.size() != 4)
    throw ParseError("--intrinsics expects exactly 4 values \"fx,fy,cx,cy\"");
  CameraIntrinsics k;
  k.fx = parts[0];
  k.fy = parts[1];
  k.cx = parts[2];
  k.cy = parts[3];
  k.validate();
  return k;
}

}  // namespace

int run_synth_bench(const SynthBenchArgs& args) {
  return run_guarded([&]() -> int {
    BenchConfig cfg = parse_bench_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (!args.out_override.empty()) cfg.output_json = args.out_override;

    std::shared_ptr<const MlpModel> mlp;
    for (CliMethod m : cfg.methods)
      if (m == CliMethod::kIrlsMlp && !mlp) {
        if (cfg.estimator.mlp_model.empty())
          throw ParseError(
              "method irls-mlp requires estimator.mlp_model in the config");
        mlp = std::make_shared<const MlpModel>(
            load_mlp_model(cfg.estimator.mlp_model));
      }

    const std::size_t m_pairs = cfg.num_pairs;
    const std::size_t n_methods = cfg.methods.size();
    struct Row {
      double rot = std::numeric_limits<double>::quiet_NaN();
      double trans = std::numeric_limits<double>::quiet_NaN();
      bool ok = false;
    };
    std::vector<Row> rows(m_pairs * n_methods);

    parallel_over(m_pairs, cfg.threads, [&](std::size_t p) {
      try {
        SceneConfig sc = cfg.scene;
        sc.seed = PortableRng::for_item(cfg.seed, 3 * p).next_u64();
        const SyntheticScene scene = generate_scene(sc);
        const CorrespondenceSet clean = project_scene(scene);
        CorruptionConfig cc = cfg.corruption;
        cc.seed = PortableRng::for_item(cfg.seed, 3 * p + 1).next_u64();
        const CorruptedSet corrupted = corrupt(clean, cc);
        const auto [f_gt, pose_gt] = scene_ground_truth(scene);
        const std::uint64_t ransac_seed =
            PortableRng::for_item(cfg.seed, 3 * p + 2).next_u64();

        for (std::size_t j = 0; j < n_methods; ++j) {
          Row& row = rows[p * n_methods + j];
          try {
            const PoseEstimate est = run_single_estimate(
                cfg.methods[j], corrupted.set, scene.intrinsics,
                scene.intrinsics, cfg.estimator, ransac_seed, mlp);
            row.rot = rotation_error(est.pose.rotation, pose_gt.rotation);
            row.trans = translation_angular_error(est.pose.translation,
                                                  pose_gt.translation);
            row.ok = true;
          } catch (const Error&) {
            // leave the NaN row; the run continues
          }
        }
      } catch (const Error&) {
        // scene generation failed: every method row for this pair stays NaN
      }
    });

    std::ostringstream csv;
    csv << "pair_id,method,rot_err_deg,trans_err_deg\n";
    for (std::size_t p = 0; p < m_pairs; ++p)
      for (std::size_t j = 0; j < n_methods; ++j) {
        const Row& row = rows[p * n_methods + j];
        csv << p << "," << method_label(cfg.methods[j]) << ","
            << format_g17(row.rot) << "," << format_g17(row.trans) << "\n";
      }
    write_text_output(cfg.output_csv, csv.str());

    nlohmann::json summary;
    summary["num_pairs"] = cfg.num_pairs;
    summary["seed"] = cfg.seed;
    nlohmann::json methods = nlohmann::json::object();
    for (std::size_t j = 0; j < n_methods; ++j) {
      std::vector<PoseErrorRecord> records;
      for (std::size_t p = 0; p < m_pairs; ++p) {
        const Row& row = rows[p * n_methods + j];
        if (!row.ok) continue;
        PoseErrorRecord rec;
        rec.pair_id = p;
        rec.rotation_error = row.rot;
        rec.translation_error = row.trans;
        records.push_back(rec);
      }
      nlohmann::json mj;
      mj["num_evaluated"] = records.size();
      mj["num_failed"] = m_pairs - records.size();
      if (records.empty()) {
        mj["rotation"] = nullptr;
        mj["translation"] = nullptr;
      } else {
        const auto [rot_stats, trans_stats] =
            aggregate_pose_errors(records, cfg.summary_thresholds);
        mj["rotation"] = stats_json(rot_stats);
        mj["translation"] = stats_json(trans_stats);
      }
      methods[method_label(cfg.methods[j])] = mj;
    }
    summary["methods"] = methods;
    write_text_output(cfg.output_json, json_to_string(summary) + "\n");
    return 0;
  });
}

int run_estimate(const EstimateArgs& args) {
  return run_guarded([&]() -> int {
    const CorrespondenceFileData data =
        read_correspondences(args.correspondences_path);
    if (data.set.size() < 8)
      throw InsufficientData("pose estimation needs at least 8 "
                             "correspondences, file has " +
                             std::to_string(data.set.size()));
    const CameraIntrinsics k = parse_intrinsics_arg(args.intrinsics);
    const CliMethod method = parse_method_name(args.method);

    EstimatorParams params;
    params.ransac_threshold = args.ransac_threshold;
    params.irls_iterations = args.irls_iterations;
    params.gm_scale = args.gm_scale;
    params.huber_delta = args.huber_delta;

    std::shared_ptr<const MlpModel> mlp;
    if (method == CliMethod::kIrlsMlp) {
      if (args.mlp_path.empty())
        throw ParseError("method irls-mlp requires --mlp PATH");
      mlp = std::make_shared<const MlpModel>(load_mlp_model(args.mlp_path));
    }

    const PoseEstimate est = run_single_estimate(method, data.set, k, k,
                                                 params, args.seed, mlp);

    nlohmann::json out;
    out["method"] = method_label(method);
    out["num_correspondences"] = data.set.size();
    out["seed"] = args.seed;
    nlohmann::json rot;
    rot["matrix"] = mat3_json(est.pose.rotation);
    const Quaternion q = rotation_to_quaternion(est.pose.rotation);
    rot["quaternion"] = std::vector<double>{q.w, q.x, q.y, q.z};
    const Vec3<double> rod = rodrigues_vector(est.pose.rotation);
    rot["rodrigues"] = vec3_json(rod);
    out["rotation"] = rot;
    out["translation"] = vec3_json(est.pose.translation);
    out["fundamental"] = mat3_json(est.f.m);
    out["essential"] = mat3_json(est.e.m);

    nlohmann::json cheirality;
    cheirality["positive_depth_counts"] = std::vector<int>(
        est.positive_depth_counts.begin(), est.positive_depth_counts.end());
    cheirality["selected_candidate"] = est.selected_candidate;
    cheirality["tie_broken"] = est.cheirality_tie;
    out["cheirality"] = cheirality;

    if (method == CliMethod::kRansac) {
      std::vector<int> mask(est.inlier_mask.size());
      for (std::size_t i = 0; i < est.inlier_mask.size(); ++i)
        mask[i] = est.inlier_mask[i] ? 1 : 0;
      out["inlier_mask"] = mask;
      out["inlier_count"] = est.inlier_count;
      out["iterations_run"] = est.ransac_iterations;
    } else {
      std::vector<double> weights(std::size_t(est.weights.size()));
      for (Eigen::Index i = 0; i < est.weights.size(); ++i)
        weights[std::size_t(i)] = est.weights(i);
      out["weights"] = weights;
      out["residual_means"] = est.residual_means;
    }

    write_text_output(args.out_path, json_to_string(out) + "\n");
    return 0;
  });
}

int run_eval_traj(const EvalTrajArgs& args) {
  return run_guarded([&]() -> int {
    const Trajectory est = read_kitti_trajectory(args.est_path);
    const Trajectory gt = read_kitti_trajectory(args.gt_path);
    const Alignment alignment = umeyama_sim3_align(est, gt);
    const std::vector<PoseErrorRecord> records =
        relative_trajectory_errors(alignment.aligned, gt, args.step);

    const std::vector<double> thresholds =
        args.thresholds.empty() ? std::vector<double>{0.5, 1.0, 2.0, 5.0}
                                : args.thresholds;
    const auto [rot_stats, trans_stats] =
        aggregate_pose_errors(records, thresholds);

    std::vector<double> metric;
    metric.reserve(records.size());
    for (const auto& r : records) metric.push_back(r.translation_error_m);
    double metric_mean = 0;
    for (double v : metric) metric_mean += v;
    metric_mean /= double(metric.size());
    std::sort(metric.begin(), metric.end());
    const double metric_median = metric[(metric.size() - 1) / 2];

    nlohmann::json out;
    out["num_poses"] = est.size();
    out["step"] = args.step;
    out["num_relative_pairs"] = records.size();
    nlohmann::json align_j;
    align_j["scale"] = alignment.transform.scale;
    align_j["rotation"] = mat3_json(alignment.transform.rotation);
    align_j["translation"] = vec3_json(alignment.transform.translation);
    out["alignment"] = align_j;
    out["rotation"] = stats_json(rot_stats);
    out["translation_angular"] = stats_json(trans_stats);
    nlohmann::json metric_j;
    metric_j["mean"] = metric_mean;
    metric_j["median"] = metric_median;
    out["translation_metric_m"] = metric_j;

    write_text_output(args.out_path, json_to_string(out) + "\n");
    return 0;
  });
}

namespace {

Vec2<double> soft_offsets_reference(const Eigen::Matrix<double, 5, 5>& patch) {
  const double peak = patch.maxCoeff();
  double total = 0;
  Vec2<double> acc = Vec2<double>::Zero();
  for (int j = -2; j <= 2; ++j)
    for (int i = -2; i <= 2; ++i) {
      const double e = std::exp(patch(j + 2, i + 2) - peak);
      total += e;
      acc += e * Vec2<double>{double(i), double(j)};
    }
  return acc / total;
}

}  // namespace

int run_grad_check(const GradCheckArgs& args) {
  return run_guarded([&]() -> int {
    if (args.trials < 1) throw InvalidInput("--trials must be >= 1");
    PortableRng rng(args.seed);
    const double h = 1e-6;
    const double tol = 1e-5;
    double worst_soft = 0;
    double worst_sampson = 0;

    for (int trial = 0; trial < args.trials; ++trial) {
      // Softargmax: random 5x5 patch, analytic Jacobian vs central FD.
      Eigen::Matrix<double, 5, 5> patch;
      for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) patch(r, c) = 4.0 * rng.uniform();
      const Eigen::Matrix<double, 2, 25> jac = softargmax_gradient(patch);
      for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) {
          const int k = r * 5 + c;
          Eigen::Matrix<double, 5, 5> plus = patch, minus = patch;
          plus(r, c) += h;
          minus(r, c) -= h;
          const Vec2<double> fd =
              (soft_offsets_reference(plus) - soft_offsets_reference(minus)) /
              (2 * h);
          for (int d = 0; d < 2; ++d) {
            const double rel = std::abs(fd(d) - jac(d, k)) /
                               std::max(1.0, std::abs(jac(d, k)));
            worst_soft = std::max(worst_soft, rel);
          }
        }

      // Sampson residual: random F and correspondence at unit scale.
      Mat3<double> fm;
      for (int i = 0; i < 9; ++i) fm(i / 3, i % 3) = rng.uniform(-1.0, 1.0);
      FundamentalMatrix f;
      try {
        f = canonicalize_fundamental(fm);
      } catch (const ZeroMatrix&) {
        continue;  // essentially impossible draw; just skip it
      }
      Correspondence c;
      c.u1 = rng.uniform(-1.0, 1.0);
      c.v1 = rng.uniform(-1.0, 1.0);
      c.u2 = rng.uniform(-1.0, 1.0);
      c.v2 = rng.uniform(-1.0, 1.0);

      SampsonGradient grad;
      try {
        grad = sampson_gradient(c, f);
      } catch (const GradientUndefined&) {
        continue;
      }

      const auto residual_at = [&](const Mat3<double>& fmat,
                                   const Correspondence& cc) {
        FundamentalMatrix fv;
        fv.m = fmat;
        return sampson_residual(cc, fv);
      };

      const auto check = [&](double fd, double an) {
        const double rel =
            std::abs(fd - an) / std::max(1.0, std::abs(an));
        worst_sampson = std::max(worst_sampson, rel);
      };

      for (int d = 0; d < 4; ++d) {
        Correspondence plus = c, minus = c;
        double* fields_p[4] = {&plus.u1, &plus.v1, &plus.u2, &plus.v2};
        double* fields_m[4] = {&minus.u1, &minus.v1, &minus.u2, &minus.v2};
        *fields_p[d] += h;
        *fields_m[d] -= h;
        const double fd = (residual_at(f.m, plus) - residual_at(f.m, minus)) /
                          (2 * h);
        const double an = d < 2 ? grad.d_p1(d) : grad.d_p2(d - 2);
        check(fd, an);
      }
      for (int i = 0; i < 9; ++i) {
        Mat3<double> plus = f.m, minus = f.m;
        plus(i / 3, i % 3) += h;
        minus(i / 3, i % 3) -= h;
        const double fd =
            (residual_at(plus, c) - residual_at(minus, c)) / (2 * h);
        check(fd, grad.d_f(i / 3, i % 3));
      }
    }

    std::cout << "softargmax max relative error: " << format_g17(worst_soft)
              << "\n"
              << "sampson max relative error: " << format_g17(worst_sampson)
              << "\n";
    const bool ok = worst_soft < tol && worst_sampson < tol;
    std::cout << (ok ? "PASS" : "FAIL") << " (tolerance "
              << format_g17(tol) << ")\n";
    return ok ? 0 : 1;
  });
}

int run_sampson_table(const SampsonTableArgs& args) {
  return run_guarded([&]() -> int {
    const CorrespondenceFileData data =
        read_correspondences(args.correspondences_path);
    const FundamentalMatrix f = read_fundamental_json(args.fgt_path);
    const std::vector<double> thresholds = args.thresholds.empty()
                                               ? default_sampson_thresholds()
                                               : args.thresholds;
    const SampsonTable table = sampson_inlier_table(data.set, f, thresholds);

    std::ostringstream csv;
    csv << "threshold,inlier_ratio,num_correspondences\n";
    for (const auto& row : table.rows)
      csv << format_g17(row.threshold) << "," << format_g17(row.inlier_ratio)
          << "," << table.num_correspondences << "\n";
    write_text_output(args.out_path, csv.str());
    return 0;
  });
}

}  // namespace epipose
