#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// CLI command implementations. Each returns the process exit code:
//   0 success, 1 check failed, 2 usage/parse error, 3 estimation failure.

namespace epipose {

struct SynthBenchArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  std::string out_override;           // overrides the config's summary path
};
int run_synth_bench(const SynthBenchArgs& args);

struct EstimateArgs {
  std::string correspondences_path;
  std::string intrinsics;  // "fx,fy,cx,cy"
  std::string method = "ransac";
  std::uint64_t seed = 0;
  std::string out_path;  // empty -> stdout
  std::string mlp_path;  // required for irls-mlp
  double ransac_threshold = 1e-2;
  int irls_iterations = 5;
  double gm_scale = 2e-2;
  double huber_delta = 2e-2;
};
int run_estimate(const EstimateArgs& args);

struct EvalTrajArgs {
  std::string est_path;
  std::string gt_path;
  std::size_t step = 1;
  std::vector<double> thresholds;  // degrees; empty -> {0.5, 1, 2, 5}
  std::string out_path;            // empty -> stdout
};
int run_eval_traj(const EvalTrajArgs& args);

struct GradCheckArgs {
  std::uint64_t seed = 0;
  int trials = 100;
};
int run_grad_check(const GradCheckArgs& args);

struct SampsonTableArgs {
  std::string correspondences_path;
  std::string fgt_path;
  std::vector<double> thresholds;  // pixels; empty -> {0.2, 0.5, 1.0, 2.0}
  std::string out_path;            // empty -> stdout
};
int run_sampson_table(const SampsonTableArgs& args);

}  // namespace epipose
