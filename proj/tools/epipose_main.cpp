#include <CLI11.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "epipose/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Relative camera pose estimation toolkit"};
  app.require_subcommand(1);

  epipose::SynthBenchArgs bench;
  std::uint64_t bench_seed = 0;
  auto* sb = app.add_subcommand(
      "synth-bench", "Run the synthetic-scene benchmark from a JSON config");
  sb->add_option("--config", bench.config_path, "benchmark config JSON")
      ->required();
  CLI::Option* bench_seed_opt =
      sb->add_option("--seed", bench_seed, "override the config's seed");
  sb->add_option("--out", bench.out_override,
                 "override the config's summary JSON path");

  epipose::EstimateArgs est;
  auto* es = app.add_subcommand(
      "estimate", "Estimate a relative pose from a correspondence CSV");
  es->add_option("csv", est.correspondences_path, "correspondence CSV file")
      ->required();
  es->add_option("--intrinsics", est.intrinsics,
                 "camera intrinsics as \"fx,fy,cx,cy\"")
      ->required();
  es->add_option("--method", est.method,
                 "ransac, irls-uniform, irls-gm, irls-huber, or irls-mlp");
  es->add_option("--seed", est.seed, "RANSAC sampling seed");
  es->add_option("--out", est.out_path, "output JSON path (default stdout)");
  es->add_option("--mlp", est.mlp_path, "MLP weight model for irls-mlp");
  es->add_option("--ransac-threshold", est.ransac_threshold,
                 "RANSAC inlier threshold on the Sampson residual");
  es->add_option("--iterations", est.irls_iterations,
                 "IRLS iteration count");
  es->add_option("--gm-scale", est.gm_scale,
                 "Geman-McClure scale for irls-gm");
  es->add_option("--huber-delta", est.huber_delta,
                 "Huber threshold for irls-huber");

  epipose::EvalTrajArgs ev;
  auto* et = app.add_subcommand(
      "eval-traj",
      "Align an estimated trajectory to ground truth and report errors");
  et->add_option("est", ev.est_path, "estimated trajectory (KITTI format)")
      ->required();
  et->add_option("gt", ev.gt_path, "ground-truth trajectory (KITTI format)")
      ->required();
  et->add_option("--step", ev.step, "frame step for relative errors");
  et->add_option("--thresholds", ev.thresholds,
                 "inlier thresholds in degrees, comma-separated")
      ->delimiter(',');
  et->add_option("--out", ev.out_path, "output JSON path (default stdout)");

  epipose::GradCheckArgs gc;
  auto* g = app.add_subcommand(
      "grad-check", "Finite-difference check of the analytic gradients");
  g->add_option("--seed", gc.seed, "random seed");
  g->add_option("--trials", gc.trials, "number of random trials");

  epipose::SampsonTableArgs st;
  auto* s = app.add_subcommand(
      "sampson-table",
      "Inlier-ratio table of residuals against a reference F");
  s->add_option("csv", st.correspondences_path, "correspondence CSV file")
      ->required();
  s->add_option("fgt", st.fgt_path, "reference fundamental matrix JSON")
      ->required();
  s->add_option("--thresholds", st.thresholds,
                "thresholds in pixels, comma-separated")
      ->delimiter(',');
  s->add_option("--out", st.out_path, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (sb->parsed()) {
    if (bench_seed_opt->count() > 0) bench.seed = bench_seed;
    return epipose::run_synth_bench(bench);
  }
  if (es->parsed()) return epipose::run_estimate(est);
  if (et->parsed()) return epipose::run_eval_traj(ev);
  if (g->parsed()) return epipose::run_grad_check(gc);
  if (s->parsed()) return epipose::run_sampson_table(st);
  return 2;
}
