// lbt_cli: simulate scenes, run tracking, evaluate results and sweep the
// detection interval. Exit codes: 0 success, 2 config error, 3 input parse
// error, 4 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lbt/config.hpp"
#include "lbt/harness.hpp"
#include "lbt/metrics.hpp"
#include "lbt/mot_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitRuntime = 4;

struct Overrides {
  std::optional<int> d;
  std::optional<double> beta;
  std::optional<int> localizer_size;
  std::optional<std::string> tracker;
  std::optional<std::string> detector;
  std::optional<std::string> det_file;
  std::optional<std::string> gt_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> min_confidence;
  std::optional<std::string> d_values;
  std::optional<bool> pr;
};

void add_common_options(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("--config", config_path, "run configuration file");
  cmd->add_option("--d", ov.d, "frames skipped between detections");
  cmd->add_option("--beta", ov.beta, "crop expansion ratio");
  cmd->add_option("--localizer-size", ov.localizer_size, "localizer input resolution C");
  cmd->add_option("--tracker", ov.tracker, "base tracker: sort | kiou");
  cmd->add_option("--detector", ov.detector, "detection source: oracle | file");
  cmd->add_option("--det-file", ov.det_file, "detection file (file mode)");
  cmd->add_option("--gt", ov.gt_file, "ground-truth file (file mode eval/sweep)");
  cmd->add_option("--seed", ov.seed, "master seed");
  cmd->add_option("--out", ov.out, "output path");
  cmd->add_option("--min-confidence", ov.min_confidence, "detection confidence floor");
}

lbt::RunConfig make_config(const std::string& config_path, const Overrides& ov) {
  lbt::RunConfig cfg;
  if (!config_path.empty()) cfg = lbt::load_run_config(config_path, /*finalize=*/false);
  const auto set = [&cfg](const std::string& section, const std::string& key,
                          const std::string& value) {
    lbt::apply_config_key(cfg, section, key, value, "--" + key);
  };
  if (ov.d) set("lbt", "d", std::to_string(*ov.d));
  if (ov.beta) set("lbt", "beta", std::to_string(*ov.beta));
  if (ov.localizer_size) set("lbt", "localizer_size", std::to_string(*ov.localizer_size));
  if (ov.tracker) set("tracker", "mode", *ov.tracker);
  if (ov.detector) set("run", "detector", *ov.detector);
  if (ov.det_file) set("run", "det_file", *ov.det_file);
  if (ov.gt_file) set("run", "gt_file", *ov.gt_file);
  if (ov.seed) set("run", "seed", std::to_string(*ov.seed));
  if (ov.out) set("run", "out", *ov.out);
  if (ov.min_confidence) set("tracker", "min_confidence", std::to_string(*ov.min_confidence));
  if (ov.d_values) set("run", "d_values", *ov.d_values);
  if (ov.pr) set("run", "pr", *ov.pr ? "true" : "false");
  lbt::finalize_config(cfg);
  return cfg;
}

std::string require_out(const lbt::RunConfig& cfg) {
  if (cfg.out_path.empty()) throw lbt::ConfigError("config: output path required (--out)");
  return cfg.out_path;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

int cmd_simulate(const lbt::RunConfig& cfg) {
  const lbt::GroundTruth gt = lbt::generate_scene(cfg.scene);
  lbt::write_mot_file(lbt::table_from_ground_truth(gt), require_out(cfg));
  long long boxes = 0;
  for (const auto& f : gt.frames) boxes += static_cast<long long>(f.size());
  std::printf("simulate: %d frames, %zu objects, %lld boxes -> %s\n", gt.n_frames,
              gt.objects.size(), boxes, cfg.out_path.c_str());
  return 0;
}

int cmd_track(const lbt::RunConfig& cfg, const std::string& timing_out) {
  const lbt::TrackArtifacts art = lbt::run_tracking(cfg);
  lbt::write_mot_file(lbt::table_from_histories(art.run.histories), require_out(cfg));
  if (!timing_out.empty()) {
    write_text(timing_out, lbt::timing_csv(art.run.timing, cfg.cost_model));
  }
  std::printf("track: d=%d, %zu frames, %zu tracklets, sim %.1f fps, wall %.1f fps -> %s\n",
              cfg.lbt.d, art.run.timing.size(), art.run.histories.size(),
              lbt::simulated_fps(art.run.timing, cfg.cost_model), lbt::wall_fps(art.run.timing),
              cfg.out_path.c_str());
  return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& hyp_path, double iou_threshold,
             const std::string& out_path) {
  const lbt::GroundTruth gt = lbt::ground_truth_from_table(lbt::parse_mot_file(gt_path));
  const auto hyp = lbt::histories_from_table(lbt::parse_mot_file(hyp_path));
  const lbt::MetricsReport r = lbt::clear_mot(gt, hyp, iou_threshold);
  const std::string csv = lbt::metrics_csv(r);
  if (!out_path.empty()) write_text(out_path, csv);
  std::printf("%8s %9s %9s %8s %10s %10s %6s %6s\n", "MOTA", "MOTP", "MT", "ML", "FP", "FN", "IDs",
              "FM");
  std::printf("%8.4f %9.4f %8.1f%% %7.1f%% %10lld %10lld %6lld %6lld\n", r.mota, r.motp, r.mt_pct,
              r.ml_pct, r.fp, r.fn, r.id_switches, r.fragmentations);
  return 0;
}

int cmd_sweep(const lbt::RunConfig& cfg) {
  const lbt::SweepResult s = lbt::run_sweep(cfg);
  write_text(require_out(cfg), lbt::sweep_csv(s));
  std::fputs(lbt::sweep_table(s).c_str(), stdout);
  std::printf("# wall-clock fps (informational):");
  for (const auto& row : s.rows) std::printf(" d=%d:%.1f", row.d, row.fps_wall);
  std::printf("\n# csv -> %s\n", cfg.out_path.c_str());
  return 0;
}

int cmd_bench(const lbt::RunConfig& cfg) {
  const lbt::BenchReport b = lbt::run_bench(cfg);
  std::printf("bench: %d frames in %.1f ms wall | %.1f fps wall | %.1f fps simulated (d=%d)\n",
              b.frames, b.wall_ms, b.fps_wall, b.fps_sim, cfg.lbt.d);
  if (!cfg.out_path.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "frames,wall_ms,fps_wall,fps_sim\n%d,%.3f,%.3f,%.3f\n",
                  b.frames, b.wall_ms, b.fps_wall, b.fps_sim);
    write_text(cfg.out_path, buf);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-object tracking with detection-interval localization"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::string timing_out;
  std::string eval_gt, eval_hyp, eval_out;
  double eval_iou = 0.5;

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic scene as a gt file");
  add_common_options(simulate, config_path, ov);

  auto* track = app.add_subcommand("track", "run the tracker over a sequence");
  add_common_options(track, config_path, ov);
  track->add_option("--timing-out", timing_out, "per-frame timing log (wall column varies)");

  auto* eval = app.add_subcommand("eval", "CLEAR MOT metrics for a result file");
  eval->add_option("--gt", eval_gt, "ground-truth file")->required();
  eval->add_option("--hyp", eval_hyp, "tracking result file")->required();
  eval->add_option("--iou-threshold", eval_iou, "match threshold (default 0.5)");
  eval->add_option("--out", eval_out, "metrics CSV path");

  auto* sweep = app.add_subcommand("sweep", "speed/accuracy table over detection intervals");
  add_common_options(sweep, config_path, ov);
  sweep->add_option("--d-values", ov.d_values, "comma-separated detection intervals");
  sweep->add_flag_callback("--pr", [&ov] { ov.pr = true; },
                           "average metrics over the confidence-threshold grid");

  auto* bench = app.add_subcommand("bench", "wall-clock throughput report");
  add_common_options(bench, config_path, ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(make_config(config_path, ov));
    if (track->parsed()) return cmd_track(make_config(config_path, ov), timing_out);
    if (eval->parsed()) return cmd_eval(eval_gt, eval_hyp, eval_iou, eval_out);
    if (sweep->parsed()) return cmd_sweep(make_config(config_path, ov));
    if (bench->parsed()) return cmd_bench(make_config(config_path, ov));
  } catch (const lbt::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const lbt::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitParse;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
