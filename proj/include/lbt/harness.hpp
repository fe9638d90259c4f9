#pragma once

#include <cstdio>
#include <future>
#include <memory>
#include <string>
#include <vector>

#include "lbt/config.hpp"
#include "lbt/lbt.hpp"
#include "lbt/metrics.hpp"
#include "lbt/mot_io.hpp"
#include "lbt/perception.hpp"
#include "lbt/simulator.hpp"

namespace lbt {

inline double simulated_fps(const std::vector<FrameTiming>& timing, const CostModel& cm) {
  if (timing.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : timing) total += simulate_frame_time(t.is_detection, t.n_crops, cm);
  return total > 0.0 ? 1000.0 * static_cast<double>(timing.size()) / total : 0.0;
}

inline double wall_fps(const std::vector<FrameTiming>& timing) {
  if (timing.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : timing) total += t.wall_ms;
  return total > 0.0 ? 1000.0 * static_cast<double>(timing.size()) / total : 0.0;
}

struct TrackArtifacts {
  GroundTruth gt;  ///< generated scene (oracle mode) or loaded gt_file (if any)
  RunOutput run;
};

namespace detail {

struct Perception {
  DetectorFn detector;
  LocalizerFn localizer;
  int n_frames = 0;
};

inline Perception build_perception(const RunConfig& cfg, const GroundTruth& gt,
                                   const std::shared_ptr<const DetectionStore>& store) {
  Perception p;
  if (cfg.detector_source == "file") {
    p.detector = make_file_detector(store);
    p.localizer = make_file_localizer(store, cfg.lbt.localizer_size);
    p.n_frames = store->empty() ? 0 : store->rbegin()->first + 1;
    if (!gt.frames.empty()) p.n_frames = std::max(p.n_frames, gt.n_frames);
  } else {
    p.detector = make_oracle_detector(gt, cfg.detector);
    p.localizer = make_oracle_localizer(gt, cfg.localizer, cfg.lbt.localizer_size);
    p.n_frames = gt.n_frames;
  }
  return p;
}

}  // namespace detail

/// One tracking run as described by the config: oracle mode simulates the
/// scene from the scene seed, file mode replays the detection store.
inline TrackArtifacts run_tracking(const RunConfig& cfg) {
  TrackArtifacts art;
  std::shared_ptr<const DetectionStore> store;
  if (cfg.detector_source == "file") {
    store = std::make_shared<const DetectionStore>(
        detections_from_table(parse_mot_file(cfg.det_file)));
    if (!cfg.gt_file.empty()) {
      art.gt = ground_truth_from_table(parse_mot_file(cfg.gt_file), cfg.scene.dims);
    }
  } else {
    art.gt = generate_scene(cfg.scene);
  }
  const auto p = detail::build_perception(cfg, art.gt, store);
  art.run = run_lbt(p.detector, p.localizer, p.n_frames, cfg.tracker, cfg.lbt, cfg.scene.dims);
  return art;
}

// ---- report formatting ------------------------------------------------------

inline std::string metrics_csv(const MetricsReport& r) {
  char buf[512];
  std::string out =
      "mota,motp,mt,mt_pct,ml,ml_pct,fp,fn,ids,fm,recall,precision,faf,"
      "total_gt,total_hyp,matched,frames,trajectories,fp_norm,fn_norm,ids_norm,fm_norm\n";
  std::snprintf(buf, sizeof buf,
                "%.4f,%.4f,%d,%.2f,%d,%.2f,%lld,%lld,%lld,%lld,%.4f,%.4f,%.4f,"
                "%lld,%lld,%lld,%d,%d,%.6f,%.6f,%.6f,%.6f\n",
                r.mota, r.motp, r.mt, r.mt_pct, r.ml, r.ml_pct, r.fp, r.fn, r.id_switches,
                r.fragmentations, r.recall, r.precision, r.faf, r.total_gt, r.total_hyp,
                r.total_matched, r.n_frames, r.n_trajectories, r.fp_norm, r.fn_norm, r.ids_norm,
                r.fm_norm);
  out += buf;
  return out;
}

struct SweepRow {
  int d = 0;
  double fps_sim = 0.0;
  double fps_wall = 0.0;  // informational; never written to the deterministic outputs
  double mota = 0.0;
  double motp = 0.0;
  double mt_pct = 0.0;
  double fp = 0.0;
  double fn = 0.0;
};

struct SweepResult {
  bool pr = false;
  std::vector<SweepRow> rows;
};

/// One row of the speed/accuracy table for a fixed detection interval.
inline SweepRow sweep_row(const RunConfig& base, int d) {
  RunConfig cfg = base;
  cfg.lbt.d = d;
  SweepRow row;
  row.d = d;
  if (cfg.pr) {
    // Track at each confidence threshold; metrics are grid averages, the
    // timing columns come from the configured threshold's run. Threshold
    // runs are independent jobs and execute in parallel.
    const TrackArtifacts ref = run_tracking(cfg);
    row.fps_sim = simulated_fps(ref.run.timing, cfg.cost_model);
    row.fps_wall = wall_fps(ref.run.timing);
    std::vector<std::future<std::vector<TrackHistory>>> jobs;
    jobs.reserve(cfg.pr_grid.size());
    for (double thr : cfg.pr_grid) {
      jobs.push_back(std::async(std::launch::async, [&cfg, thr] {
        RunConfig c = cfg;
        c.tracker.min_confidence = thr;
        return run_tracking(c).run.histories;
      }));
    }
    std::vector<std::vector<TrackHistory>> per_threshold;
    per_threshold.reserve(jobs.size());
    for (auto& j : jobs) per_threshold.push_back(j.get());
    size_t next = 0;
    const PrReport pr = pr_average(
        ref.gt, [&](double) { return per_threshold[next++]; }, cfg.pr_grid);
    row.mota = pr.pr_mota;
    row.motp = pr.pr_motp;
    row.mt_pct = pr.pr_mt_pct;
    row.fp = pr.pr_fp;
    row.fn = pr.pr_fn;
  } else {
    const TrackArtifacts art = run_tracking(cfg);
    row.fps_sim = simulated_fps(art.run.timing, cfg.cost_model);
    row.fps_wall = wall_fps(art.run.timing);
    const MetricsReport rep = clear_mot(art.gt, art.run.histories);
    row.mota = rep.mota;
    row.motp = rep.motp;
    row.mt_pct = rep.mt_pct;
    row.fp = static_cast<double>(rep.fp);
    row.fn = static_cast<double>(rep.fn);
  }
  return row;
}

/// Sweep the detection interval. Rows run as independent parallel jobs; each
/// owns its tracker and oracle streams, so output order and content are
/// deterministic.
inline SweepResult run_sweep(const RunConfig& cfg) {
  SweepResult result;
  result.pr = cfg.pr;
  std::vector<std::future<SweepRow>> jobs;
  jobs.reserve(cfg.d_values.size());
  for (int d : cfg.d_values) {
    jobs.push_back(std::async(std::launch::async, [&cfg, d] { return sweep_row(cfg, d); }));
  }
  for (auto& j : jobs) result.rows.push_back(j.get());
  return result;
}

/// Deterministic CSV: simulated FPS only, wall clock stays out of the bytes.
inline std::string sweep_csv(const SweepResult& s) {
  std::string out = s.pr ? "d,fps_sim,pr_mota,pr_motp,pr_mt_pct,pr_fp,pr_fn\n"
                         : "d,fps_sim,mota,motp,mt_pct,fp,fn\n";
  char buf[256];
  for (const auto& r : s.rows) {
    if (s.pr) {
      std::snprintf(buf, sizeof buf, "%d,%.4f,%.4f,%.4f,%.2f,%.2f,%.2f\n", r.d, r.fps_sim, r.mota,
                    r.motp, r.mt_pct, r.fp, r.fn);
    } else {
      std::snprintf(buf, sizeof buf, "%d,%.4f,%.4f,%.4f,%.2f,%lld,%lld\n", r.d, r.fps_sim, r.mota,
                    r.motp, r.mt_pct, static_cast<long long>(r.fp), static_cast<long long>(r.fn));
    }
    out += buf;
  }
  return out;
}

/// Aligned console table, columns in speed/accuracy order:
/// d, FPS, MOTA, MOTP, MT, FP, FN.
inline std::string sweep_table(const SweepResult& s) {
  char buf[256];
  std::string out;
  const char* mota = s.pr ? "PR-MOTA" : "MOTA";
  const char* motp = s.pr ? "PR-MOTP" : "MOTP";
  const char* mt = s.pr ? "PR-MT" : "MT";
  const char* fp = s.pr ? "PR-FP" : "FP";
  const char* fn = s.pr ? "PR-FN" : "FN";
  std::snprintf(buf, sizeof buf, "%4s %8s %9s %9s %8s %10s %10s\n", "d", "FPS", mota, motp, mt, fp,
                fn);
  out += buf;
  for (const auto& r : s.rows) {
    std::snprintf(buf, sizeof buf, "%4d %8.2f %9.4f %9.4f %7.1f%% %10.1f %10.1f\n", r.d, r.fps_sim,
                  r.mota, r.motp, r.mt_pct, r.fp, r.fn);
    out += buf;
  }
  return out;
}

/// Per-frame timing log. wall_ms is measured and therefore the one column
/// that varies between identically-seeded runs.
inline std::string timing_csv(const std::vector<FrameTiming>& timing, const CostModel& cm) {
  std::string out = "frame,is_detection,n_crops,sim_ms,wall_ms\n";
  char buf[128];
  for (const auto& t : timing) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.3f,%.3f\n", t.frame, t.is_detection ? 1 : 0,
                  t.n_crops, simulate_frame_time(t.is_detection, t.n_crops, cm), t.wall_ms);
    out += buf;
  }
  return out;
}

struct BenchReport {
  int frames = 0;
  double wall_ms = 0.0;
  double fps_wall = 0.0;
  double fps_sim = 0.0;
};

/// Wall-clock throughput of one tracking run under the config.
inline BenchReport run_bench(const RunConfig& cfg) {
  const TrackArtifacts art = run_tracking(cfg);
  BenchReport b;
  b.frames = static_cast<int>(art.run.timing.size());
  for (const auto& t : art.run.timing) b.wall_ms += t.wall_ms;
  b.fps_wall = wall_fps(art.run.timing);
  b.fps_sim = simulated_fps(art.run.timing, cfg.cost_model);
  return b;
}

}  // namespace lbt
