#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbt/assignment.hpp"
#include "lbt/geometry.hpp"
#include "lbt/simulator.hpp"
#include "lbt/tracker.hpp"

namespace lbt {

struct FrameCounts {
  int frame = 0;
  int gt = 0;
  int hyp = 0;
  int matched = 0;
  int fp = 0;
  int fn = 0;
  int id_switches = 0;
};

/// CLEAR MOT aggregates over one evaluated sequence.
struct MetricsReport {
  double mota = 0.0;
  double motp = 0.0;  ///< mean IoU over matched pairs, in [0, 1]
  int mt = 0;
  int pt = 0;
  int ml = 0;
  double mt_pct = 0.0;
  double ml_pct = 0.0;
  long long fp = 0;
  long long fn = 0;
  long long id_switches = 0;
  long long fragmentations = 0;
  double recall = 0.0;
  double precision = 0.0;
  double faf = 0.0;  ///< false alarms per frame
  long long total_gt = 0;
  long long total_hyp = 0;
  long long total_matched = 0;
  int n_frames = 0;
  int n_trajectories = 0;
  // counts normalized by total ground-truth boxes
  double fp_norm = 0.0;
  double fn_norm = 0.0;
  double ids_norm = 0.0;
  double fm_norm = 0.0;
  std::vector<FrameCounts> per_frame;
};

namespace detail {

inline std::map<int, GtFrame> hyp_by_frame(const std::vector<TrackHistory>& hyp) {
  std::map<int, GtFrame> out;
  for (const auto& h : hyp) {
    for (const auto& [frame, box] : h.boxes) out[frame].emplace_back(h.id, box);
  }
  return out;
}

}  // namespace detail

/// CLEAR MOT evaluation. Correspondences persist from the previous frame
/// while their IoU stays at or above the threshold; the remainder is matched
/// by min-cost assignment on 1 - IoU. MOTA = 1 - (FN + FP + IDs) / total GT.
inline MetricsReport clear_mot(const GroundTruth& gt, const std::vector<TrackHistory>& hyp,
                               double iou_match_threshold = 0.5) {
  const int n_frames = gt.n_frames;
  const auto hyp_frames = detail::hyp_by_frame(hyp);
  if (!hyp_frames.empty()) {
    const int lo = hyp_frames.begin()->first;
    const int hi = hyp_frames.rbegin()->first;
    if (lo < 0 || hi >= n_frames) {
      throw std::invalid_argument("hypothesis frame " + std::to_string(lo < 0 ? lo : hi) +
                                  " outside ground-truth range [0, " +
                                  std::to_string(n_frames - 1) + "]");
    }
  }

  MetricsReport rep;
  rep.n_frames = n_frames;
  rep.n_trajectories = static_cast<int>(gt.objects.size());

  std::map<int, int> mapping;     // gt id -> hyp id matched in previous frame
  std::map<int, int> last_assoc;  // gt id -> most recent hyp id ever matched
  std::map<int, int> gt_matched_frames;
  std::map<int, std::vector<char>> gt_tracked;  // per object, matched flag per lifespan frame
  for (const auto& [id, span] : gt.objects) {
    gt_tracked[id].assign(static_cast<size_t>(span.lifetime()), 0);
  }

  double iou_sum = 0.0;
  static const GtFrame kEmpty;

  for (int f = 0; f < n_frames; ++f) {
    const GtFrame& gt_list = gt.frames[static_cast<size_t>(f)];
    const auto hit = hyp_frames.find(f);
    const GtFrame& hyp_list = hit == hyp_frames.end() ? kEmpty : hit->second;

    std::map<int, const GlobalBox*> gt_boxes, hyp_boxes;
    for (const auto& [id, box] : gt_list) gt_boxes[id] = &box;
    for (const auto& [id, box] : hyp_list) hyp_boxes[id] = &box;

    std::map<int, int> matches;  // gt id -> hyp id this frame
    std::vector<char> hyp_used(hyp_list.size(), 0);

    // 1. persist still-valid correspondences
    for (const auto& [g, h] : mapping) {
      const auto gi = gt_boxes.find(g);
      const auto hi2 = hyp_boxes.find(h);
      if (gi == gt_boxes.end() || hi2 == hyp_boxes.end()) continue;
      const double v = iou(*gi->second, *hi2->second);
      if (v >= iou_match_threshold) {
        matches[g] = h;
        iou_sum += v;
      }
    }

    // 2. min-cost assignment on the remainder
    std::vector<int> free_gt, free_hyp;
    for (const auto& [id, box] : gt_list) {
      if (!matches.count(id)) free_gt.push_back(id);
    }
    std::map<int, char> hyp_taken;
    for (const auto& [g, h] : matches) hyp_taken[h] = 1;
    for (const auto& [id, box] : hyp_list) {
      if (!hyp_taken.count(id)) free_hyp.push_back(id);
    }
    if (!free_gt.empty() && !free_hyp.empty()) {
      std::vector<GlobalBox> rows, cols;
      for (int g : free_gt) rows.push_back(*gt_boxes[g]);
      for (int h : free_hyp) cols.push_back(*hyp_boxes[h]);
      const Eigen::MatrixXd costs = build_cost_matrix(rows, cols, CostMode::iou);
      const Assignment a = solve_assignment(costs, 1.0 - iou_match_threshold);
      for (const auto& [ri, cj] : a.matches) {
        matches[free_gt[static_cast<size_t>(ri)]] = free_hyp[static_cast<size_t>(cj)];
        iou_sum += 1.0 - costs(ri, cj);
      }
    }

    // 3. count switches against the most recent association
    FrameCounts fc;
    fc.frame = f;
    fc.gt = static_cast<int>(gt_list.size());
    fc.hyp = static_cast<int>(hyp_list.size());
    fc.matched = static_cast<int>(matches.size());
    for (const auto& [g, h] : matches) {
      const auto la = last_assoc.find(g);
      if (la != last_assoc.end() && la->second != h) fc.id_switches += 1;
      last_assoc[g] = h;
      const auto& span = gt.objects.at(g);
      gt_tracked[g][static_cast<size_t>(f - span.first_frame)] = 1;
      gt_matched_frames[g] += 1;
    }
    fc.fn = fc.gt - fc.matched;
    fc.fp = fc.hyp - fc.matched;

    rep.total_gt += fc.gt;
    rep.total_hyp += fc.hyp;
    rep.total_matched += fc.matched;
    rep.fn += fc.fn;
    rep.fp += fc.fp;
    rep.id_switches += fc.id_switches;
    rep.per_frame.push_back(fc);

    mapping = matches;
  }

  // trajectory-level measures
  for (const auto& [id, span] : gt.objects) {
    const auto& flags = gt_tracked[id];
    const double ratio =
        static_cast<double>(gt_matched_frames[id]) / static_cast<double>(span.lifetime());
    if (ratio >= 0.8) {
      rep.mt += 1;
    } else if (ratio < 0.2) {
      rep.ml += 1;
    } else {
      rep.pt += 1;
    }
    bool ever = false;
    for (size_t i = 0; i < flags.size(); ++i) {
      if (flags[i] && ever && !flags[i - 1]) rep.fragmentations += 1;
      ever = ever || flags[i];
    }
  }

  if (rep.total_gt > 0) {
    rep.mota = 1.0 - static_cast<double>(rep.fn + rep.fp + rep.id_switches) /
                         static_cast<double>(rep.total_gt);
    rep.recall = static_cast<double>(rep.total_matched) / static_cast<double>(rep.total_gt);
    rep.fp_norm = static_cast<double>(rep.fp) / static_cast<double>(rep.total_gt);
    rep.fn_norm = static_cast<double>(rep.fn) / static_cast<double>(rep.total_gt);
    rep.ids_norm = static_cast<double>(rep.id_switches) / static_cast<double>(rep.total_gt);
    rep.fm_norm = static_cast<double>(rep.fragmentations) / static_cast<double>(rep.total_gt);
  } else {
    rep.mota = 1.0;
    rep.recall = 1.0;
  }
  rep.motp = rep.total_matched > 0 ? iou_sum / static_cast<double>(rep.total_matched) : 0.0;
  rep.precision = rep.total_hyp > 0
                      ? static_cast<double>(rep.total_matched) / static_cast<double>(rep.total_hyp)
                      : (rep.total_gt == 0 ? 1.0 : 0.0);
  rep.faf = n_frames > 0 ? static_cast<double>(rep.fp) / n_frames : 0.0;
  if (rep.n_trajectories > 0) {
    rep.mt_pct = 100.0 * rep.mt / rep.n_trajectories;
    rep.ml_pct = 100.0 * rep.ml / rep.n_trajectories;
  }
  return rep;
}

/// CLEAR MOT metrics averaged over a grid of detector confidence thresholds.
struct PrReport {
  std::vector<double> grid;
  std::vector<MetricsReport> per_threshold;
  double pr_mota = 0.0;
  double pr_motp = 0.0;
  double pr_mt_pct = 0.0;
  double pr_ml_pct = 0.0;
  double pr_fp = 0.0;
  double pr_fn = 0.0;
  double pr_ids = 0.0;
  double pr_fm = 0.0;
  double pr_recall = 0.0;
  double pr_precision = 0.0;
  double pr_faf = 0.0;
};

inline std::vector<double> default_pr_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

/// Evaluate per grid point (the run callback re-tracks at each confidence
/// threshold) and take the arithmetic mean of every metric.
inline PrReport pr_average(const GroundTruth& gt,
                           const std::function<std::vector<TrackHistory>(double threshold)>& run,
                           const std::vector<double>& grid, double iou_match_threshold = 0.5) {
  if (grid.empty()) throw std::invalid_argument("pr_average: empty threshold grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > 1.0 || (i > 0 && grid[i] <= grid[i - 1])) {
      throw std::invalid_argument("pr_average: grid must be strictly increasing within [0, 1]");
    }
  }
  PrReport pr;
  pr.grid = grid;
  for (double thr : grid) {
    try {
      pr.per_threshold.push_back(clear_mot(gt, run(thr), iou_match_threshold));
    } catch (const std::exception& e) {
      throw std::runtime_error("pr_average failed at threshold " + std::to_string(thr) + ": " +
                               e.what());
    }
  }
  const double n = static_cast<double>(grid.size());
  for (const auto& r : pr.per_threshold) {
    pr.pr_mota += r.mota / n;
    pr.pr_motp += r.motp / n;
    pr.pr_mt_pct += r.mt_pct / n;
    pr.pr_ml_pct += r.ml_pct / n;
    pr.pr_fp += static_cast<double>(r.fp) / n;
    pr.pr_fn += static_cast<double>(r.fn) / n;
    pr.pr_ids += static_cast<double>(r.id_switches) / n;
    pr.pr_fm += static_cast<double>(r.fragmentations) / n;
    pr.pr_recall += r.recall / n;
    pr.pr_precision += r.precision / n;
    pr.pr_faf += r.faf / n;
  }
  return pr;
}

}  // namespace lbt
