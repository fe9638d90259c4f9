#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbt/assignment.hpp"
#include "lbt/geometry.hpp"
#include "lbt/kalman.hpp"

namespace lbt {

enum class TrackerMode { sort, kiou };

inline CostMode cost_mode_for(TrackerMode mode) {
  return mode == TrackerMode::kiou ? CostMode::iou : CostMode::euclidean;
}

enum class TrackStatus { tentative, confirmed, lost, removed };

struct Detection {
  GlobalBox box;
  double confidence = 1.0;
  int label = -1;  ///< -1 means unlabeled; labels partition matching
};

/// One tracked identity: filter state, lifecycle counters and the per-frame
/// a-posteriori boxes. Output is restricted to frames at or after the
/// tracklet confirmed, so tentative blips never reach the result files.
struct Tracklet {
  int id = 0;
  KalmanState state;
  TrackStatus status = TrackStatus::tentative;
  int label = -1;
  int hits = 0;    ///< consecutive successful updates
  int misses = 0;  ///< consecutive missed frames
  int age = 0;     ///< frames since birth
  int first_confirmed_frame = -1;
  std::map<int, GlobalBox> history;  ///< frame -> a-posteriori box

  bool live() const { return status != TrackStatus::removed; }
  bool ever_confirmed() const { return first_confirmed_frame >= 0; }
};

struct TrackHistory {
  int id = 0;
  std::map<int, GlobalBox> boxes;

  friend bool operator==(const TrackHistory&, const TrackHistory&) = default;
};

struct TrackerConfig {
  TrackerMode mode = TrackerMode::kiou;
  int min_hits = 2;  ///< consecutive updates before a tracklet confirms
  int max_age = 3;   ///< consecutive missed frames before removal
  double min_iou = 0.3;                ///< association gate, kiou mode
  double euclidean_gate_factor = 0.5;  ///< gate = factor * sqrt(w*h), sort mode
  double min_confidence = 0.3;         ///< detections below this are dropped upstream
  bool greedy_matching = false;        ///< ablation switch
  bool include_tentative_in_output = false;
  NoiseConfig noise;
};

/// Base tracker: the predict / match / initialize / update / retire loop
/// common to SORT- and KIOU-style tracking. One instance per sequence,
/// driven strictly in frame order by a single writer.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg) : cfg_(cfg) {}

  const TrackerConfig& config() const { return cfg_; }
  const std::vector<Tracklet>& tracklets() const { return tracklets_; }

  int live_count() const {
    int n = 0;
    for (const auto& t : tracklets_) n += t.live() ? 1 : 0;
    return n;
  }

  /// Step 1: advance every live tracklet one frame and return its a-priori
  /// box, in ascending id order. Call exactly once per frame.
  std::vector<std::pair<int, GlobalBox>> predict_all() {
    std::vector<std::pair<int, GlobalBox>> out;
    out.reserve(tracklets_.size());
    for (auto& t : tracklets_) {
      if (!t.live()) continue;
      auto pred = kf_predict(t.state, cfg_.noise);
      t.state = pred.state;
      t.age += 1;
      out.emplace_back(t.id, pred.box);
    }
    pending_apriori_ = out;
    return out;
  }

  /// Steps 2-4 on a detection frame: associate detections with the a-priori
  /// boxes, update matches, spawn tracklets for unmatched detections, age
  /// and retire unmatched tracklets. Predicts internally unless predict_all
  /// was already called for this frame.
  void process_detection_frame(int frame_idx, const std::vector<Detection>& detections) {
    std::vector<std::pair<int, GlobalBox>> apriori =
        pending_apriori_ ? *std::move(pending_apriori_) : predict_all();
    pending_apriori_.reset();

    std::vector<char> det_matched(detections.size(), 0);
    std::vector<char> trk_matched(apriori.size(), 0);

    // Labels partition matching; -1 is its own group.
    std::vector<int> labels;
    for (const auto& [id, box] : apriori) labels.push_back(tracklet_by_id(id).label);
    for (const auto& d : detections) labels.push_back(d.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    for (int label : labels) {
      std::vector<int> trk_idx, det_idx;
      for (size_t i = 0; i < apriori.size(); ++i) {
        if (tracklet_by_id(apriori[i].first).label == label) trk_idx.push_back(static_cast<int>(i));
      }
      for (size_t j = 0; j < detections.size(); ++j) {
        if (detections[j].label == label) det_idx.push_back(static_cast<int>(j));
      }
      if (trk_idx.empty() || det_idx.empty()) continue;

      std::vector<GlobalBox> rows, cols;
      for (int i : trk_idx) rows.push_back(apriori[i].second);
      for (int j : det_idx) cols.push_back(detections[j].box);
      const Eigen::MatrixXd costs = build_cost_matrix(rows, cols, cost_mode_for(cfg_.mode));

      std::vector<double> gates(rows.size());
      for (size_t i = 0; i < rows.size(); ++i) {
        gates[i] = cfg_.mode == TrackerMode::kiou
                       ? 1.0 - cfg_.min_iou
                       : cfg_.euclidean_gate_factor * std::sqrt(rows[i].w * rows[i].h);
      }
      const Assignment a = cfg_.greedy_matching ? greedy_assignment(costs, gates)
                                                : solve_assignment(costs, gates);
      for (const auto& [ri, cj] : a.matches) {
        const int ti = trk_idx[ri];
        const int dj = det_idx[cj];
        apply_match(tracklet_by_id(apriori[ti].first), frame_idx, detections[dj].box);
        trk_matched[ti] = 1;
        det_matched[dj] = 1;
      }
    }

    for (size_t i = 0; i < apriori.size(); ++i) {
      if (!trk_matched[i]) apply_miss_internal(tracklet_by_id(apriori[i].first));
    }
    for (size_t j = 0; j < detections.size(); ++j) {
      if (!det_matched[j]) spawn(frame_idx, detections[j]);
    }
  }

  /// Localization-frame entry point: feed the selected a-posteriori box for
  /// one tracklet. No new tracklets are ever created through this path.
  void apply_update(int id, int frame_idx, const GlobalBox& box) {
    apply_match(tracklet_by_id(id), frame_idx, box);
  }

  /// Localization-frame entry point: count a miss for one tracklet.
  void apply_miss(int id) { apply_miss_internal(tracklet_by_id(id)); }

  /// Histories of tracklets that confirmed at least once, restricted to
  /// frames at or after confirmation. With include_tentative_in_output the
  /// raw histories of never-confirmed tracklets are emitted too.
  std::vector<TrackHistory> finalize() const {
    std::vector<TrackHistory> out;
    for (const auto& t : tracklets_) {
      TrackHistory h;
      h.id = t.id;
      if (t.ever_confirmed()) {
        for (const auto& [frame, box] : t.history) {
          if (frame >= t.first_confirmed_frame) h.boxes.emplace(frame, box);
        }
      } else if (cfg_.include_tentative_in_output) {
        h.boxes = t.history;
      }
      if (!h.boxes.empty()) out.push_back(std::move(h));
    }
    return out;
  }

 private:
  Tracklet& tracklet_by_id(int id) {
    for (auto& t : tracklets_) {
      if (t.id == id) return t;
    }
    throw std::invalid_argument("unknown tracklet id " + std::to_string(id));
  }

  void apply_match(Tracklet& t, int frame_idx, const GlobalBox& box) {
    if (!t.live()) throw std::logic_error("update on removed tracklet");
    t.state = kf_update(t.state, box, cfg_.noise);
    t.hits += 1;
    t.misses = 0;
    if (t.status == TrackStatus::lost) t.status = TrackStatus::confirmed;
    if (t.status == TrackStatus::tentative && t.hits >= cfg_.min_hits) {
      t.status = TrackStatus::confirmed;
      t.first_confirmed_frame = frame_idx;
    }
    const auto [it, inserted] = t.history.emplace(frame_idx, state_box(t.state));
    if (!inserted) {
      throw std::invalid_argument("duplicate frame " + std::to_string(frame_idx) +
                                  " for tracklet " + std::to_string(t.id));
    }
  }

  void apply_miss_internal(Tracklet& t) {
    if (!t.live()) return;
    t.misses += 1;
    t.hits = 0;
    if (t.status == TrackStatus::confirmed) t.status = TrackStatus::lost;
    if (t.misses > cfg_.max_age) t.status = TrackStatus::removed;
  }

  void spawn(int frame_idx, const Detection& det) {
    Tracklet t;
    t.id = next_id_++;
    t.state = kf_init(det.box, cfg_.noise);
    t.label = det.label;
    t.hits = 1;
    t.age = 1;
    if (cfg_.min_hits <= 1) {
      t.status = TrackStatus::confirmed;
      t.first_confirmed_frame = frame_idx;
    }
    t.history.emplace(frame_idx, state_box(t.state));
    tracklets_.push_back(std::move(t));
  }

  TrackerConfig cfg_;
  std::vector<Tracklet> tracklets_;
  std::optional<std::vector<std::pair<int, GlobalBox>>> pending_apriori_;
  int next_id_ = 1;
};

}  // namespace lbt
