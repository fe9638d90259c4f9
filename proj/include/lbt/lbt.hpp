#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lbt/geometry.hpp"
#include "lbt/tracker.hpp"

namespace lbt {

/// Parameters of the localization extension.
struct LbtConfig {
  int d = 0;            ///< frames skipped between detections; 0 = base tracker
  double beta = 2.0;    ///< crop expansion ratio
  int localizer_size = 112;  ///< C: localizer input resolution in pixels
  double selection_d = 32.0;  ///< confidence/distance balance, sort mode
  double selection_w = 1.0;   ///< confidence/IoU balance, kiou mode
  double min_selection_score = 0.5;  ///< acceptance floor; below it the crop is a miss
};

/// Mode-appropriate defaults; sort-mode scores live on a different scale so
/// the acceptance floor differs.
inline LbtConfig lbt_defaults(TrackerMode mode) {
  LbtConfig cfg;
  cfg.min_selection_score = mode == TrackerMode::kiou ? 0.5 : 0.0;
  return cfg;
}

/// One localizer output for a crop, in crop-centered local coordinates.
struct LocalizerCandidate {
  LocalBox box;
  double confidence = 0.0;
};

/// Detection frames sit every d+1 frames, starting at frame 0.
constexpr bool is_detection_frame(int frame_idx, int d) {
  return d <= 0 || frame_idx % (d + 1) == 0;
}

/// First detection frame at or after the given frame.
constexpr int next_detection_frame(int frame_idx, int d) {
  if (d <= 0) return frame_idx;
  const int period = d + 1;
  return ((frame_idx + period - 1) / period) * period;
}

/// Square crops around each a-priori location, clipped into the frame.
/// Input order (ascending id) is preserved.
inline std::vector<std::pair<int, Crop>> generate_crops(
    const std::vector<std::pair<int, GlobalBox>>& apriori, double beta, FrameDims dims) {
  std::vector<std::pair<int, Crop>> out;
  out.reserve(apriori.size());
  for (const auto& [id, box] : apriori) {
    out.emplace_back(id, clip_crop(make_crop(box, beta), dims));
  }
  return out;
}

/// Candidate score against the a-priori box mapped into crop coordinates.
/// sort mode: D * conf - center distance; kiou mode: W * conf + IoU.
inline double selection_score(const LocalizerCandidate& cand, const LocalBox& apriori_local,
                              const LbtConfig& cfg, TrackerMode mode) {
  if (mode == TrackerMode::kiou) {
    return cfg.selection_w * cand.confidence + iou(cand.box, apriori_local);
  }
  return cfg.selection_d * cand.confidence - center_distance(cand.box, apriori_local);
}

/// Best candidate for one crop, or nothing when no candidate reaches the
/// acceptance floor (counted as a miss by the caller). Ties go to the
/// earliest candidate.
inline std::optional<LocalBox> select_best_output(
    const std::vector<LocalizerCandidate>& candidates, const LocalBox& apriori_local,
    const LbtConfig& cfg, TrackerMode mode) {
  int best = -1;
  double best_score = 0.0;
  for (size_t j = 0; j < candidates.size(); ++j) {
    const double score = selection_score(candidates[j], apriori_local, cfg, mode);
    if (best < 0 || score > best_score) {
      best = static_cast<int>(j);
      best_score = score;
    }
  }
  if (best < 0 || best_score < cfg.min_selection_score) return std::nullopt;
  return candidates[best].box;
}

/// Full-frame detector plugin: frame index -> confidence-scored detections.
using DetectorFn = std::function<std::vector<Detection>(int frame_idx)>;

/// Localizer plugin: one crop -> up to l_max candidates in local coordinates.
using LocalizerFn = std::function<std::vector<LocalizerCandidate>(int frame_idx, const Crop& crop)>;

/// Localization frame (Steps 2a-3b): crop around each live tracklet, pick
/// the best localizer output per crop, convert back to frame coordinates and
/// update the tracklet. Unselected tracklets age; nothing is spawned here.
/// A localizer failure on a crop counts as a miss for that tracklet.
/// Returns the number of crops processed.
inline int process_localization_frame(Tracker& tracker, int frame_idx,
                                      const LocalizerFn& localizer, FrameDims dims,
                                      const LbtConfig& cfg) {
  const auto apriori = tracker.predict_all();
  const auto crops = generate_crops(apriori, cfg.beta, dims);
  const double c = static_cast<double>(cfg.localizer_size);
  for (size_t k = 0; k < crops.size(); ++k) {
    const auto& [id, crop] = crops[k];
    std::optional<LocalBox> best;
    try {
      const auto candidates = localizer(frame_idx, crop);
      const LocalBox apriori_local = global_to_local(apriori[k].second, crop, c);
      best = select_best_output(candidates, apriori_local, cfg, tracker.config().mode);
    } catch (...) {
      best.reset();
    }
    if (best) {
      tracker.apply_update(id, frame_idx, local_to_global(*best, crop, c));
    } else {
      tracker.apply_miss(id);
    }
  }
  return static_cast<int>(crops.size());
}

struct FrameTiming {
  int frame = 0;
  bool is_detection = false;
  int n_crops = 0;
  double wall_ms = 0.0;
};

struct RunOutput {
  std::vector<TrackHistory> histories;
  std::vector<FrameTiming> timing;
};

namespace detail {

inline std::vector<Detection> filtered_detections(const DetectorFn& detector, int frame_idx,
                                                  double min_confidence) {
  std::vector<Detection> dets;
  try {
    dets = detector(frame_idx);
  } catch (const std::exception& e) {
    throw std::runtime_error("detector failed at frame " + std::to_string(frame_idx) + ": " +
                             e.what());
  }
  std::erase_if(dets, [&](const Detection& d) { return d.confidence < min_confidence; });
  return dets;
}

}  // namespace detail

/// The extended loop: detection every d+1 frames, localization in between.
/// Frame indices run contiguously from 0. With d = 0 this is exactly the
/// base tracker.
inline RunOutput run_lbt(const DetectorFn& detector, const LocalizerFn& localizer, int n_frames,
                         const TrackerConfig& tracker_cfg, const LbtConfig& cfg, FrameDims dims) {
  using clock = std::chrono::steady_clock;
  Tracker tracker(tracker_cfg);
  RunOutput out;
  out.timing.reserve(static_cast<size_t>(std::max(n_frames, 0)));
  for (int f = 0; f < n_frames; ++f) {
    const auto t0 = clock::now();
    FrameTiming ft;
    ft.frame = f;
    ft.is_detection = is_detection_frame(f, cfg.d);
    if (ft.is_detection) {
      tracker.process_detection_frame(
          f, detail::filtered_detections(detector, f, tracker_cfg.min_confidence));
    } else {
      ft.n_crops = process_localization_frame(tracker, f, localizer, dims, cfg);
    }
    ft.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    out.timing.push_back(ft);
  }
  out.histories = tracker.finalize();
  return out;
}

/// The unextended tracking-by-detection loop, for baseline comparisons.
inline RunOutput run_base_tracker(const DetectorFn& detector, int n_frames,
                                  const TrackerConfig& tracker_cfg) {
  using clock = std::chrono::steady_clock;
  Tracker tracker(tracker_cfg);
  RunOutput out;
  out.timing.reserve(static_cast<size_t>(std::max(n_frames, 0)));
  for (int f = 0; f < n_frames; ++f) {
    const auto t0 = clock::now();
    tracker.process_detection_frame(
        f, detail::filtered_detections(detector, f, tracker_cfg.min_confidence));
    FrameTiming ft;
    ft.frame = f;
    ft.is_detection = true;
    ft.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    out.timing.push_back(ft);
  }
  out.histories = tracker.finalize();
  return out;
}

}  // namespace lbt
