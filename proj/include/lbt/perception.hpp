#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "lbt/geometry.hpp"
#include "lbt/lbt.hpp"
#include "lbt/rng.hpp"
#include "lbt/simulator.hpp"
#include "lbt/tracker.hpp"

namespace lbt {

/// Noise model for the synthetic full-frame detector. Stands in for a CNN
/// detector: per-box misses, clipped-Gaussian jitter, Poisson clutter.
struct DetectorNoise {
  double fn_rate = 0.0;       ///< per-box miss probability
  double fp_per_frame = 0.0;  ///< mean spurious detections per frame
  double pos_sigma = 0.0;     ///< center jitter, fraction of box dimensions
  double size_sigma = 0.0;    ///< dimension jitter fraction
  double conf_tp_mean = 0.9;
  double conf_fp_mean = 0.3;
  double conf_spread = 0.05;
  double clutter_size_min = 20.0;
  double clutter_size_max = 80.0;
  std::uint64_t seed = 1;
};

/// Noise model for the synthetic localizer.
struct LocalizerNoise {
  int l_max = 3;  ///< candidates returned per crop
  double pos_sigma = 0.0;
  double size_sigma = 0.0;
  double target_conf_mean = 0.9;
  double clutter_conf_mean = 0.1;
  double conf_spread = 0.05;
  std::uint64_t seed = 2;
};

/// Latency model for simulated-throughput studies: full-frame detection is
/// flat-cost; localization costs a fixed batch overhead plus a marginal
/// per-crop term.
struct CostModel {
  double detect_ms = 40.0;
  double loc_batch_ms = 2.0;
  double loc_crop_ms = 1.5;
};

inline double simulate_frame_time(bool is_detection, int n_crops, const CostModel& cm) {
  return is_detection ? cm.detect_ms : cm.loc_batch_ms + cm.loc_crop_ms * n_crops;
}

namespace detail {

inline GlobalBox jitter_box(const GlobalBox& b, double pos_sigma, double size_sigma, Rng& rng) {
  GlobalBox out = b;
  if (pos_sigma > 0.0) {
    out.x += rng.normal(0.0, pos_sigma * b.w);
    out.y += rng.normal(0.0, pos_sigma * b.h);
  }
  if (size_sigma > 0.0) {
    out.w = std::max(1.0, b.w * (1.0 + rng.normal(0.0, size_sigma)));
    out.h = std::max(1.0, b.h * (1.0 + rng.normal(0.0, size_sigma)));
  }
  return out;
}

// Clamp a local box to the crop square [-C/2, C/2]^2; empty results are
// dropped by the caller.
inline std::optional<LocalBox> clip_local(const LocalBox& b, double c) {
  const double half = c / 2.0;
  const double x1 = std::max(b.x - b.w / 2.0, -half);
  const double x2 = std::min(b.x + b.w / 2.0, half);
  const double y1 = std::max(b.y - b.h / 2.0, -half);
  const double y2 = std::min(b.y + b.h / 2.0, half);
  if (x2 - x1 <= 0.0 || y2 - y1 <= 0.0) return std::nullopt;
  return LocalBox{(x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1};
}

}  // namespace detail

/// Synthetic detector over ground truth: each box survives with probability
/// 1 - fn_rate and is jittered; Poisson(fp_per_frame) clutter boxes are
/// placed uniformly in the frame. Deterministic given the rng stream.
inline std::vector<Detection> oracle_detect(const GtFrame& gt_frame, const DetectorNoise& noise,
                                            FrameDims dims, Rng& rng) {
  std::vector<Detection> out;
  out.reserve(gt_frame.size());
  for (const auto& [id, box] : gt_frame) {
    if (noise.fn_rate > 0.0 && rng.bernoulli(noise.fn_rate)) continue;
    Detection d;
    d.box = detail::jitter_box(box, noise.pos_sigma, noise.size_sigma, rng);
    d.confidence = rng.clipped_normal(noise.conf_tp_mean, noise.conf_spread, 0.0, 1.0);
    out.push_back(d);
  }
  const int n_clutter = rng.poisson(noise.fp_per_frame);
  for (int k = 0; k < n_clutter; ++k) {
    Detection d;
    d.box.w = rng.uniform(noise.clutter_size_min, noise.clutter_size_max);
    d.box.h = rng.uniform(noise.clutter_size_min, noise.clutter_size_max);
    d.box.x = rng.uniform(d.box.w / 2.0, dims.width - d.box.w / 2.0);
    d.box.y = rng.uniform(d.box.h / 2.0, dims.height - d.box.h / 2.0);
    d.confidence = rng.clipped_normal(noise.conf_fp_mean, noise.conf_spread, 0.0, 1.0);
    out.push_back(d);
  }
  return out;
}

/// Synthetic localizer: every ground-truth object intersecting the crop
/// yields one jittered candidate in local coordinates; the list is padded to
/// l_max with clutter. Candidates are clipped to the crop square.
inline std::vector<LocalizerCandidate> oracle_localize(const Crop& crop, const GtFrame& gt_frame,
                                                       const LocalizerNoise& noise, int C,
                                                       Rng& rng) {
  const double c = static_cast<double>(C);
  const GlobalBox region = crop_region(crop);
  std::vector<LocalizerCandidate> out;
  for (const auto& [id, box] : gt_frame) {
    if (iou(region, box) <= 0.0) continue;
    LocalBox local = global_to_local(box, crop, c);
    if (noise.pos_sigma > 0.0) {
      local.x += rng.normal(0.0, noise.pos_sigma * local.w);
      local.y += rng.normal(0.0, noise.pos_sigma * local.h);
    }
    if (noise.size_sigma > 0.0) {
      local.w = std::max(1.0, local.w * (1.0 + rng.normal(0.0, noise.size_sigma)));
      local.h = std::max(1.0, local.h * (1.0 + rng.normal(0.0, noise.size_sigma)));
    }
    const auto clipped = detail::clip_local(local, c);
    if (!clipped) continue;
    out.push_back({*clipped, rng.clipped_normal(noise.target_conf_mean, noise.conf_spread, 0.0, 1.0)});
  }
  while (static_cast<int>(out.size()) < noise.l_max) {
    LocalBox b;
    b.w = rng.uniform(c / 8.0, c / 2.0);
    b.h = rng.uniform(c / 8.0, c / 2.0);
    b.x = rng.uniform(-(c - b.w) / 2.0, (c - b.w) / 2.0);
    b.y = rng.uniform(-(c - b.h) / 2.0, (c - b.h) / 2.0);
    out.push_back({b, rng.clipped_normal(noise.clutter_conf_mean, noise.conf_spread, 0.0, 1.0)});
  }
  return out;
}

/// Per-frame detections replayed from an external store (e.g. a MOTChallenge
/// det file). Frames are 0-based here; absent frames yield no detections.
using DetectionStore = std::map<int, std::vector<Detection>>;

inline std::vector<Detection> file_detect(const DetectionStore& store, int frame_idx) {
  const auto it = store.find(frame_idx);
  return it == store.end() ? std::vector<Detection>{} : it->second;
}

// ---- plugin adapters -------------------------------------------------------

/// Detector plugin over simulator ground truth. The returned function owns
/// its rng stream, so one instance per run keeps results reproducible.
inline DetectorFn make_oracle_detector(const GroundTruth& gt, const DetectorNoise& noise) {
  auto rng = std::make_shared<Rng>(noise.seed);
  return [&gt, noise, rng](int frame_idx) {
    return oracle_detect(gt.frames.at(static_cast<size_t>(frame_idx)), noise, gt.dims, *rng);
  };
}

inline LocalizerFn make_oracle_localizer(const GroundTruth& gt, const LocalizerNoise& noise,
                                         int localizer_size) {
  auto rng = std::make_shared<Rng>(noise.seed);
  return [&gt, noise, localizer_size, rng](int frame_idx, const Crop& crop) {
    return oracle_localize(crop, gt.frames.at(static_cast<size_t>(frame_idx)), noise,
                           localizer_size, *rng);
  };
}

inline DetectorFn make_file_detector(std::shared_ptr<const DetectionStore> store) {
  return [store](int frame_idx) { return file_detect(*store, frame_idx); };
}

/// Localizer derived from a detection store: candidates for a crop are the
/// stored detections of that frame that intersect the crop, mapped into
/// local coordinates with their file confidences.
inline LocalizerFn make_file_localizer(std::shared_ptr<const DetectionStore> store,
                                       int localizer_size) {
  return [store, localizer_size](int frame_idx, const Crop& crop) {
    const double c = static_cast<double>(localizer_size);
    const GlobalBox region = crop_region(crop);
    std::vector<LocalizerCandidate> out;
    const auto it = store->find(frame_idx);
    if (it == store->end()) return out;
    for (const auto& det : it->second) {
      if (iou(region, det.box) <= 0.0) continue;
      const auto clipped = detail::clip_local(global_to_local(det.box, crop, c), c);
      if (!clipped) continue;
      out.push_back({*clipped, det.confidence});
    }
    return out;
  };
}

}  // namespace lbt
