#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "lbt/geometry.hpp"
#include "lbt/lbt.hpp"
#include "lbt/rng.hpp"

namespace lbt {

enum class MotionModel { constant_velocity, gentle_turn };

/// Synthetic scene parameters. Objects arrive by a Poisson process at the
/// frame edges moving inward, and leave at lifetime end or when they reach a
/// frame boundary.
struct SceneConfig {
  FrameDims dims{1920, 1080};
  int n_frames = 300;
  double arrival_rate = 0.03;  ///< expected new objects per frame
  int lifetime_min = 120;
  int lifetime_max = 240;
  double speed_min = 2.0;  ///< pixels per frame
  double speed_max = 6.0;
  double size_min = 40.0;
  double size_max = 90.0;
  MotionModel motion = MotionModel::constant_velocity;
  /// Horizontal-lane mode: at most one object per disjoint y-band, straight
  /// horizontal motion, so boxes never overlap. Used to isolate scheduling
  /// effects from association errors.
  bool non_overlapping = false;
  std::uint64_t seed = 7;
};

using GtFrame = std::vector<std::pair<int, GlobalBox>>;

struct ObjectSpan {
  int first_frame = 0;
  int last_frame = 0;

  int lifetime() const { return last_frame - first_frame + 1; }
};

struct GroundTruth {
  FrameDims dims;
  int n_frames = 0;
  std::vector<GtFrame> frames;         ///< index = frame
  std::map<int, ObjectSpan> objects;   ///< id -> lifespan
};

namespace detail {

struct SimObject {
  int id = 0;
  double x = 0, y = 0, w = 0, h = 0;
  double vx = 0, vy = 0;
  double turn = 0;  ///< radians per frame, gentle_turn only
  int born = 0;
  int lifetime = 0;
  int lane = -1;
};

inline bool inside_frame(const SimObject& o, const FrameDims& dims) {
  return o.x - o.w / 2.0 >= 0.0 && o.x + o.w / 2.0 <= dims.width &&
         o.y - o.h / 2.0 >= 0.0 && o.y + o.h / 2.0 <= dims.height;
}

}  // namespace detail

/// Generate a scene deterministically from the rng stream.
inline GroundTruth generate_scene(const SceneConfig& cfg, Rng& rng) {
  GroundTruth gt;
  gt.dims = cfg.dims;
  gt.n_frames = cfg.n_frames;
  gt.frames.resize(static_cast<size_t>(std::max(cfg.n_frames, 0)));

  const double lane_height = cfg.size_max + 8.0;
  const int n_lanes =
      cfg.non_overlapping ? std::max(1, static_cast<int>(cfg.dims.height / lane_height)) : 0;
  // A freed lane stays vacant for a cooldown so stale motion estimates from
  // the previous occupant cannot sit on top of a new arrival.
  constexpr int kLaneCooldown = 30;
  std::vector<int> lane_free_at(static_cast<size_t>(std::max(n_lanes, 1)), 0);

  std::vector<detail::SimObject> live;
  int next_id = 1;

  for (int f = 0; f < cfg.n_frames; ++f) {
    // advance, then retire leavers
    for (auto& o : live) {
      if (cfg.motion == MotionModel::gentle_turn && !cfg.non_overlapping) {
        const double c = std::cos(o.turn), s = std::sin(o.turn);
        const double vx = o.vx * c - o.vy * s;
        const double vy = o.vx * s + o.vy * c;
        o.vx = vx;
        o.vy = vy;
      }
      o.x += o.vx;
      o.y += o.vy;
    }
    std::erase_if(live, [&](const detail::SimObject& o) {
      const bool gone = f - o.born >= o.lifetime || !detail::inside_frame(o, cfg.dims);
      if (gone && o.lane >= 0) lane_free_at[static_cast<size_t>(o.lane)] = f + kLaneCooldown;
      return gone;
    });

    // arrivals at frame edges
    const int n_new = rng.poisson(cfg.arrival_rate);
    for (int k = 0; k < n_new; ++k) {
      detail::SimObject o;
      o.id = next_id;
      o.born = f;
      o.lifetime = rng.uniform_int(cfg.lifetime_min, cfg.lifetime_max);
      o.w = rng.uniform(cfg.size_min, cfg.size_max);
      o.h = rng.uniform(cfg.size_min, cfg.size_max);
      const double speed = rng.uniform(cfg.speed_min, cfg.speed_max);

      if (cfg.non_overlapping) {
        std::vector<int> free_lanes;
        for (int l = 0; l < n_lanes; ++l) {
          if (lane_free_at[static_cast<size_t>(l)] <= f) free_lanes.push_back(l);
        }
        if (free_lanes.empty()) continue;  // lane mode sheds arrivals when full
        o.lane = free_lanes[static_cast<size_t>(
            rng.uniform_int(0, static_cast<int>(free_lanes.size()) - 1))];
        lane_free_at[static_cast<size_t>(o.lane)] = cfg.n_frames + kLaneCooldown;
        o.y = (o.lane + 0.5) * lane_height;
        const bool from_left = rng.bernoulli(0.5);
        o.x = from_left ? o.w / 2.0 : cfg.dims.width - o.w / 2.0;
        o.vx = from_left ? speed : -speed;
        o.vy = 0.0;
      } else {
        const int edge = rng.uniform_int(0, 3);  // left, right, top, bottom
        const double slant = rng.uniform(-0.35, 0.35);
        switch (edge) {
          case 0:
            o.x = o.w / 2.0;
            o.y = rng.uniform(o.h / 2.0, cfg.dims.height - o.h / 2.0);
            o.vx = speed * std::cos(slant);
            o.vy = speed * std::sin(slant);
            break;
          case 1:
            o.x = cfg.dims.width - o.w / 2.0;
            o.y = rng.uniform(o.h / 2.0, cfg.dims.height - o.h / 2.0);
            o.vx = -speed * std::cos(slant);
            o.vy = speed * std::sin(slant);
            break;
          case 2:
            o.x = rng.uniform(o.w / 2.0, cfg.dims.width - o.w / 2.0);
            o.y = o.h / 2.0;
            o.vx = speed * std::sin(slant);
            o.vy = speed * std::cos(slant);
            break;
          default:
            o.x = rng.uniform(o.w / 2.0, cfg.dims.width - o.w / 2.0);
            o.y = cfg.dims.height - o.h / 2.0;
            o.vx = speed * std::sin(slant);
            o.vy = -speed * std::cos(slant);
            break;
        }
        if (cfg.motion == MotionModel::gentle_turn) o.turn = rng.uniform(-0.02, 0.02);
      }
      next_id += 1;
      live.push_back(o);
    }

    for (const auto& o : live) {
      gt.frames[static_cast<size_t>(f)].emplace_back(o.id, GlobalBox{o.x, o.y, o.w, o.h});
      auto [it, inserted] = gt.objects.try_emplace(o.id, ObjectSpan{f, f});
      if (!inserted) it->second.last_frame = f;
    }
  }
  return gt;
}

inline GroundTruth generate_scene(const SceneConfig& cfg) {
  Rng rng(cfg.seed);
  return generate_scene(cfg, rng);
}

/// Added false-negative rate caused by the detection schedule: a new object
/// cannot be picked up before the first detection frame at or after its
/// entry. `exact` enumerates the schedule; `approx` is the mean-gap model
/// (d/2 per object, capped at lifetime).
struct FnIncrease {
  double exact = 0.0;
  double approx = 0.0;
};

inline FnIncrease expected_fn_increase(const GroundTruth& gt, int d) {
  long long total_boxes = 0;
  for (const auto& frame : gt.frames) total_boxes += static_cast<long long>(frame.size());
  if (total_boxes == 0) return {};

  double exact_sum = 0.0;
  double approx_sum = 0.0;
  for (const auto& [id, span] : gt.objects) {
    const int life = span.lifetime();
    const int gap = next_detection_frame(span.first_frame, d) - span.first_frame;
    exact_sum += std::min(gap, life);
    approx_sum += std::min(d / 2.0, static_cast<double>(life));
  }
  return FnIncrease{exact_sum / static_cast<double>(total_boxes),
                    approx_sum / static_cast<double>(total_boxes)};
}

/// Exact schedule-based count of false negatives attributable to new-object
/// latency; the integer numerator of expected_fn_increase().exact.
inline long long schedule_fn_count(const GroundTruth& gt, int d) {
  long long sum = 0;
  for (const auto& [id, span] : gt.objects) {
    const int gap = next_detection_frame(span.first_frame, d) - span.first_frame;
    sum += std::min(gap, span.lifetime());
  }
  return sum;
}

}  // namespace lbt
