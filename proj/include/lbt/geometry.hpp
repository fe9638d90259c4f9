#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>

namespace lbt {

/// Axis-aligned bounding box in frame pixels, center form.
struct GlobalBox {
  double x = 0.0;  ///< center x
  double y = 0.0;  ///< center y
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const GlobalBox&, const GlobalBox&) = default;
};

/// Square frame region with side s, centered on (cx, cy).
struct Crop {
  double cx = 0.0;
  double cy = 0.0;
  double s = 0.0;

  friend bool operator==(const Crop&, const Crop&) = default;
};

/// Box in localizer coordinates: origin at the crop center, the crop square
/// spans [-C/2, C/2] on both axes after rescaling to C x C.
struct LocalBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const LocalBox&, const LocalBox&) = default;
};

struct FrameDims {
  int width = 0;
  int height = 0;
};

/// Anything with a center-form (x, y, w, h) layout.
template <class B>
concept CenterBox = requires(const B& b) {
  { b.x } -> std::convertible_to<double>;
  { b.y } -> std::convertible_to<double>;
  { b.w } -> std::convertible_to<double>;
  { b.h } -> std::convertible_to<double>;
};

/// Intersection-over-union of two center-form boxes. Symmetric, in [0, 1],
/// 1 iff identical, 0 iff disjoint. All extents derive from the same
/// corner-form differences so iou(a, a) == 1.0 holds exactly.
template <CenterBox A, CenterBox B>
double iou(const A& a, const B& b) {
  const double ax1 = a.x - a.w / 2.0, ax2 = a.x + a.w / 2.0;
  const double ay1 = a.y - a.h / 2.0, ay2 = a.y + a.h / 2.0;
  const double bx1 = b.x - b.w / 2.0, bx2 = b.x + b.w / 2.0;
  const double by1 = b.y - b.h / 2.0, by2 = b.y + b.h / 2.0;
  const double ow = std::min(ax2, bx2) - std::max(ax1, bx1);
  const double oh = std::min(ay2, by2) - std::max(ay1, by1);
  if (ow <= 0.0 || oh <= 0.0) return 0.0;
  const double inter = ow * oh;
  const double uni = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

/// Euclidean distance between box centers.
template <CenterBox A, CenterBox B>
double center_distance(const A& a, const B& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Square crop centered on the box, side max(w, h) * beta.
inline Crop make_crop(const GlobalBox& box, double beta) {
  return Crop{box.x, box.y, std::max(box.w, box.h) * beta};
}

/// Map a localizer-frame box back to frame pixels. The scale factor is
/// crop.s / C; a local box at the origin lands on the crop center.
inline GlobalBox local_to_global(const LocalBox& lb, const Crop& crop, double C) {
  const double k = crop.s / C;
  return GlobalBox{lb.x * k + crop.cx, lb.y * k + crop.cy, lb.w * k, lb.h * k};
}

/// Exact algebraic inverse of local_to_global.
inline LocalBox global_to_local(const GlobalBox& gb, const Crop& crop, double C) {
  const double k = C / crop.s;
  return LocalBox{(gb.x - crop.cx) * k, (gb.y - crop.cy) * k, gb.w * k, gb.h * k};
}

/// Translate the crop minimally so the square lies inside the frame; if the
/// side exceeds the frame's smaller dimension it is shrunk to fit first.
inline Crop clip_crop(const Crop& crop, const FrameDims& dims) {
  const double w = static_cast<double>(dims.width);
  const double h = static_cast<double>(dims.height);
  const double s = std::min(crop.s, std::min(w, h));
  const double cx = std::clamp(crop.cx, s / 2.0, w - s / 2.0);
  const double cy = std::clamp(crop.cy, s / 2.0, h - s / 2.0);
  return Crop{cx, cy, s};
}

/// The crop's square region as a center-form box.
inline GlobalBox crop_region(const Crop& crop) {
  return GlobalBox{crop.cx, crop.cy, crop.s, crop.s};
}

/// True when box b lies entirely inside box a.
template <CenterBox A, CenterBox B>
bool box_contains(const A& a, const B& b) {
  return b.x - b.w / 2.0 >= a.x - a.w / 2.0 && b.x + b.w / 2.0 <= a.x + a.w / 2.0 &&
         b.y - b.h / 2.0 >= a.y - a.h / 2.0 && b.y + b.h / 2.0 <= a.y + a.h / 2.0;
}

}  // namespace lbt
