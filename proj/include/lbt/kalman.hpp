#pragma once

#include <Eigen/Dense>

#include "lbt/geometry.hpp"

namespace lbt {

/// Filter noise scales. Sigmas are fractions of the current box dimensions
/// (x and w components scale with width, y and h with height), so the
/// uncertainty tracks object scale.
struct NoiseConfig {
  double measurement_sigma = 1.0 / 20.0;
  double process_pos_sigma = 1.0 / 20.0;
  double process_vel_sigma = 1.0 / 160.0;
  double init_pos_factor = 2.0;   ///< initial position std, multiples of measurement_sigma
  double init_vel_factor = 10.0;  ///< initial velocity std, multiples of process_vel_sigma
};

/// Constant-velocity state over a center-form box: mean is
/// [x, y, w, h, vx, vy, vw, vh] in pixels and pixels/frame.
struct KalmanState {
  Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 8> cov = Eigen::Matrix<double, 8, 8>::Identity();
};

/// Floor for box dimensions, keeps crops valid.
inline constexpr double kMinBoxSize = 1.0;

namespace detail {

// Scale vector; entry i of the state noise is sigma * scales[i].
inline Eigen::Matrix<double, 8, 1> dimension_scales(double w, double h) {
  const double sw = std::max(w, kMinBoxSize);
  const double sh = std::max(h, kMinBoxSize);
  Eigen::Matrix<double, 8, 1> d;
  d << sw, sh, sw, sh, sw, sh, sw, sh;
  return d;
}

inline void symmetrize(Eigen::Matrix<double, 8, 8>& p) {
  p = 0.5 * (p + p.transpose()).eval();
}

inline void clamp_size(Eigen::Matrix<double, 8, 1>& mean) {
  mean(2) = std::max(mean(2), kMinBoxSize);
  mean(3) = std::max(mean(3), kMinBoxSize);
}

}  // namespace detail

/// The box described by the state mean.
inline GlobalBox state_box(const KalmanState& s) {
  return GlobalBox{s.mean(0), s.mean(1), std::max(s.mean(2), kMinBoxSize),
                   std::max(s.mean(3), kMinBoxSize)};
}

/// New filter centered on a detection: zero velocity, diagonal covariance
/// with inflated velocity uncertainty.
inline KalmanState kf_init(const GlobalBox& box, const NoiseConfig& cfg) {
  KalmanState s;
  s.mean << box.x, box.y, box.w, box.h, 0.0, 0.0, 0.0, 0.0;
  detail::clamp_size(s.mean);
  const auto d = detail::dimension_scales(box.w, box.h);
  Eigen::Matrix<double, 8, 1> std;
  for (int i = 0; i < 4; ++i) std(i) = cfg.init_pos_factor * cfg.measurement_sigma * d(i);
  for (int i = 4; i < 8; ++i) std(i) = cfg.init_vel_factor * cfg.process_vel_sigma * d(i);
  s.cov = std.array().square().matrix().asDiagonal();
  return s;
}

struct PredictResult {
  KalmanState state;
  GlobalBox box;  ///< the a-priori box
};

/// Advance one frame under the constant-velocity model; returns the advanced
/// state and the a-priori box (dimensions floored at kMinBoxSize).
inline PredictResult kf_predict(const KalmanState& state, const NoiseConfig& cfg) {
  Eigen::Matrix<double, 8, 8> f = Eigen::Matrix<double, 8, 8>::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;

  const auto d = detail::dimension_scales(state.mean(2), state.mean(3));
  Eigen::Matrix<double, 8, 1> q_std;
  for (int i = 0; i < 4; ++i) q_std(i) = cfg.process_pos_sigma * d(i);
  for (int i = 4; i < 8; ++i) q_std(i) = cfg.process_vel_sigma * d(i);
  const Eigen::Matrix<double, 8, 8> q = q_std.array().square().matrix().asDiagonal();

  PredictResult out;
  out.state.mean = f * state.mean;
  detail::clamp_size(out.state.mean);
  out.state.cov = f * state.cov * f.transpose() + q;
  detail::symmetrize(out.state.cov);
  out.box = state_box(out.state);
  return out;
}

/// Standard measurement update with observation [x, y, w, h].
inline KalmanState kf_update(const KalmanState& state, const GlobalBox& meas,
                             const NoiseConfig& cfg) {
  Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;

  const auto d = detail::dimension_scales(meas.w, meas.h);
  Eigen::Matrix<double, 4, 1> r_std;
  for (int i = 0; i < 4; ++i) r_std(i) = cfg.measurement_sigma * d(i);
  const Eigen::Matrix<double, 4, 4> r = r_std.array().square().matrix().asDiagonal();

  const Eigen::Matrix<double, 4, 4> s = h * state.cov * h.transpose() + r;
  // K = P H^T S^-1, via solving S K^T = H P.
  const Eigen::Matrix<double, 8, 4> k =
      s.llt().solve(h * state.cov).transpose();

  Eigen::Matrix<double, 4, 1> z;
  z << meas.x, meas.y, meas.w, meas.h;

  KalmanState out;
  out.mean = state.mean + k * (z - h * state.mean);
  detail::clamp_size(out.mean);
  out.cov = (Eigen::Matrix<double, 8, 8>::Identity() - k * h) * state.cov;
  detail::symmetrize(out.cov);
  return out;
}

}  // namespace lbt
