#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <vector>

#include "glk/geometry.hpp"

namespace glk {

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;

/// Planar position and velocity, [px, py, vx, vy].
struct KinematicState {
  double px = 0.0;
  double py = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  double speed() const;
  double heading() const;
  Point2 position() const { return {px, py}; }
  Vector4 to_vector() const { return {px, py, vx, vy}; }
  static KinematicState from_vector(const Vector4& v) { return {v[0], v[1], v[2], v[3]}; }
};

struct GaussianBelief {
  Vector4 mean = Vector4::Zero();
  Matrix4 cov = Matrix4::Zero();

  KinematicState state() const { return KinematicState::from_vector(mean); }
};

/// Per-component process noise variances of the constant-velocity and the
/// lane-snapping models, ordered [px, py, vx, vy].
struct NoiseConfig {
  Vector4 sigma_cv_sq = Vector4::Constant(0.25);
  Vector4 sigma_ls_sq = Vector4::Constant(0.25);

  static NoiseConfig uniform(double cv_sq, double ls_sq);
  /// Throws std::invalid_argument unless every variance is finite and > 0.
  void validate() const;
};

struct PredictionConfig {
  double dt = 0.1;
  double horizon = 6.0;
  double heading_fallback_threshold = std::numbers::pi / 6.0;
  double min_speed = 0.1;

  std::size_t steps() const;
  void validate() const;
};

struct CurvatureConfig {
  double decay_rate = 0.9;
  double turn_trigger_eps = 0.02;
  /// Seconds per chord when estimating the turn rate from a track.
  double heading_window = 0.5;

  void validate() const;
};

struct TracePoint {
  double t = 0.0;
  GaussianBelief belief;
};

using PredictionTrace = std::vector<TracePoint>;

/// Diagonal fusion weights of one GLK step: K and the fused noise.
struct FusionGains {
  Vector4 gain = Vector4::Constant(0.5);
  Vector4 fused_noise = Vector4::Constant(0.125);

  static FusionGains from_noise(const NoiseConfig& noise);
  /// K = I and the lane-snapping noise alone: pure lane snapping.
  static FusionGains lane_snapping_only(const NoiseConfig& noise);
};

Matrix4 cv_matrix(double dt);

PredictionTrace cv_predict(const KinematicState& x0, const PredictionConfig& cfg,
                           const NoiseConfig& noise);

/// Constant speed with a heading increment decaying geometrically per step:
/// step i turns by decay_rate^i * delta_theta before moving. The covariance
/// is propagated through the Jacobian of each rotate-and-move step.
PredictionTrace curvature_cv_predict(const KinematicState& x0, double delta_theta,
                                     const CurvatureConfig& ccfg, const PredictionConfig& cfg,
                                     const NoiseConfig& noise);

/// Lane-snapping mean from a lane locally approximated by the line through
/// the projection point with heading theta_l.
KinematicState ls_mean(const KinematicState& x, const LaneProjection& proj, double dt);

/// Lane-snapping mean on the actual centerline: the projection is advanced
/// ||v|| dt along the polyline and the velocity re-aimed along theta_l.
/// Coincides with ls_mean wherever the lane is straight.
KinematicState lane_snap_mean(const KinematicState& x, const LaneCenterline& lane, double dt);

/// Jacobian of the line-approximated lane-snapping mean. Throws
/// std::domain_error when the speed is below min_speed.
Matrix4 ls_jacobian(const KinematicState& x, double theta_l, double dt,
                    double min_speed = 0.1);

/// One fused step (mean (I-K)A mu + K g(mu), covariance M Sigma M^T + fused
/// noise). Below min_speed the position is held and only the fused noise is
/// added.
GaussianBelief glk_step(const GaussianBelief& belief, const LaneCenterline& lane,
                        const NoiseConfig& noise, const PredictionConfig& cfg);

GaussianBelief fused_step(const GaussianBelief& belief, const LaneCenterline& lane,
                          const FusionGains& gains, const PredictionConfig& cfg);

/// Constant-velocity step of a belief: (A mu, A Sigma A^T + Sigma_cv).
GaussianBelief cv_step(const GaussianBelief& belief, const NoiseConfig& noise, double dt);

/// True when the belief is moving and its heading is within the fallback
/// threshold of the lane tangent at its projection.
bool lane_keeping_valid(const GaussianBelief& belief, const LaneCenterline& lane,
                        const PredictionConfig& cfg);

/// Iterated fusion from a known initial state. Once the heading leaves the
/// fallback threshold, that step and all later ones are constant velocity.
PredictionTrace glk_predict(const KinematicState& x0, const LaneCenterline& lane,
                            const NoiseConfig& noise, const PredictionConfig& cfg);

/// LS-CV: same recursion with K = I.
PredictionTrace ls_predict(const KinematicState& x0, const LaneCenterline& lane,
                           const NoiseConfig& noise, const PredictionConfig& cfg);

PredictionTrace fused_predict(const KinematicState& x0, const LaneCenterline& lane,
                              const FusionGains& gains, const NoiseConfig& noise,
                              const PredictionConfig& cfg);

}  // namespace glk
