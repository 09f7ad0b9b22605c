#include "glk/motion_models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace glk {

namespace {

Matrix4 symmetrized(const Matrix4& m) { return 0.5 * (m + m.transpose()); }

void check_positive(const Vector4& v, const char* name) {
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(v[i]) || v[i] <= 0.0) {
      throw std::invalid_argument(std::string(name) + " variances must be finite and > 0");
    }
  }
}

}  // namespace

double KinematicState::speed() const { return std::hypot(vx, vy); }

double KinematicState::heading() const { return std::atan2(vy, vx); }

NoiseConfig NoiseConfig::uniform(double cv_sq, double ls_sq) {
  NoiseConfig n;
  n.sigma_cv_sq = Vector4::Constant(cv_sq);
  n.sigma_ls_sq = Vector4::Constant(ls_sq);
  return n;
}

void NoiseConfig::validate() const {
  check_positive(sigma_cv_sq, "sigma_cv_sq");
  check_positive(sigma_ls_sq, "sigma_ls_sq");
}

std::size_t PredictionConfig::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

void PredictionConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  if (!(horizon >= dt) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be >= dt");
  }
  if (!(heading_fallback_threshold > 0.0)) {
    throw std::invalid_argument("heading_fallback_threshold must be > 0");
  }
  if (!(min_speed >= 0.0)) throw std::invalid_argument("min_speed must be >= 0");
}

void CurvatureConfig::validate() const {
  if (!(decay_rate >= 0.0 && decay_rate <= 1.0)) {
    throw std::invalid_argument("decay_rate must lie in [0, 1]");
  }
  if (!(turn_trigger_eps >= 0.0)) throw std::invalid_argument("turn_trigger_eps must be >= 0");
  if (!(heading_window > 0.0)) throw std::invalid_argument("heading_window must be > 0");
}

FusionGains FusionGains::from_noise(const NoiseConfig& noise) {
  FusionGains g;
  const Vector4 total = noise.sigma_cv_sq + noise.sigma_ls_sq;
  g.gain = noise.sigma_cv_sq.cwiseQuotient(total);
  g.fused_noise = noise.sigma_cv_sq.cwiseProduct(noise.sigma_ls_sq).cwiseQuotient(total);
  return g;
}

FusionGains FusionGains::lane_snapping_only(const NoiseConfig& noise) {
  FusionGains g;
  g.gain = Vector4::Ones();
  g.fused_noise = noise.sigma_ls_sq;
  return g;
}

Matrix4 cv_matrix(double dt) {
  Matrix4 a = Matrix4::Identity();
  a(0, 2) = dt;
  a(1, 3) = dt;
  return a;
}

GaussianBelief cv_step(const GaussianBelief& belief, const NoiseConfig& noise, double dt) {
  const Matrix4 a = cv_matrix(dt);
  GaussianBelief next;
  next.mean = a * belief.mean;
  next.cov = symmetrized(a * belief.cov * a.transpose() + Matrix4(noise.sigma_cv_sq.asDiagonal()));
  return next;
}

PredictionTrace cv_predict(const KinematicState& x0, const PredictionConfig& cfg,
                           const NoiseConfig& noise) {
  const std::size_t n = cfg.steps();
  PredictionTrace trace;
  trace.reserve(n);
  GaussianBelief b{x0.to_vector(), Matrix4::Zero()};
  for (std::size_t k = 1; k <= n; ++k) {
    b = cv_step(b, noise, cfg.dt);
    trace.push_back({static_cast<double>(k) * cfg.dt, b});
  }
  return trace;
}

PredictionTrace curvature_cv_predict(const KinematicState& x0, double delta_theta,
                                     const CurvatureConfig& ccfg, const PredictionConfig& cfg,
                                     const NoiseConfig& noise) {
  const std::size_t n = cfg.steps();
  const double speed = x0.speed();
  const Matrix4 q = noise.sigma_cv_sq.asDiagonal();

  PredictionTrace trace;
  trace.reserve(n);
  double heading = x0.heading();
  double turned = 0.0;
  GaussianBelief b{x0.to_vector(), Matrix4::Zero()};
  for (std::size_t i = 0; i < n; ++i) {
    // 0^0 == 1, so decay_rate = 0 turns exactly once.
    const double increment = std::pow(ccfg.decay_rate, static_cast<double>(i)) * delta_theta;
    turned += increment;
    const double c = std::cos(increment);
    const double s = std::sin(increment);

    Matrix4 f = Matrix4::Identity();
    f.block<2, 2>(2, 2) << c, -s, s, c;
    f.block<2, 2>(0, 2) = cfg.dt * f.block<2, 2>(2, 2);

    const double theta = heading + turned;
    const double vx = speed * std::cos(theta);
    const double vy = speed * std::sin(theta);
    b.mean = Vector4(b.mean[0] + vx * cfg.dt, b.mean[1] + vy * cfg.dt, vx, vy);
    b.cov = symmetrized(f * b.cov * f.transpose() + q);
    trace.push_back({static_cast<double>(i + 1) * cfg.dt, b});
  }
  return trace;
}

KinematicState ls_mean(const KinematicState& x, const LaneProjection& proj, double dt) {
  const double speed = x.speed();
  const double c = std::cos(proj.theta_l);
  const double s = std::sin(proj.theta_l);
  const double foot_x = x.px + proj.d * s;
  const double foot_y = x.py - proj.d * c;
  return {foot_x + speed * dt * c, foot_y + speed * dt * s, speed * c, speed * s};
}

KinematicState lane_snap_mean(const KinematicState& x, const LaneCenterline& lane, double dt) {
  const LaneProjection proj = lane.project(x.position());
  const double speed = x.speed();
  const Point2 p = lane.frenet_to_cartesian(proj.s + speed * dt, 0.0);
  return {p.x, p.y, speed * std::cos(proj.theta_l), speed * std::sin(proj.theta_l)};
}

Matrix4 ls_jacobian(const KinematicState& x, double theta_l, double dt, double min_speed) {
  const double speed = x.speed();
  if (speed < min_speed || speed <= 0.0) {
    throw std::domain_error("lane-snapping Jacobian undefined for a stationary vehicle");
  }
  const double c = std::cos(theta_l);
  const double s = std::sin(theta_l);
  const double ux = x.vx / speed;
  const double uy = x.vy / speed;
  Matrix4 j;
  j << c * c, s * c, ux * dt * c, uy * dt * c,
       s * c, s * s, ux * dt * s, uy * dt * s,
       0.0, 0.0, ux * c, uy * c,
       0.0, 0.0, ux * s, uy * s;
  return j;
}

GaussianBelief fused_step(const GaussianBelief& belief, const LaneCenterline& lane,
                          const FusionGains& gains, const PredictionConfig& cfg) {
  const KinematicState x = belief.state();
  const Matrix4 fused_noise = gains.fused_noise.asDiagonal();
  if (x.speed() < cfg.min_speed) {
    GaussianBelief held = belief;
    held.cov = symmetrized(belief.cov + fused_noise);
    return held;
  }

  const LaneProjection proj = lane.project(x.position());
  const Vector4 g = lane_snap_mean(x, lane, cfg.dt).to_vector();
  const Matrix4 jac = ls_jacobian(x, proj.theta_l, cfg.dt, cfg.min_speed);
  const Matrix4 a = cv_matrix(cfg.dt);
  const Matrix4 k = gains.gain.asDiagonal();
  const Matrix4 keep = Matrix4::Identity() - k;

  GaussianBelief next;
  next.mean = keep * (a * belief.mean) + k * g;
  const Matrix4 m = keep * a + k * jac;
  next.cov = symmetrized(m * belief.cov * m.transpose() + fused_noise);
  return next;
}

GaussianBelief glk_step(const GaussianBelief& belief, const LaneCenterline& lane,
                        const NoiseConfig& noise, const PredictionConfig& cfg) {
  return fused_step(belief, lane, FusionGains::from_noise(noise), cfg);
}

bool lane_keeping_valid(const GaussianBelief& belief, const LaneCenterline& lane,
                        const PredictionConfig& cfg) {
  const KinematicState x = belief.state();
  if (x.speed() < cfg.min_speed) return false;
  const LaneProjection proj = lane.project(x.position());
  return std::abs(wrap_angle(x.heading() - proj.theta_l)) <= cfg.heading_fallback_threshold;
}

PredictionTrace fused_predict(const KinematicState& x0, const LaneCenterline& lane,
                              const FusionGains& gains, const NoiseConfig& noise,
                              const PredictionConfig& cfg) {
  const std::size_t n = cfg.steps();
  PredictionTrace trace;
  trace.reserve(n);
  GaussianBelief b{x0.to_vector(), Matrix4::Zero()};
  bool cv_only = false;
  for (std::size_t k = 1; k <= n; ++k) {
    const bool moving = b.state().speed() >= cfg.min_speed;
    if (!cv_only && moving && !lane_keeping_valid(b, lane, cfg)) cv_only = true;
    b = cv_only ? cv_step(b, noise, cfg.dt) : fused_step(b, lane, gains, cfg);
    trace.push_back({static_cast<double>(k) * cfg.dt, b});
  }
  return trace;
}

PredictionTrace glk_predict(const KinematicState& x0, const LaneCenterline& lane,
                            const NoiseConfig& noise, const PredictionConfig& cfg) {
  return fused_predict(x0, lane, FusionGains::from_noise(noise), noise, cfg);
}

PredictionTrace ls_predict(const KinematicState& x0, const LaneCenterline& lane,
                           const NoiseConfig& noise, const PredictionConfig& cfg) {
  return fused_predict(x0, lane, FusionGains::lane_snapping_only(noise), noise, cfg);
}

}  // namespace glk
