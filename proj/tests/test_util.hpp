#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "glk/geometry.hpp"
#include "glk/interaction.hpp"
#include "glk/motion_models.hpp"

namespace glk::testing {

/// Quarter circle of `radius` around the origin from (radius, 0)
/// counter-clockwise, with waypoints roughly every `spacing` meters of arc.
inline LaneCenterline quarter_circle(double radius, double spacing, std::string id = "arc") {
  const double arc = radius * std::numbers::pi / 2.0;
  const int n = static_cast<int>(std::ceil(arc / spacing));
  std::vector<Point2> pts;
  for (int i = 0; i <= n; ++i) {
    const double a = (std::numbers::pi / 2.0) * i / n;
    pts.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return LaneCenterline(std::move(id), std::move(pts));
}

inline LaneCenterline straight_lane(Point2 a, Point2 b, std::string id = "straight") {
  return LaneCenterline(std::move(id), {a, b});
}

inline bool symmetric(const Matrix4& m, double tol = 1e-9) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline double min_eigenvalue(const Matrix4& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4> solver(0.5 * (m + m.transpose()));
  return solver.eigenvalues().minCoeff();
}

inline bool covariance_ok(const Matrix4& m) { return symmetric(m) && min_eigenvalue(m) >= -1e-9; }

struct FollowerObservation {
  double v = 0.0;
  LeadInfo lead;
  double accel = 0.0;
};

/// Follower driven by hidden IDM parameters `truth` behind a leader whose
/// speed oscillates, sampled at `dt` for `steps` steps. Observed
/// accelerations carry Gaussian noise of `accel_noise`.
inline std::vector<FollowerObservation> simulate_follower(const IDMParams& truth, double dt,
                                                          int steps, double accel_noise,
                                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, accel_noise);
  double x = 0.0, v = 10.0, lead_x = 25.0;
  std::vector<FollowerObservation> out;
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const double v_lead = 8.0 + 3.0 * std::sin(0.8 * t);
    const LeadInfo lead{std::max(lead_x - x, kMinLeadGap), v_lead};
    const double a = idm_accel(v, truth, lead);
    out.push_back({v, lead, a + (accel_noise > 0.0 ? noise(rng) : 0.0)});
    x += v * dt;
    lead_x += v_lead * dt;
    v = idm_velocity_step(v, a, dt);
  }
  return out;
}

/// Mean absolute one-step acceleration error of `params` on `obs`, against
/// the noise-free truth.
inline double accel_error(const IDMParams& params, const IDMParams& truth,
                          const std::vector<FollowerObservation>& obs) {
  double sum = 0.0;
  for (const auto& o : obs) sum += std::abs(idm_accel(o.v, params, o.lead) - idm_accel(o.v, truth, o.lead));
  return sum / static_cast<double>(obs.size());
}

inline IDMParams draw_params(const PriorRanges& r, std::mt19937_64& rng) {
  auto u = [&](const ParamRange& p) { return std::uniform_real_distribution<double>(p.lo, p.hi)(rng); };
  IDMParams p;
  p.v0 = u(r.v0);
  p.s0 = u(r.s0);
  p.s1 = u(r.s1);
  p.t_headway = u(r.t_headway);
  p.a_max = u(r.a_max);
  p.b = u(r.b);
  return p;
}

}  // namespace glk::testing
