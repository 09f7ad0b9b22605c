#include "glk/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace glk {

namespace {

double uniform01(std::mt19937_64& rng) {
  // 53 random mantissa bits; identical on every standard library.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw(std::mt19937_64& rng, const ParamRange& r) {
  return r.lo + (r.hi - r.lo) * uniform01(rng);
}

void check_range(const ParamRange& r, const char* name, bool allow_zero) {
  const bool lo_ok = allow_zero ? r.lo >= 0.0 : r.lo > 0.0;
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !lo_ok || r.hi < r.lo) {
    throw std::invalid_argument(std::string("invalid prior range for ") + name);
  }
}

}  // namespace

void IDMParams::validate() const {
  if (!(v0 > 0.0 && s0 > 0.0 && s1 >= 0.0 && t_headway > 0.0 && a_max > 0.0 && b > 0.0)) {
    throw std::invalid_argument("IDM parameters must be positive");
  }
}

void PriorRanges::validate() const {
  check_range(v0, "v0", false);
  check_range(s0, "s0", false);
  check_range(s1, "s1", true);
  check_range(t_headway, "t_headway", false);
  check_range(a_max, "a_max", false);
  check_range(b, "b", false);
}

double idm_accel(double v, const IDMParams& params, const std::optional<LeadInfo>& lead) {
  if (v < 0.0) throw std::invalid_argument("idm_accel: negative speed");
  if (!lead) return 0.0;
  if (!(lead->gap > 0.0)) throw std::invalid_argument("idm_accel: lead gap must be > 0");

  const double ratio = v / params.v0;
  double desired_gap = params.s0 + params.s1 * std::sqrt(ratio) + v * params.t_headway +
                       v * (v - lead->v_lead) / (2.0 * std::sqrt(params.a_max * params.b));
  desired_gap = std::max(0.0, desired_gap);
  const double gap_term = desired_gap / lead->gap;
  return params.a_max * (1.0 - ratio * ratio * ratio * ratio - gap_term * gap_term);
}

double idm_velocity_step(double v, double a, double dt) { return std::max(0.0, v + a * dt); }

std::optional<LeadInfo> find_lead(const AgentSnapshot& agent,
                                  std::span<const AgentSnapshot> others,
                                  const LaneCenterline& lane,
                                  const AssociationThresholds& thresholds) {
  const double own_s = lane.project(agent.state.position()).s;
  std::optional<LeadInfo> best;
  double best_ds = std::numeric_limits<double>::infinity();
  double best_len = 0.0;
  for (const auto& other : others) {
    const LaneProjection proj = lane.project(other.state.position());
    if (std::abs(proj.d) > thresholds.d_max) continue;
    if (other.state.speed() >= thresholds.min_speed &&
        std::abs(wrap_angle(other.state.heading() - proj.theta_l)) > thresholds.theta_max) {
      continue;
    }
    const double ds = proj.s - own_s;
    if (ds > 0.0 && ds < best_ds) {
      best_ds = ds;
      best_len = other.length;
      best = LeadInfo{ds, other.state.speed()};
    }
  }
  if (best) {
    const double gap = best_ds - 0.5 * (agent.length + best_len);
    best->gap = std::max(kMinLeadGap, gap);
  }
  return best;
}

double ParticleSet::effective_sample_size() const {
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& p : particles) {
    sum += p.weight;
    sum_sq += p.weight * p.weight;
  }
  if (!(sum_sq > 0.0)) return 0.0;
  // Clamped to [1, n], which rounding could otherwise overshoot.
  return std::clamp(sum * sum / sum_sq, 1.0, static_cast<double>(particles.size()));
}

ParticleSet pf_init(const PriorRanges& ranges, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("particle count must be > 0");
  ranges.validate();
  ParticleSet ps;
  ps.rng.seed(seed);
  ps.particles.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    IDMParams p;
    p.v0 = draw(ps.rng, ranges.v0);
    p.s0 = draw(ps.rng, ranges.s0);
    p.s1 = draw(ps.rng, ranges.s1);
    p.t_headway = draw(ps.rng, ranges.t_headway);
    p.a_max = draw(ps.rng, ranges.a_max);
    p.b = draw(ps.rng, ranges.b);
    ps.particles.push_back({p, w});
  }
  return ps;
}

ParticleSet pf_update(ParticleSet ps, double v, const std::optional<LeadInfo>& lead,
                      double observed_accel, double sigma_a) {
  if (!(sigma_a > 0.0)) throw std::invalid_argument("sigma_a must be > 0");
  const std::size_t n = ps.particles.size();
  if (n == 0) throw std::invalid_argument("empty particle set");

  const double inv_two_var = 1.0 / (2.0 * sigma_a * sigma_a);
  double total = 0.0;
  for (auto& p : ps.particles) {
    const double r = observed_accel - idm_accel(v, p.params, lead);
    p.weight *= std::exp(-r * r * inv_two_var);
    total += p.weight;
  }

  const double uniform = 1.0 / static_cast<double>(n);
  if (!(total > 0.0) || !std::isfinite(total)) {
    for (auto& p : ps.particles) p.weight = uniform;
    return ps;
  }
  for (auto& p : ps.particles) p.weight /= total;

  if (ps.effective_sample_size() < 0.5 * static_cast<double>(n)) {
    std::vector<Particle> resampled;
    resampled.reserve(n);
    const double u0 = uniform01(ps.rng) * uniform;
    double cumulative = ps.particles[0].weight;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = u0 + static_cast<double>(i) * uniform;
      while (u > cumulative && j + 1 < n) cumulative += ps.particles[++j].weight;
      resampled.push_back({ps.particles[j].params, uniform});
    }
    ps.particles = std::move(resampled);
  }
  return ps;
}

IDMParams pf_best(const ParticleSet& ps) {
  if (ps.particles.empty()) throw std::invalid_argument("empty particle set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < ps.particles.size(); ++i) {
    if (ps.particles[i].weight > ps.particles[best].weight) best = i;
  }
  return ps.particles[best].params;
}

PredictionTrace idm_fused_predict(const AgentSnapshot& agent, const LaneCenterline& lane,
                                  std::span<const AgentSnapshot> others,
                                  const FusionGains& gains, const NoiseConfig& noise,
                                  const PredictionConfig& cfg, const IDMParams& params,
                                  const AssociationThresholds& thresholds) {
  const std::size_t n = cfg.steps();
  PredictionTrace trace;
  trace.reserve(n);

  // Lead candidates are the vehicles on the lane at t0. Re-checking lane
  // membership during the rollout would let small lateral velocities of
  // neighbours drift them into the lane as phantom leads.
  std::vector<AgentSnapshot> candidates;
  for (const auto& other : others) {
    const AgentSnapshot one[] = {other};
    if (find_lead(agent, one, lane, thresholds)) candidates.push_back(other);
  }
  AssociationThresholds rollout = thresholds;
  rollout.d_max = std::numeric_limits<double>::infinity();
  rollout.theta_max = std::numeric_limits<double>::infinity();

  std::vector<AgentSnapshot> moved = candidates;
  GaussianBelief b{agent.state.to_vector(), Matrix4::Zero()};
  bool cv_only = false;
  for (std::size_t k = 1; k <= n; ++k) {
    const double elapsed = static_cast<double>(k - 1) * cfg.dt;
    for (std::size_t i = 0; i < moved.size(); ++i) {
      const KinematicState& s0 = candidates[i].state;
      moved[i].state.px = s0.px + s0.vx * elapsed;
      moved[i].state.py = s0.py + s0.vy * elapsed;
    }

    const KinematicState x = b.state();
    const auto lead = find_lead({x, agent.length}, moved, lane, rollout);
    if (lead) {
      const double speed = x.speed();
      const double next_speed = idm_velocity_step(speed, idm_accel(speed, params, lead), cfg.dt);
      double heading = x.heading();
      if (speed < cfg.min_speed) heading = lane.tangent_angle(lane.project(x.position()).s);
      b.mean[2] = next_speed * std::cos(heading);
      b.mean[3] = next_speed * std::sin(heading);
    }

    const bool moving = b.state().speed() >= cfg.min_speed;
    if (!cv_only && moving && !lane_keeping_valid(b, lane, cfg)) cv_only = true;
    b = cv_only ? cv_step(b, noise, cfg.dt) : fused_step(b, lane, gains, cfg);
    trace.push_back({static_cast<double>(k) * cfg.dt, b});
  }
  return trace;
}

PredictionTrace glk_idm_predict(const AgentSnapshot& agent, const LaneCenterline& lane,
                                std::span<const AgentSnapshot> others, const NoiseConfig& noise,
                                const PredictionConfig& cfg, const ParticleSet& ps,
                                const AssociationThresholds& thresholds) {
  return idm_fused_predict(agent, lane, others, FusionGains::from_noise(noise), noise, cfg,
                           pf_best(ps), thresholds);
}

PredictionTrace ls_idm_predict(const AgentSnapshot& agent, const LaneCenterline& lane,
                               std::span<const AgentSnapshot> others, const NoiseConfig& noise,
                               const PredictionConfig& cfg, const ParticleSet& ps,
                               const AssociationThresholds& thresholds) {
  return idm_fused_predict(agent, lane, others, FusionGains::lane_snapping_only(noise), noise,
                           cfg, pf_best(ps), thresholds);
}

}  // namespace glk
