#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "glk/geometry.hpp"
#include "glk/motion_models.hpp"
#include "glk/multimodal.hpp"

namespace glk {

struct IDMParams {
  double v0 = 13.9;
  double s0 = 2.0;
  double s1 = 0.0;
  double t_headway = 1.5;
  double a_max = 1.5;
  double b = 2.0;

  /// s1 may be zero (the sqrt term vanishes); all others must be > 0.
  void validate() const;
};

struct LeadInfo {
  double gap = 0.0;
  double v_lead = 0.0;
};

/// Smallest gap find_lead reports for overlapping vehicles.
inline constexpr double kMinLeadGap = 0.1;

/// IDM acceleration. Without a lead the vehicle keeps its speed (returns 0).
/// Throws std::invalid_argument for a non-positive gap or negative speed.
double idm_accel(double v, const IDMParams& params, const std::optional<LeadInfo>& lead);

double idm_velocity_step(double v, double a, double dt);

struct AgentSnapshot {
  KinematicState state;
  /// Vehicle length in meters; 0 when unknown.
  double length = 0.0;
};

/// Nearest vehicle ahead on `lane` among `others` (which must not contain
/// the agent itself). Others must pass the association thresholds.
std::optional<LeadInfo> find_lead(const AgentSnapshot& agent,
                                  std::span<const AgentSnapshot> others,
                                  const LaneCenterline& lane,
                                  const AssociationThresholds& thresholds);

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct PriorRanges {
  ParamRange v0{3.0, 25.0};
  ParamRange s0{0.5, 4.0};
  ParamRange s1{0.0, 5.0};
  ParamRange t_headway{0.5, 3.0};
  ParamRange a_max{0.5, 4.0};
  ParamRange b{0.5, 4.0};

  void validate() const;
};

struct Particle {
  IDMParams params;
  double weight = 0.0;
};

/// Weighted IDM-parameter hypotheses of a single agent. The engine drives
/// resampling so the whole filter is reproducible from its seed.
struct ParticleSet {
  std::vector<Particle> particles;
  std::optional<double> converged_at;
  std::mt19937_64 rng;

  double effective_sample_size() const;
};

ParticleSet pf_init(const PriorRanges& ranges, std::size_t n, std::uint64_t seed);

/// Multiplies each weight by the Gaussian likelihood of the observed
/// acceleration, renormalizes, and resamples systematically when the
/// effective sample size drops below n/2. If every likelihood underflows the
/// weights are reset to uniform.
ParticleSet pf_update(ParticleSet ps, double v, const std::optional<LeadInfo>& lead,
                      double observed_accel, double sigma_a);

/// Parameters of the heaviest particle; ties go to the lowest index.
IDMParams pf_best(const ParticleSet& ps);

/// Speed-replaced fusion rollout. Before each step the speed of the prior
/// mean is advanced by IDM (with the best particle's parameters) when a lead
/// exists on `lane`. Lead candidates are the others ahead on `lane` at the
/// start; they move at constant velocity during the rollout.
PredictionTrace idm_fused_predict(const AgentSnapshot& agent, const LaneCenterline& lane,
                                  std::span<const AgentSnapshot> others,
                                  const FusionGains& gains, const NoiseConfig& noise,
                                  const PredictionConfig& cfg, const IDMParams& params,
                                  const AssociationThresholds& thresholds);

PredictionTrace glk_idm_predict(const AgentSnapshot& agent, const LaneCenterline& lane,
                                std::span<const AgentSnapshot> others, const NoiseConfig& noise,
                                const PredictionConfig& cfg, const ParticleSet& ps,
                                const AssociationThresholds& thresholds);

PredictionTrace ls_idm_predict(const AgentSnapshot& agent, const LaneCenterline& lane,
                               std::span<const AgentSnapshot> others, const NoiseConfig& noise,
                               const PredictionConfig& cfg, const ParticleSet& ps,
                               const AssociationThresholds& thresholds);

}  // namespace glk
