#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glk/geometry.hpp"
#include "glk/motion_models.hpp"

namespace glk {

struct AssociationThresholds {
  double d_max = 3.5;
  double theta_max = std::numbers::pi / 6.0;
  /// Temperature of the heading softmax, radians.
  double tau = 0.15;
  /// Below this speed the heading is undefined and only d_max is checked.
  double min_speed = 0.1;

  void validate() const;
};

struct LaneAssociation {
  std::size_t lane_index = 0;
  std::string lane_id;
  double lateral_dist = 0.0;
  double heading_diff = 0.0;
  LaneProjection projection;
};

/// Lanes passing both admission thresholds, nearest first (ties by heading).
std::vector<LaneAssociation> associate_lanes(const KinematicState& x,
                                             std::span<const LaneCenterline> lanes,
                                             const AssociationThresholds& thresholds);

/// p_i proportional to exp(-heading_diff_i / tau). Throws on empty input.
std::vector<double> mode_probabilities(std::span<const LaneAssociation> assocs, double tau);

struct Mode {
  PredictionTrace trace;
  double probability = 1.0;
  /// Empty for the lane-free constant-velocity fallback mode.
  std::optional<std::string> lane_id;
};

struct ModeSet {
  std::vector<Mode> modes;
};

using LanePredictor = std::function<PredictionTrace(const LaneCenterline&)>;
using FallbackPredictor = std::function<PredictionTrace()>;

/// One mode per associated lane; a single fallback mode with probability 1
/// when nothing associates.
ModeSet multimodal_predict(const KinematicState& x0, std::span<const LaneCenterline> lanes,
                           const LanePredictor& predictor, const FallbackPredictor& fallback,
                           const AssociationThresholds& thresholds);

}  // namespace glk
