#include "glk/multimodal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glk {

void AssociationThresholds::validate() const {
  if (!(d_max >= 0.0)) throw std::invalid_argument("d_max must be >= 0");
  if (!(theta_max >= 0.0)) throw std::invalid_argument("theta_max must be >= 0");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
}

std::vector<LaneAssociation> associate_lanes(const KinematicState& x,
                                             std::span<const LaneCenterline> lanes,
                                             const AssociationThresholds& thresholds) {
  std::vector<LaneAssociation> out;
  const bool moving = x.speed() >= thresholds.min_speed;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const LaneProjection proj = lanes[i].project(x.position());
    const double lateral = std::abs(proj.d);
    const double heading = moving ? std::abs(wrap_angle(x.heading() - proj.theta_l)) : 0.0;
    if (lateral <= thresholds.d_max && heading <= thresholds.theta_max) {
      out.push_back({i, lanes[i].id(), lateral, heading, proj});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const LaneAssociation& a, const LaneAssociation& b) {
    if (a.lateral_dist != b.lateral_dist) return a.lateral_dist < b.lateral_dist;
    return a.heading_diff < b.heading_diff;
  });
  return out;
}

std::vector<double> mode_probabilities(std::span<const LaneAssociation> assocs, double tau) {
  if (assocs.empty()) throw std::invalid_argument("mode_probabilities needs at least one lane");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  double lowest = assocs.front().heading_diff;
  for (const auto& a : assocs) lowest = std::min(lowest, a.heading_diff);

  std::vector<double> p;
  p.reserve(assocs.size());
  double total = 0.0;
  for (const auto& a : assocs) {
    p.push_back(std::exp(-(a.heading_diff - lowest) / tau));
    total += p.back();
  }
  for (double& v : p) v /= total;
  return p;
}

ModeSet multimodal_predict(const KinematicState& x0, std::span<const LaneCenterline> lanes,
                           const LanePredictor& predictor, const FallbackPredictor& fallback,
                           const AssociationThresholds& thresholds) {
  ModeSet set;
  const auto assocs = associate_lanes(x0, lanes, thresholds);
  if (assocs.empty()) {
    set.modes.push_back({fallback(), 1.0, std::nullopt});
    return set;
  }
  const auto probs = mode_probabilities(assocs, thresholds.tau);
  set.modes.reserve(assocs.size());
  for (std::size_t i = 0; i < assocs.size(); ++i) {
    set.modes.push_back({predictor(lanes[assocs[i].lane_index]), probs[i], assocs[i].lane_id});
  }
  return set;
}

}  // namespace glk
