#pragma once

#include <span>
#include <string>
#include <vector>

namespace glk {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Frenet coordinates of a point relative to a lane centerline.
/// `d` is positive to the left of the direction of travel.
struct LaneProjection {
  double s = 0.0;
  double d = 0.0;
  double theta_l = 0.0;
};

/// Piecewise-linear lane centerline parametrized by arc length.
///
/// Points before the first waypoint or past the last one are handled by
/// extending the terminal segments to infinity, so `project` may return
/// s < 0 or s > length(). Instances are immutable once constructed.
class LaneCenterline {
 public:
  /// Throws std::invalid_argument for fewer than two waypoints, non-finite
  /// coordinates, or consecutive waypoints closer than 1e-9 m.
  LaneCenterline(std::string id, std::vector<Point2> waypoints);

  const std::string& id() const { return id_; }
  const std::vector<Point2>& waypoints() const { return waypoints_; }
  const std::vector<double>& cumulative_s() const { return cumulative_s_; }
  double length() const { return cumulative_s_.back(); }
  std::size_t segment_count() const { return waypoints_.size() - 1; }

  /// Closest point on the (extended) polyline. When the closest point is a
  /// shared waypoint the following segment supplies the tangent.
  LaneProjection project(Point2 p) const;

  Point2 frenet_to_cartesian(double s, double d) const;

  /// Heading of the segment containing s; at junctions the following segment.
  double tangent_angle(double s) const;

  /// The same centerline traversed in the opposite direction.
  LaneCenterline reversed() const;

 private:
  std::size_t segment_at(double s) const;

  std::string id_;
  std::vector<Point2> waypoints_;
  std::vector<double> cumulative_s_;
  std::vector<double> headings_;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Reads a lane map table (header row; columns lane_id, x, y in meters).
/// Rows of each lane are in travel order; lanes are returned in order of
/// first appearance. Throws std::runtime_error on I/O or parse failure.
std::vector<LaneCenterline> load_lane_map(const std::string& path);

}  // namespace glk
