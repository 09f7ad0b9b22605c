#include "glk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "csv.hpp"

namespace glk {

double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

LaneCenterline::LaneCenterline(std::string id, std::vector<Point2> waypoints)
    : id_(std::move(id)), waypoints_(std::move(waypoints)) {
  if (waypoints_.size() < 2) {
    throw std::invalid_argument("lane '" + id_ + "' needs at least two waypoints");
  }
  cumulative_s_.reserve(waypoints_.size());
  headings_.reserve(waypoints_.size() - 1);
  cumulative_s_.push_back(0.0);
  for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i) {
    const Point2& a = waypoints_[i];
    const Point2& b = waypoints_[i + 1];
    if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(b.x) ||
        !std::isfinite(b.y)) {
      throw std::invalid_argument("lane '" + id_ + "' has non-finite waypoints");
    }
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len <= 1e-9) {
      throw std::invalid_argument("lane '" + id_ + "' has a degenerate segment at waypoint " +
                                  std::to_string(i));
    }
    cumulative_s_.push_back(cumulative_s_.back() + len);
    headings_.push_back(wrap_angle(std::atan2(b.y - a.y, b.x - a.x)));
  }
}

std::size_t LaneCenterline::segment_at(double s) const {
  // upper_bound puts a junction value into the following segment.
  const auto it = std::upper_bound(cumulative_s_.begin(), cumulative_s_.end(), s);
  const auto idx = static_cast<std::ptrdiff_t>(it - cumulative_s_.begin()) - 1;
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(segment_count()) - 1));
}

LaneProjection LaneCenterline::project(Point2 p) const {
  const std::size_t n = segment_count();
  std::size_t best_seg = 0;
  double best_t = 0.0;
  double best_dist2 = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = waypoints_[i];
    const double len = cumulative_s_[i + 1] - cumulative_s_[i];
    const double ux = (waypoints_[i + 1].x - a.x) / len;
    const double uy = (waypoints_[i + 1].y - a.y) / len;
    double t = (p.x - a.x) * ux + (p.y - a.y) * uy;
    const double lo = (i == 0) ? -std::numeric_limits<double>::infinity() : 0.0;
    const double hi = (i + 1 == n) ? std::numeric_limits<double>::infinity() : len;
    t = std::clamp(t, lo, hi);
    const double fx = a.x + t * ux - p.x;
    const double fy = a.y + t * uy - p.y;
    const double dist2 = fx * fx + fy * fy;
    if (dist2 < best_dist2) {
      best_dist2 = dist2;
      best_seg = i;
      best_t = t;
    }
  }

  // A foot point on the end of an interior segment belongs to the next one.
  const double best_len = cumulative_s_[best_seg + 1] - cumulative_s_[best_seg];
  if (best_seg + 1 < n && best_t >= best_len) {
    ++best_seg;
    best_t = 0.0;
  }

  const Point2& a = waypoints_[best_seg];
  const double theta = headings_[best_seg];
  const double ux = std::cos(theta);
  const double uy = std::sin(theta);
  const double cross = ux * (p.y - a.y) - uy * (p.x - a.x);
  const double dist = std::sqrt(best_dist2);

  LaneProjection proj;
  proj.s = cumulative_s_[best_seg] + best_t;
  proj.d = cross >= 0.0 ? dist : -dist;
  proj.theta_l = theta;
  return proj;
}

Point2 LaneCenterline::frenet_to_cartesian(double s, double d) const {
  const std::size_t i = segment_at(s);
  const double theta = headings_[i];
  const double ux = std::cos(theta);
  const double uy = std::sin(theta);
  const double t = s - cumulative_s_[i];
  const Point2& a = waypoints_[i];
  return {a.x + t * ux - d * uy, a.y + t * uy + d * ux};
}

double LaneCenterline::tangent_angle(double s) const { return headings_[segment_at(s)]; }

LaneCenterline LaneCenterline::reversed() const {
  std::vector<Point2> pts(waypoints_.rbegin(), waypoints_.rend());
  return LaneCenterline(id_, std::move(pts));
}

std::vector<LaneCenterline> load_lane_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lane map '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("lane map '" + path + "' is empty");
  const auto header = detail::split(line);
  int col_id = -1, col_x = -1, col_y = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "lane_id") col_id = static_cast<int>(i);
    if (header[i] == "x") col_x = static_cast<int>(i);
    if (header[i] == "y") col_y = static_cast<int>(i);
  }
  if (col_id < 0 || col_x < 0 || col_y < 0) {
    throw std::runtime_error("lane map '" + path + "' needs columns lane_id, x, y");
  }
  const auto needed = static_cast<std::size_t>(std::max({col_id, col_x, col_y}));

  std::vector<std::string> order;
  std::map<std::string, std::vector<Point2>> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line);
    const auto x = fields.size() > needed ? detail::parse_double(fields[col_x]) : std::nullopt;
    const auto y = fields.size() > needed ? detail::parse_double(fields[col_y]) : std::nullopt;
    if (!x || !y) {
      throw std::runtime_error("lane map '" + path + "': bad row at line " +
                               std::to_string(line_no));
    }
    std::string id(fields[col_id]);
    auto [it, inserted] = points.try_emplace(id);
    if (inserted) order.push_back(id);
    it->second.push_back({*x, *y});
  }

  std::vector<LaneCenterline> lanes;
  lanes.reserve(order.size());
  for (const auto& id : order) {
    try {
      lanes.emplace_back(id, std::move(points[id]));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("lane map '" + path + "': " + e.what());
    }
  }
  if (lanes.empty()) throw std::runtime_error("lane map '" + path + "' has no lanes");
  return lanes;
}

}  // namespace glk
