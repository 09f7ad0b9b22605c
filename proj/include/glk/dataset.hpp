#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glk/geometry.hpp"
#include "glk/motion_models.hpp"

namespace glk {

struct TrackSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> speed;
  std::optional<double> heading;
};

struct RawTrack {
  std::string agent_id;
  std::vector<TrackSample> samples;
  /// Vehicle length in meters, 0 when the table has no length column.
  double length = 0.0;
};

/// Column names of a trajectory table. Time comes either from `time`
/// (seconds) or, when `time` is empty, from `frame` / `frame_rate`.
/// Defaults follow the CitySim layout: 30 fps frames and vehicle centers
/// in feet.
struct ColumnMap {
  std::string agent_id = "carId";
  std::string time;
  std::string frame = "frameNum";
  double frame_rate = 30.0;
  std::string x = "carCenterXft";
  std::string y = "carCenterYft";
  std::string speed;
  std::string heading;
  std::string length;
};

struct LoadResult {
  std::vector<RawTrack> tracks;
  std::size_t skipped_rows = 0;
};

/// Parses a comma-separated table with a header row and groups rows into
/// tracks ordered by agent id (numeric ids sort numerically). `unit_scale`
/// multiplies positions, speeds and lengths (0.3048 converts feet). Rows with
/// unparsable fields are skipped and counted; agents with fewer than two
/// distinct timestamps are dropped. Throws std::runtime_error when the file
/// cannot be read, is empty, or lacks a mapped column.
LoadResult load_tracks(const std::string& path, const ColumnMap& columns, double unit_scale);

/// A track on a uniform time grid. Grid times are k * dt for consecutive
/// integers k in [first_index, first_index + size).
struct ResampledTrack {
  std::string agent_id;
  double dt = 0.1;
  long first_index = 0;
  double length = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> vx;
  std::vector<double> vy;
  std::vector<double> speed;
  std::vector<double> accel;

  std::size_t size() const { return x.size(); }
  long last_index() const { return first_index + static_cast<long>(size()) - 1; }
  double time(std::size_t i) const { return static_cast<double>(first_index + static_cast<long>(i)) * dt; }
  bool covers(long grid_index) const { return grid_index >= first_index && grid_index <= last_index(); }
  /// State at a sample using the backward position difference for velocity,
  /// so it depends on no later sample.
  KinematicState causal_state(std::size_t i) const;
};

/// Linear interpolation onto the dt grid, central-difference velocities
/// (one-sided at the ends) and accelerations from differencing the speed.
/// Throws std::invalid_argument when fewer than two grid points fall inside
/// the track.
ResampledTrack resample_and_differentiate(const RawTrack& track, double dt_grid);

/// Centered moving average with a window of `window` samples (odd window
/// recommended; window <= 1 returns the input).
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

struct Scene {
  std::vector<ResampledTrack> tracks;
  std::vector<LaneCenterline> lanes;
  double dt_grid = 0.1;

  const ResampledTrack* find(const std::string& agent_id) const;
};

Scene make_scene(const std::vector<RawTrack>& tracks, std::vector<LaneCenterline> lanes,
                 double dt_grid);

/// Seconds of causal history kept in each window before t0.
inline constexpr double kWindowHistory = 1.0;

struct EvalWindow {
  std::string agent_id;
  std::size_t track_index = 0;
  double t0 = 0.0;
  long t0_index = 0;
  /// Causal states over the last kWindowHistory seconds, ending at t0.
  std::vector<KinematicState> history;
  std::vector<Point2> future;
};

/// Sliding windows starting at multiples of `stride`, never earlier than
/// first appearance + warmup_exclude, and only where the whole horizon lies
/// inside the track. Future samples are taken every `pred_dt` (a multiple
/// of the grid step); `stride` and `horizon` must be multiples of it.
std::vector<EvalWindow> make_windows(const Scene& scene, double stride, double horizon,
                                     double warmup_exclude, double pred_dt = 0.0);

/// Number of grid steps in `value`, throwing if it is not a multiple of dt.
long grid_steps(double value, double dt, const char* what);

}  // namespace glk
