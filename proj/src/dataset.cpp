#include "glk/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "csv.hpp"

namespace glk {

namespace {

struct AgentKey {
  std::string id;

  bool operator<(const AgentKey& other) const {
    const auto a = detail::parse_double(id);
    const auto b = detail::parse_double(other.id);
    if (a && b) return *a != *b ? *a < *b : id < other.id;
    if (a != b) return static_cast<bool>(a);  // numeric ids first
    return id < other.id;
  }
};

int column_index(const std::vector<std::string_view>& header, const std::string& name,
                 const std::string& path) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw std::runtime_error("'" + path + "' has no column '" + name + "'");
}

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

}  // namespace

long grid_steps(double value, double dt, const char* what) {
  const double ratio = value / dt;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-6) {
    throw std::invalid_argument(std::string(what) + " must be a multiple of the time step");
  }
  return steps;
}

LoadResult load_tracks(const std::string& path, const ColumnMap& columns, double unit_scale) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || detail::trim(line).empty()) {
    throw std::runtime_error("trajectory file '" + path + "' is empty");
  }
  const std::string header_line = line;
  const auto header = detail::split(header_line);

  const bool use_time = !columns.time.empty();
  const int c_id = column_index(header, columns.agent_id, path);
  const int c_t = column_index(header, use_time ? columns.time : columns.frame, path);
  const int c_x = column_index(header, columns.x, path);
  const int c_y = column_index(header, columns.y, path);
  const int c_speed = columns.speed.empty() ? -1 : column_index(header, columns.speed, path);
  const int c_heading = columns.heading.empty() ? -1 : column_index(header, columns.heading, path);
  const int c_length = columns.length.empty() ? -1 : column_index(header, columns.length, path);
  const int widest = std::max({c_id, c_t, c_x, c_y, c_speed, c_heading, c_length});
  if (!use_time && !(columns.frame_rate > 0.0)) {
    throw std::runtime_error("frame_rate must be > 0");
  }

  LoadResult result;
  std::map<AgentKey, RawTrack> grouped;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line);
    if (static_cast<int>(f.size()) <= widest || f[c_id].empty()) {
      ++result.skipped_rows;
      continue;
    }
    const auto t = detail::parse_double(f[c_t]);
    const auto x = detail::parse_double(f[c_x]);
    const auto y = detail::parse_double(f[c_y]);
    if (!t || !x || !y || !std::isfinite(*t) || !std::isfinite(*x) || !std::isfinite(*y)) {
      ++result.skipped_rows;
      continue;
    }
    TrackSample s;
    s.t = use_time ? *t : *t / columns.frame_rate;
    s.x = *x * unit_scale;
    s.y = *y * unit_scale;
    if (c_speed >= 0) {
      if (auto v = detail::parse_double(f[c_speed])) s.speed = *v * unit_scale;
    }
    if (c_heading >= 0) s.heading = detail::parse_double(f[c_heading]);

    RawTrack& track = grouped[AgentKey{std::string(f[c_id])}];
    if (track.agent_id.empty()) track.agent_id = std::string(f[c_id]);
    if (c_length >= 0) {
      if (auto len = detail::parse_double(f[c_length])) track.length = *len * unit_scale;
    }
    track.samples.push_back(s);
  }
  if (grouped.empty() && result.skipped_rows == 0) {
    throw std::runtime_error("trajectory file '" + path + "' has no data rows");
  }

  for (auto& [key, track] : grouped) {
    std::stable_sort(track.samples.begin(), track.samples.end(),
                     [](const TrackSample& a, const TrackSample& b) { return a.t < b.t; });
    std::vector<TrackSample> unique;
    unique.reserve(track.samples.size());
    for (const auto& s : track.samples) {
      if (!unique.empty() && s.t <= unique.back().t) {
        ++result.skipped_rows;
        continue;
      }
      unique.push_back(s);
    }
    track.samples = std::move(unique);
    if (track.samples.size() >= 2) result.tracks.push_back(std::move(track));
  }
  return result;
}

KinematicState ResampledTrack::causal_state(std::size_t i) const {
  KinematicState s{x[i], y[i], 0.0, 0.0};
  if (size() < 2) return s;
  const std::size_t a = i == 0 ? 0 : i - 1;
  const std::size_t b = i == 0 ? 1 : i;
  s.vx = (x[b] - x[a]) / dt;
  s.vy = (y[b] - y[a]) / dt;
  return s;
}

ResampledTrack resample_and_differentiate(const RawTrack& track, double dt_grid) {
  if (!(dt_grid > 0.0)) throw std::invalid_argument("dt_grid must be > 0");
  const auto& samples = track.samples;
  if (samples.size() < 2) throw std::invalid_argument("track '" + track.agent_id + "' too short");

  const long first = static_cast<long>(std::ceil(samples.front().t / dt_grid - 1e-9));
  const long last = static_cast<long>(std::floor(samples.back().t / dt_grid + 1e-9));
  if (last - first + 1 < 2) {
    throw std::invalid_argument("track '" + track.agent_id + "' spans fewer than two grid points");
  }

  ResampledTrack out;
  out.agent_id = track.agent_id;
  out.dt = dt_grid;
  out.first_index = first;
  out.length = track.length;
  const auto n = static_cast<std::size_t>(last - first + 1);
  out.x.resize(n);
  out.y.resize(n);

  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(first + static_cast<long>(i)) * dt_grid;
    while (seg + 2 < samples.size() && samples[seg + 1].t < t) ++seg;
    const TrackSample& a = samples[seg];
    const TrackSample& b = samples[seg + 1];
    const double w = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
    out.x[i] = a.x + w * (b.x - a.x);
    out.y[i] = a.y + w * (b.y - a.y);
  }

  auto differentiate = [&](const std::vector<double>& v) {
    std::vector<double> d(n);
    d[0] = (v[1] - v[0]) / dt_grid;
    d[n - 1] = (v[n - 1] - v[n - 2]) / dt_grid;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * dt_grid);
    return d;
  };
  out.vx = differentiate(out.x);
  out.vy = differentiate(out.y);
  out.speed.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.speed[i] = std::hypot(out.vx[i], out.vy[i]);
  out.accel = differentiate(out.speed);
  return out;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
  if (window <= 1 || values.empty()) return values;
  const auto half = static_cast<long>(window / 2);
  const auto n = static_cast<long>(values.size());
  std::vector<double> out(values.size());
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - half);
    const long hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (long j = lo; j <= hi; ++j) sum += values[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

const ResampledTrack* Scene::find(const std::string& agent_id) const {
  for (const auto& t : tracks) {
    if (t.agent_id == agent_id) return &t;
  }
  return nullptr;
}

Scene make_scene(const std::vector<RawTrack>& tracks, std::vector<LaneCenterline> lanes,
                 double dt_grid) {
  Scene scene;
  scene.dt_grid = dt_grid;
  scene.lanes = std::move(lanes);
  scene.tracks.reserve(tracks.size());
  for (const auto& t : tracks) {
    const long first = static_cast<long>(std::ceil(t.samples.front().t / dt_grid - 1e-9));
    const long last = static_cast<long>(std::floor(t.samples.back().t / dt_grid + 1e-9));
    if (t.samples.size() < 2 || last - first + 1 < 2) continue;
    scene.tracks.push_back(resample_and_differentiate(t, dt_grid));
  }
  return scene;
}

std::vector<EvalWindow> make_windows(const Scene& scene, double stride, double horizon,
                                     double warmup_exclude, double pred_dt) {
  const double dt = scene.dt_grid;
  if (pred_dt <= 0.0) pred_dt = dt;
  const long pred_steps = grid_steps(pred_dt, dt, "prediction dt");
  const long stride_steps = grid_steps(stride, dt, "stride");
  const long horizon_steps = grid_steps(horizon, dt, "horizon");
  const long warmup_steps = grid_steps(warmup_exclude, dt, "warmup_exclude");
  if (stride_steps <= 0 || horizon_steps <= 0 || pred_steps <= 0) {
    throw std::invalid_argument("stride, horizon and dt must be > 0");
  }
  if (horizon_steps % pred_steps != 0) {
    throw std::invalid_argument("horizon must be a multiple of the prediction dt");
  }

  const auto history_steps = static_cast<std::size_t>(std::lround(kWindowHistory / dt));

  std::vector<EvalWindow> windows;
  for (std::size_t ti = 0; ti < scene.tracks.size(); ++ti) {
    const ResampledTrack& track = scene.tracks[ti];
    const long earliest = track.first_index + std::max(0L, warmup_steps);
    const long latest = track.last_index() - horizon_steps;
    for (long k = ceil_div(earliest, stride_steps); k * stride_steps <= latest; ++k) {
      const long j = k * stride_steps;
      const auto i0 = static_cast<std::size_t>(j - track.first_index);
      EvalWindow w;
      w.agent_id = track.agent_id;
      w.track_index = ti;
      w.t0_index = j;
      w.t0 = static_cast<double>(j) * dt;
      const std::size_t h0 = i0 > history_steps ? i0 - history_steps : 0;
      w.history.reserve(i0 - h0 + 1);
      for (std::size_t i = h0; i <= i0; ++i) w.history.push_back(track.causal_state(i));
      for (long m = pred_steps; m <= horizon_steps; m += pred_steps) {
        const auto i = i0 + static_cast<std::size_t>(m);
        w.future.push_back({track.x[i], track.y[i]});
      }
      windows.push_back(std::move(w));
    }
  }
  return windows;
}

}  // namespace glk
