#include "glk/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "csv.hpp"

namespace glk {

namespace {

// Others farther than this from the agent at t0 are ignored as leads.
constexpr double kLeadSearchRadius = 200.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t agent_seed(std::uint64_t seed, const std::string& agent_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : agent_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ h);
}

Model cv_counterpart(Model m) {
  if (m == Model::ls_idm) return Model::ls_cv;
  if (m == Model::glk_idm) return Model::glk_cv;
  return m;
}

class AgentEvaluator {
 public:
  AgentEvaluator(const RunConfig& cfg, const Scene& scene, std::size_t track_index)
      : cfg_(cfg),
        scene_(scene),
        track_(scene.tracks[track_index]),
        track_index_(track_index),
        pred_steps_(grid_steps(cfg.prediction.dt, scene.dt_grid, "run.dt")),
        warmup_steps_(std::lround(cfg.pf.warmup / scene.dt_grid)),
        chord_steps_(grid_steps(cfg.curvature.heading_window, scene.dt_grid, "curvature.heading_window")),
        observed_accel_(moving_average(track_.accel, cfg.pf.smoothing_window)) {}

  ModeSet predict(Model model, long t0_index) {
    const auto i0 = static_cast<std::size_t>(t0_index - track_.first_index);
    const bool warming_up = static_cast<long>(i0) < warmup_steps_;
    if (uses_idm(model) && warming_up && cfg_.pf.substitute_during_warmup) {
      model = cv_counterpart(model);
    }

    const KinematicState x0 = track_.causal_state(i0);
    const PredictionConfig& pc = cfg_.prediction;
    const NoiseConfig& noise = cfg_.noise;

    if (model == Model::cv) return single(cv_predict(x0, pc, noise));
    if (model == Model::curv_cv) return single(curvature_predict(x0, i0));

    std::vector<AgentSnapshot> others;
    if (uses_idm(model)) {
      advance_filter(t0_index);
      others = others_at(t0_index, x0.position(), true);
    }
    const AgentSnapshot agent{x0, track_.length};
    LanePredictor lane_pred = [&](const LaneCenterline& lane) -> PredictionTrace {
      switch (model) {
        case Model::ls_cv: return ls_predict(x0, lane, noise, pc);
        case Model::glk_cv: return glk_predict(x0, lane, noise, pc);
        case Model::ls_idm:
          return ls_idm_predict(agent, lane, others, noise, pc, *filter_, cfg_.thresholds);
        default:
          return glk_idm_predict(agent, lane, others, noise, pc, *filter_, cfg_.thresholds);
      }
    };
    FallbackPredictor fallback = [&] { return curvature_predict(x0, i0); };

    if (cfg_.multimodal) {
      return multimodal_predict(x0, scene_.lanes, lane_pred, fallback, cfg_.thresholds);
    }
    const auto assocs = associate_lanes(x0, scene_.lanes, cfg_.thresholds);
    if (assocs.empty()) return single(fallback());
    ModeSet set;
    set.modes.push_back({lane_pred(scene_.lanes[assocs.front().lane_index]), 1.0,
                         assocs.front().lane_id});
    return set;
  }

 private:
  static ModeSet single(PredictionTrace trace) {
    ModeSet set;
    set.modes.push_back({std::move(trace), 1.0, std::nullopt});
    return set;
  }

  // The turn rate comes from the angle between the two most recent chords
  // of heading_window seconds each, which is exact for a constant turn rate
  // and far less noise-sensitive than differencing per-sample headings.
  PredictionTrace curvature_predict(const KinematicState& x0, std::size_t i0) const {
    const PredictionConfig& pc = cfg_.prediction;
    const auto m = static_cast<std::size_t>(chord_steps_);
    if (i0 >= 2 * m) {
      const double ax = track_.x[i0 - m] - track_.x[i0 - 2 * m];
      const double ay = track_.y[i0 - m] - track_.y[i0 - 2 * m];
      const double bx = track_.x[i0] - track_.x[i0 - m];
      const double by = track_.y[i0] - track_.y[i0 - m];
      const double min_chord = pc.min_speed * cfg_.curvature.heading_window;
      if (std::hypot(ax, ay) >= min_chord && std::hypot(bx, by) >= min_chord) {
        const double turn = wrap_angle(std::atan2(by, bx) - std::atan2(ay, ax));
        const double per_step = turn * static_cast<double>(pred_steps_) / static_cast<double>(m);
        if (std::abs(per_step) > cfg_.curvature.turn_trigger_eps) {
          return curvature_cv_predict(x0, per_step, cfg_.curvature, pc, cfg_.noise);
        }
      }
    }
    return cv_predict(x0, pc, cfg_.noise);
  }

  std::vector<AgentSnapshot> others_at(long grid_index, Point2 near, bool causal) const {
    std::vector<AgentSnapshot> out;
    for (std::size_t k = 0; k < scene_.tracks.size(); ++k) {
      if (k == track_index_) continue;
      const ResampledTrack& o = scene_.tracks[k];
      if (!o.covers(grid_index)) continue;
      const auto i = static_cast<std::size_t>(grid_index - o.first_index);
      if (std::hypot(o.x[i] - near.x, o.y[i] - near.y) > kLeadSearchRadius) continue;
      KinematicState s = causal ? o.causal_state(i) : KinematicState{o.x[i], o.y[i], o.vx[i], o.vy[i]};
      out.push_back({s, o.length});
    }
    return out;
  }

  // Feeds the filter every observation that is fully determined by samples
  // at or before t0. The central-difference acceleration at sample i reads
  // positions up to i + 2, plus half the smoothing window.
  void advance_filter(long t0_index) {
    if (!filter_) {
      filter_ = pf_init(cfg_.pf.priors, cfg_.pf.n, agent_seed(cfg_.seed, track_.agent_id));
    }
    const long lookahead = 2 + static_cast<long>(cfg_.pf.smoothing_window / 2);
    const long last_usable = t0_index - track_.first_index - lookahead;
    for (; next_update_ <= last_usable; ++next_update_) {
      const auto i = static_cast<std::size_t>(next_update_);
      const long j = track_.first_index + next_update_;
      if (!filter_->converged_at && next_update_ >= warmup_steps_) {
        filter_->converged_at = track_.time(i);
      }
      const KinematicState self{track_.x[i], track_.y[i], track_.vx[i], track_.vy[i]};
      const auto assocs = associate_lanes(self, scene_.lanes, cfg_.thresholds);
      if (assocs.empty()) continue;
      const auto others = others_at(j, self.position(), false);
      const auto lead = find_lead({self, track_.length}, others,
                                  scene_.lanes[assocs.front().lane_index], cfg_.thresholds);
      // Without a lead every particle predicts zero and the weights would not move.
      if (!lead) continue;
      filter_ = pf_update(std::move(*filter_), track_.speed[i], lead, observed_accel_[i],
                          cfg_.pf.sigma_a);
    }
  }

  const RunConfig& cfg_;
  const Scene& scene_;
  const ResampledTrack& track_;
  std::size_t track_index_;
  long pred_steps_;
  long warmup_steps_;
  long chord_steps_;
  std::vector<double> observed_accel_;
  std::optional<ParticleSet> filter_;
  long next_update_ = 0;
};

std::vector<ErrorRecord> evaluate_agent(const RunConfig& cfg, const Scene& scene,
                                        std::size_t track_index,
                                        const std::vector<const EvalWindow*>& windows) {
  std::vector<ErrorRecord> records;
  AgentEvaluator evaluator(cfg, scene, track_index);
  for (const EvalWindow* w : windows) {
    for (Model m : cfg.models) {
      const ModeSet modes = evaluator.predict(m, w->t0_index);
      const ModeChoice choice = min_over_modes(modes, w->future);
      records.push_back({w->agent_id, w->t0, std::string(model_name(m)), choice.error.ade,
                         choice.error.fde, choice.mode});
    }
  }
  return records;
}

}  // namespace

LoadedScene load_scene(const RunConfig& cfg) {
  if (cfg.tracks_path.empty()) throw std::runtime_error("no trajectory file configured");
  if (cfg.lanes_path.empty()) throw std::runtime_error("no lane map configured");
  auto lanes = load_lane_map(cfg.lanes_path);
  LoadResult loaded = load_tracks(cfg.tracks_path, cfg.columns, cfg.unit_scale);
  LoadedScene out;
  out.skipped_rows = loaded.skipped_rows;
  out.scene = make_scene(loaded.tracks, std::move(lanes), cfg.dt_grid);
  return out;
}

EvaluationResult evaluate(const RunConfig& cfg, const Scene& scene) {
  cfg.validate();
  const auto windows = make_windows(scene, cfg.stride, cfg.prediction.horizon,
                                    cfg.warmup_exclude, cfg.prediction.dt);

  std::vector<std::vector<const EvalWindow*>> per_track(scene.tracks.size());
  for (const auto& w : windows) per_track[w.track_index].push_back(&w);

  std::vector<std::vector<ErrorRecord>> results(scene.tracks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (!failed) {
      const std::size_t k = next.fetch_add(1);
      if (k >= per_track.size()) return;
      if (per_track[k].empty()) continue;
      try {
        results[k] = evaluate_agent(cfg, scene, k, per_track[k]);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };

  unsigned n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(std::max<std::size_t>(1, per_track.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  EvaluationResult result;
  result.window_count = windows.size();
  for (auto& r : results) {
    result.records.insert(result.records.end(), std::make_move_iterator(r.begin()),
                          std::make_move_iterator(r.end()));
  }
  result.summary = summarize(result.records);
  return result;
}

ModeSet predict_agent(const RunConfig& cfg, const Scene& scene, const std::string& agent_id,
                      double t0, Model model) {
  cfg.validate();
  std::size_t index = scene.tracks.size();
  for (std::size_t k = 0; k < scene.tracks.size(); ++k) {
    if (scene.tracks[k].agent_id == agent_id) index = k;
  }
  if (index == scene.tracks.size()) throw std::out_of_range("unknown agent '" + agent_id + "'");
  const long t0_index = std::lround(t0 / scene.dt_grid);
  if (std::abs(t0 / scene.dt_grid - static_cast<double>(t0_index)) > 1e-6 ||
      !scene.tracks[index].covers(t0_index)) {
    throw std::out_of_range("t0 " + detail::format_double(t0) + " is outside the track of '" +
                            agent_id + "' or off the time grid");
  }
  AgentEvaluator evaluator(cfg, scene, index);
  return evaluator.predict(model, t0_index);
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  LoadedScene loaded;
  try {
    loaded = load_scene(cfg);
  } catch (const std::exception& e) {
    log << "input error: " << e.what() << '\n';
    return kExitIo;
  }
  if (loaded.skipped_rows > 0) log << "skipped " << loaded.skipped_rows << " malformed rows\n";

  EvaluationResult result;
  try {
    result = evaluate(cfg, loaded.scene);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (result.window_count == 0) {
    log << "no evaluation windows: " << loaded.scene.tracks.size()
        << " tracks, none long enough for horizon " << cfg.prediction.horizon
        << " s after a warm-up exclusion of " << cfg.warmup_exclude << " s\n";
    return kExitNoWindows;
  }

  try {
    const std::filesystem::path out(cfg.out_dir);
    std::filesystem::create_directories(out);
    write_records_csv((out / "records.csv").string(), result.records);
    write_summary_json((out / "summary.json").string(), result.summary);
    std::ofstream manifest(out / "manifest.ini", std::ios::binary);
    manifest << render_config(cfg);
    if (!manifest) throw std::runtime_error("cannot write manifest");
  } catch (const std::exception& e) {
    log << "output error: " << e.what() << '\n';
    return kExitIo;
  }

  log << "noise: sigma_cv_sq=" << detail::format_double(cfg.noise.sigma_cv_sq[0])
      << " sigma_ls_sq=" << detail::format_double(cfg.noise.sigma_ls_sq[0]) << " seed=" << cfg.seed
      << '\n';
  log << "windows: " << result.window_count << '\n';
  for (const auto& row : result.summary) {
    log << row.model << ": ADE " << detail::format_fixed(row.mean_ade, 3) << " FDE "
        << detail::format_fixed(row.mean_fde, 3) << " (n=" << row.count << ")\n";
  }
  return kExitOk;
}

void write_modes_csv(const std::string& path, const ModeSet& modes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "mode,probability,lane_id,t,px,py,vx,vy,var_px,var_py,var_vx,var_vy\n";
  for (std::size_t m = 0; m < modes.modes.size(); ++m) {
    const Mode& mode = modes.modes[m];
    for (const auto& tp : mode.trace) {
      out << m << ',' << detail::format_fixed(mode.probability, 6) << ','
          << mode.lane_id.value_or("") << ',' << detail::format_fixed(tp.t, 3);
      for (int i = 0; i < 4; ++i) out << ',' << detail::format_fixed(tp.belief.mean[i], 6);
      for (int i = 0; i < 4; ++i) out << ',' << detail::format_fixed(tp.belief.cov(i, i), 6);
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

int cmd_predict(const RunConfig& cfg, const std::string& agent_id, double t0, Model model,
                const std::string& out_path, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  LoadedScene loaded;
  try {
    loaded = load_scene(cfg);
  } catch (const std::exception& e) {
    log << "input error: " << e.what() << '\n';
    return kExitIo;
  }
  ModeSet modes;
  try {
    modes = predict_agent(cfg, loaded.scene, agent_id, t0, model);
  } catch (const std::out_of_range& e) {
    log << "predict: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    write_modes_csv(out_path, modes);
  } catch (const std::exception& e) {
    log << "output error: " << e.what() << '\n';
    return kExitIo;
  }
  log << "wrote " << modes.modes.size() << " mode(s) to " << out_path << '\n';
  return kExitOk;
}

int cmd_sorted_errors(const std::string& records_path, const std::string& reference_model,
                      const std::string& out_path, std::ostream& log) {
  std::vector<ErrorRecord> records;
  try {
    records = read_records_csv(records_path);
  } catch (const std::exception& e) {
    log << "input error: " << e.what() << '\n';
    return kExitIo;
  }
  SortedErrorTable table;
  try {
    table = sorted_errors(records, reference_model);
  } catch (const std::invalid_argument& e) {
    log << "sorted-errors: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    write_sorted_errors_csv(out_path, table);
  } catch (const std::exception& e) {
    log << "output error: " << e.what() << '\n';
    return kExitIo;
  }
  log << "wrote " << table.rows.size() << " rows sorted by " << reference_model << " to "
      << out_path << '\n';
  return kExitOk;
}

}  // namespace glk
