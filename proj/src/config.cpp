#include "glk/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

#include "csv.hpp"

namespace glk {

namespace {

constexpr Model kAllModels[] = {Model::cv,     Model::curv_cv, Model::ls_cv,
                                Model::glk_cv, Model::ls_idm,  Model::glk_idm};

double to_double(const std::string& key, const std::string& value) {
  const auto v = detail::parse_double(value);
  if (!v || !std::isfinite(*v)) throw ConfigError(key + ": expected a number, got '" + value + "'");
  return *v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  const auto t = detail::trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  const auto t = detail::trim(value);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

Vector4 to_variances(const std::string& key, const std::string& value) {
  const auto parts = detail::split(value);
  if (parts.size() == 1) return Vector4::Constant(to_double(key, value));
  if (parts.size() != 4) throw ConfigError(key + ": expected one or four variances");
  Vector4 v;
  for (int i = 0; i < 4; ++i) v[i] = to_double(key, std::string(parts[i]));
  return v;
}

std::string render_variances(const Vector4& v) {
  if (v.isConstant(v[0])) return detail::format_double(v[0]);
  std::string out;
  for (int i = 0; i < 4; ++i) {
    if (i) out += ',';
    out += detail::format_double(v[i]);
  }
  return out;
}

std::string render_models(const std::vector<Model>& models) {
  std::string out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (i) out += ',';
    out += model_name(models[i]);
  }
  return out;
}

struct Entry {
  std::string section;
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <typename Access>
Entry real(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const RunConfig& c) { return detail::format_double(access(c)); },
          [access](RunConfig& c, const std::string& k, const std::string& v) {
            access(c) = to_double(k, v);
          }};
}

template <typename Access>
Entry text(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const RunConfig& c) { return access(c); },
          [access](RunConfig& c, const std::string&, const std::string& v) {
            access(c) = std::string(detail::trim(v));
          }};
}

template <typename Access>
Entry range(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const RunConfig& c) {
            const ParamRange& r = access(c);
            return detail::format_double(r.lo) + "," + detail::format_double(r.hi);
          },
          [access](RunConfig& c, const std::string& k, const std::string& v) {
            const auto parts = detail::split(v);
            if (parts.size() != 2) throw ConfigError(k + ": expected 'min,max'");
            access(c) = ParamRange{to_double(k, std::string(parts[0])),
                                   to_double(k, std::string(parts[1]))};
          }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back(text("paths", "tracks", [](auto& c) -> auto& { return c.tracks_path; }));
    t.push_back(text("paths", "lanes", [](auto& c) -> auto& { return c.lanes_path; }));
    t.push_back(text("paths", "out", [](auto& c) -> auto& { return c.out_dir; }));

    t.push_back({"run", "models", [](const RunConfig& c) { return render_models(c.models); },
                 [](RunConfig& c, const std::string&, const std::string& v) {
                   c.models = parse_model_list(v);
                 }});
    t.push_back(real("run", "dt", [](auto& c) -> auto& { return c.prediction.dt; }));
    t.push_back(real("run", "horizon", [](auto& c) -> auto& { return c.prediction.horizon; }));
    t.push_back(real("run", "stride", [](auto& c) -> auto& { return c.stride; }));
    t.push_back(real("run", "warmup_exclude", [](auto& c) -> auto& { return c.warmup_exclude; }));
    t.push_back({"run", "seed", [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_uint(k, v); }});
    t.push_back({"run", "threads", [](const RunConfig& c) { return std::to_string(c.threads); },
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.threads = static_cast<unsigned>(to_uint(k, v));
                 }});
    t.push_back({"run", "multimodal", [](const RunConfig& c) { return std::string(c.multimodal ? "true" : "false"); },
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.multimodal = to_bool(k, v); }});

    t.push_back(real("prediction", "heading_fallback",
                     [](auto& c) -> auto& { return c.prediction.heading_fallback_threshold; }));
    t.push_back(real("prediction", "min_speed", [](auto& c) -> auto& { return c.prediction.min_speed; }));

    t.push_back({"noise", "sigma_cv_sq", [](const RunConfig& c) { return render_variances(c.noise.sigma_cv_sq); },
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.noise.sigma_cv_sq = to_variances(k, v);
                 }});
    t.push_back({"noise", "sigma_ls_sq", [](const RunConfig& c) { return render_variances(c.noise.sigma_ls_sq); },
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.noise.sigma_ls_sq = to_variances(k, v);
                 }});

    t.push_back(real("curvature", "decay_rate", [](auto& c) -> auto& { return c.curvature.decay_rate; }));
    t.push_back(real("curvature", "turn_trigger_eps",
                     [](auto& c) -> auto& { return c.curvature.turn_trigger_eps; }));
    t.push_back(real("curvature", "heading_window",
                     [](auto& c) -> auto& { return c.curvature.heading_window; }));

    t.push_back(real("multimodal", "d_max", [](auto& c) -> auto& { return c.thresholds.d_max; }));
    t.push_back(real("multimodal", "theta_max", [](auto& c) -> auto& { return c.thresholds.theta_max; }));
    t.push_back(real("multimodal", "tau", [](auto& c) -> auto& { return c.thresholds.tau; }));

    t.push_back({"pf", "n", [](const RunConfig& c) { return std::to_string(c.pf.n); },
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.pf.n = static_cast<std::size_t>(to_uint(k, v));
                 }});
    t.push_back(real("pf", "sigma_a", [](auto& c) -> auto& { return c.pf.sigma_a; }));
    t.push_back(real("pf", "warmup", [](auto& c) -> auto& { return c.pf.warmup; }));
    t.push_back({"pf", "substitute_during_warmup",
                 [](const RunConfig& c) { return std::string(c.pf.substitute_during_warmup ? "true" : "false"); },
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.pf.substitute_during_warmup = to_bool(k, v);
                 }});
    t.push_back({"pf", "smoothing_window", [](const RunConfig& c) { return std::to_string(c.pf.smoothing_window); },
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.pf.smoothing_window = static_cast<std::size_t>(to_uint(k, v));
                 }});
    t.push_back(range("pf", "v0_range", [](auto& c) -> auto& { return c.pf.priors.v0; }));
    t.push_back(range("pf", "s0_range", [](auto& c) -> auto& { return c.pf.priors.s0; }));
    t.push_back(range("pf", "s1_range", [](auto& c) -> auto& { return c.pf.priors.s1; }));
    t.push_back(range("pf", "t_headway_range", [](auto& c) -> auto& { return c.pf.priors.t_headway; }));
    t.push_back(range("pf", "a_max_range", [](auto& c) -> auto& { return c.pf.priors.a_max; }));
    t.push_back(range("pf", "b_range", [](auto& c) -> auto& { return c.pf.priors.b; }));

    t.push_back(real("dataset", "dt_grid", [](auto& c) -> auto& { return c.dt_grid; }));
    t.push_back(real("dataset", "unit_scale", [](auto& c) -> auto& { return c.unit_scale; }));
    t.push_back(text("dataset", "agent_id", [](auto& c) -> auto& { return c.columns.agent_id; }));
    t.push_back(text("dataset", "time", [](auto& c) -> auto& { return c.columns.time; }));
    t.push_back(text("dataset", "frame", [](auto& c) -> auto& { return c.columns.frame; }));
    t.push_back(real("dataset", "frame_rate", [](auto& c) -> auto& { return c.columns.frame_rate; }));
    t.push_back(text("dataset", "x", [](auto& c) -> auto& { return c.columns.x; }));
    t.push_back(text("dataset", "y", [](auto& c) -> auto& { return c.columns.y; }));
    t.push_back(text("dataset", "speed", [](auto& c) -> auto& { return c.columns.speed; }));
    t.push_back(text("dataset", "heading", [](auto& c) -> auto& { return c.columns.heading; }));
    t.push_back(text("dataset", "length", [](auto& c) -> auto& { return c.columns.length; }));
    return t;
  }();
  return table;
}

bool is_path_key(const Entry& e) { return e.section == "paths"; }

}  // namespace

std::string_view model_name(Model m) {
  switch (m) {
    case Model::cv: return "cv";
    case Model::curv_cv: return "curv-cv";
    case Model::ls_cv: return "ls-cv";
    case Model::glk_cv: return "glk-cv";
    case Model::ls_idm: return "ls-idm";
    case Model::glk_idm: return "glk-idm";
  }
  return "?";
}

std::optional<Model> parse_model(std::string_view name) {
  for (Model m : kAllModels) {
    if (model_name(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<Model> parse_model_list(std::string_view csv) {
  std::vector<Model> out;
  for (auto part : detail::split(csv)) {
    if (part.empty()) continue;
    const auto m = parse_model(part);
    if (!m) throw ConfigError("unknown model '" + std::string(part) + "'");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw ConfigError("at least one model is required");
  return out;
}

bool uses_idm(Model m) { return m == Model::ls_idm || m == Model::glk_idm; }

void RunConfig::validate() const {
  try {
    if (models.empty()) throw ConfigError("at least one model is required");
    prediction.validate();
    noise.validate();
    curvature.validate();
    thresholds.validate();
    pf.priors.validate();
    if (pf.n == 0) throw ConfigError("pf.n must be > 0");
    if (!(pf.sigma_a > 0.0)) throw ConfigError("pf.sigma_a must be > 0");
    if (!(pf.warmup >= 0.0)) throw ConfigError("pf.warmup must be >= 0");
    if (!(dt_grid > 0.0)) throw ConfigError("dataset.dt_grid must be > 0");
    if (!(unit_scale > 0.0)) throw ConfigError("dataset.unit_scale must be > 0");
    if (columns.time.empty() && !(columns.frame_rate > 0.0)) {
      throw ConfigError("dataset.frame_rate must be > 0");
    }
    if (!(stride > 0.0)) throw ConfigError("run.stride must be > 0");
    if (!(warmup_exclude >= 0.0)) throw ConfigError("run.warmup_exclude must be >= 0");
    grid_steps(prediction.dt, dt_grid, "run.dt (against dataset.dt_grid)");
    grid_steps(prediction.horizon, prediction.dt, "run.horizon");
    grid_steps(stride, prediction.dt, "run.stride");
    grid_steps(warmup_exclude, dt_grid, "run.warmup_exclude");
    grid_steps(curvature.heading_window, dt_grid, "curvature.heading_window");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

void apply_config_file(RunConfig& base, const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config '" + path + "': " + e.message());
  }
  const std::filesystem::path dir = std::filesystem::absolute(path).parent_path();

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config '" + path + "': key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : body) {
      const Entry* match = nullptr;
      for (const auto& e : entries()) {
        if (e.section == section && e.key == key) match = &e;
      }
      const std::string full = section + "." + key;
      if (!match) throw ConfigError("config '" + path + "': unknown key '" + full + "'");
      std::string v = value.data();
      if (is_path_key(*match) && !v.empty()) {
        std::filesystem::path p(std::string(detail::trim(v)));
        if (p.is_relative()) p = dir / p;
        v = p.lexically_normal().string();
      }
      match->set(base, full, v);
    }
  }
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  apply_config_file(cfg, path);
  return cfg;
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& e : entries()) {
    if (e.section != section) {
      if (!section.empty()) out << '\n';
      section = e.section;
      out << '[' << section << "]\n";
    }
    out << e.key << " = " << e.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace glk
