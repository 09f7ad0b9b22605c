// Command-line entry point: evaluate, predict and sorted-errors.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "glk/config.hpp"
#include "glk/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string tracks;
  std::string lanes;
  std::string out;
  std::string models;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<double> stride;
  std::optional<double> warmup_exclude;
  std::optional<double> sigma_cv;
  std::optional<double> sigma_ls;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_run_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key=value config file with [sections]");
  cmd->add_option("--tracks", o.tracks, "trajectory table (overrides paths.tracks)");
  cmd->add_option("--lanes", o.lanes, "lane map table (overrides paths.lanes)");
  cmd->add_option("--models", o.models, "comma list of cv,curv-cv,ls-cv,glk-cv,ls-idm,glk-idm");
  cmd->add_option("--horizon", o.horizon, "prediction horizon [s]");
  cmd->add_option("--dt", o.dt, "prediction time step [s]");
  cmd->add_option("--stride", o.stride, "window stride [s]");
  cmd->add_option("--warmup-exclude", o.warmup_exclude,
                  "drop windows within this many seconds of first appearance");
  cmd->add_option("--sigma-cv", o.sigma_cv, "constant-velocity noise variance (all components)");
  cmd->add_option("--sigma-ls", o.sigma_ls, "lane-snapping noise variance (all components)");
  cmd->add_option("--seed", o.seed, "particle filter seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

// Returns nullopt after printing the error when the config is unusable.
std::optional<glk::RunConfig> resolve(const Overrides& o) {
  glk::RunConfig cfg;
  try {
    if (!o.config.empty()) glk::apply_config_file(cfg, o.config);
    if (!o.tracks.empty()) cfg.tracks_path = o.tracks;
    if (!o.lanes.empty()) cfg.lanes_path = o.lanes;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (!o.models.empty()) cfg.models = glk::parse_model_list(o.models);
    if (o.horizon) cfg.prediction.horizon = *o.horizon;
    if (o.dt) cfg.prediction.dt = *o.dt;
    if (o.stride) cfg.stride = *o.stride;
    if (o.warmup_exclude) cfg.warmup_exclude = *o.warmup_exclude;
    if (o.sigma_cv) cfg.noise.sigma_cv_sq = glk::Vector4::Constant(*o.sigma_cv);
    if (o.sigma_ls) cfg.noise.sigma_ls_sq = glk::Vector4::Constant(*o.sigma_ls);
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    cfg.validate();
  } catch (const glk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return std::nullopt;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-keeping trajectory prediction baselines and evaluation"};
  app.require_subcommand(1);

  Overrides eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "run models over every window, write metrics");
  add_run_flags(evaluate, eval_opts);
  evaluate->add_option("--out", eval_opts.out, "output directory");

  Overrides pred_opts;
  std::string agent;
  double t0 = 0.0;
  std::string model = "glk-cv";
  std::string pred_out = "prediction.csv";
  auto* predict = app.add_subcommand("predict", "export one agent's multi-modal prediction");
  add_run_flags(predict, pred_opts);
  predict->add_option("--agent", agent, "agent id")->required();
  predict->add_option("--t0", t0, "prediction time [s]")->required();
  predict->add_option("--model", model, "model name");
  predict->add_option("--out", pred_out, "output CSV");

  std::string records;
  std::string reference = "ls-cv";
  std::string sorted_out = "sorted_errors.csv";
  auto* sorted = app.add_subcommand("sorted-errors", "per-window ADE sorted by a reference model");
  sorted->add_option("--records", records, "records.csv from evaluate")->required();
  sorted->add_option("--reference", reference, "model defining the sort order");
  sorted->add_option("--out", sorted_out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : glk::kExitConfig;
  }

  if (*evaluate) {
    const auto cfg = resolve(eval_opts);
    if (!cfg) return glk::kExitConfig;
    return glk::cmd_evaluate(*cfg, std::cerr);
  }
  if (*predict) {
    const auto cfg = resolve(pred_opts);
    if (!cfg) return glk::kExitConfig;
    const auto m = glk::parse_model(model);
    if (!m) {
      std::cerr << "unknown model '" << model << "'\n";
      return glk::kExitConfig;
    }
    return glk::cmd_predict(*cfg, agent, t0, *m, pred_out, std::cerr);
  }
  return glk::cmd_sorted_errors(records, reference, sorted_out, std::cerr);
}
