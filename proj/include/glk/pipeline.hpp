#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "glk/config.hpp"
#include "glk/dataset.hpp"
#include "glk/metrics.hpp"
#include "glk/multimodal.hpp"

namespace glk {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitIo = 2,
  kExitNoWindows = 3,
};

struct LoadedScene {
  Scene scene;
  std::size_t skipped_rows = 0;
};

/// Loads the trajectory and lane files named by the config. Throws
/// std::runtime_error on I/O or parse failure.
LoadedScene load_scene(const RunConfig& cfg);

struct EvaluationResult {
  std::vector<ErrorRecord> records;
  std::vector<SummaryRow> summary;
  std::size_t window_count = 0;
};

/// Runs every configured model over every window. Records are ordered by
/// agent, then t0, then the configured model order, independent of the
/// number of worker threads.
EvaluationResult evaluate(const RunConfig& cfg, const Scene& scene);

/// Predicts one agent at grid time t0 with the observation history up to t0.
/// Throws std::out_of_range for an unknown agent or t0 outside its track.
ModeSet predict_agent(const RunConfig& cfg, const Scene& scene, const std::string& agent_id,
                      double t0, Model model);

/// Writes records.csv, summary.json and manifest.ini into cfg.out_dir.
int cmd_evaluate(const RunConfig& cfg, std::ostream& log);

/// Writes one agent's modes (per-step mean and covariance diagonal) as CSV.
int cmd_predict(const RunConfig& cfg, const std::string& agent_id, double t0, Model model,
                const std::string& out_path, std::ostream& log);

int cmd_sorted_errors(const std::string& records_path, const std::string& reference_model,
                      const std::string& out_path, std::ostream& log);

void write_modes_csv(const std::string& path, const ModeSet& modes);

}  // namespace glk
