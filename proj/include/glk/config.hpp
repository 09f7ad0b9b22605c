#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "glk/dataset.hpp"
#include "glk/interaction.hpp"
#include "glk/motion_models.hpp"
#include "glk/multimodal.hpp"

namespace glk {

enum class Model { cv, curv_cv, ls_cv, glk_cv, ls_idm, glk_idm };

std::string_view model_name(Model m);
std::optional<Model> parse_model(std::string_view name);
std::vector<Model> parse_model_list(std::string_view csv);
bool uses_idm(Model m);

/// Raised for unreadable, malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParticleFilterSettings {
  std::size_t n = 1000;
  double sigma_a = 0.5;
  /// Seconds after first appearance before the IDM parameters are trusted.
  double warmup = 2.0;
  /// Use the CV counterpart (ls-cv / glk-cv) while the filter warms up.
  bool substitute_during_warmup = true;
  /// Centered moving-average length applied to observed accelerations.
  std::size_t smoothing_window = 1;
  PriorRanges priors;
};

struct RunConfig {
  std::string tracks_path;
  std::string lanes_path;
  std::string out_dir = "glk_out";

  std::vector<Model> models{Model::cv, Model::ls_cv, Model::glk_cv, Model::ls_idm,
                            Model::glk_idm};
  double stride = 0.5;
  double warmup_exclude = 0.0;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency. Never affects output.
  unsigned threads = 0;
  bool multimodal = true;

  PredictionConfig prediction;
  NoiseConfig noise;
  CurvatureConfig curvature;
  AssociationThresholds thresholds;
  ParticleFilterSettings pf;

  double dt_grid = 0.1;
  double unit_scale = 0.3048;
  ColumnMap columns;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Reads a key=value file with [sections]. Relative paths are resolved
/// against the directory of the file. Unknown keys are rejected.
RunConfig load_config(const std::string& path);

/// Applies the entries of a config file on top of `base`.
void apply_config_file(RunConfig& base, const std::string& path);

/// Serializes every setting; load_config on the result reproduces `cfg`
/// when its paths are absolute.
std::string render_config(const RunConfig& cfg);

}  // namespace glk
