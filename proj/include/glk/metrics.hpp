#pragma once

#include <span>
#include <string>
#include <vector>

#include "glk/geometry.hpp"
#include "glk/multimodal.hpp"

namespace glk {

struct DisplacementError {
  double ade = 0.0;
  double fde = 0.0;
};

/// Mean and final Euclidean position error. Throws std::invalid_argument on
/// empty or mismatched inputs.
DisplacementError ade_fde(std::span<const Point2> predicted, std::span<const Point2> truth);

std::vector<Point2> trace_positions(const PredictionTrace& trace);

struct ModeChoice {
  DisplacementError error;
  std::size_t mode = 0;
};

/// Mode with the lowest ADE (FDE from that same mode); ties go to the lower
/// index. Mode probabilities play no part in the choice.
ModeChoice min_over_modes(const ModeSet& modes, std::span<const Point2> truth);

struct ErrorRecord {
  std::string agent_id;
  double t0 = 0.0;
  std::string model;
  double ade = 0.0;
  double fde = 0.0;
  std::size_t mode = 0;
};

struct SummaryRow {
  std::string model;
  double mean_ade = 0.0;
  double mean_fde = 0.0;
  std::size_t count = 0;
};

/// Per-model means, in order of first appearance of each model.
std::vector<SummaryRow> summarize(std::span<const ErrorRecord> records);

struct SortedErrorRow {
  std::string agent_id;
  double t0 = 0.0;
  /// One ADE per entry of SortedErrorTable::models; NaN where missing.
  std::vector<double> ade;
};

struct SortedErrorTable {
  std::vector<std::string> models;
  std::vector<SortedErrorRow> rows;
};

/// Windows ordered by the reference model's ADE (ascending, ties by agent
/// and t0), one column per model. The reference model is the first column.
/// Throws std::invalid_argument when the reference model has no records.
SortedErrorTable sorted_errors(std::span<const ErrorRecord> records,
                               const std::string& reference_model);

void write_records_csv(const std::string& path, std::span<const ErrorRecord> records);
std::vector<ErrorRecord> read_records_csv(const std::string& path);
void write_summary_json(const std::string& path, std::span<const SummaryRow> rows);
void write_sorted_errors_csv(const std::string& path, const SortedErrorTable& table);

}  // namespace glk
