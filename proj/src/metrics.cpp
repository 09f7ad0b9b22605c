#include "glk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <tuple>

#include "csv.hpp"

namespace glk {

DisplacementError ade_fde(std::span<const Point2> predicted, std::span<const Point2> truth) {
  if (predicted.empty() || predicted.size() != truth.size()) {
    throw std::invalid_argument("ade_fde: sequences must be non-empty and of equal length");
  }
  double sum = 0.0;
  double last = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    last = std::hypot(predicted[i].x - truth[i].x, predicted[i].y - truth[i].y);
    sum += last;
  }
  return {sum / static_cast<double>(predicted.size()), last};
}

std::vector<Point2> trace_positions(const PredictionTrace& trace) {
  std::vector<Point2> out;
  out.reserve(trace.size());
  for (const auto& tp : trace) out.push_back({tp.belief.mean[0], tp.belief.mean[1]});
  return out;
}

ModeChoice min_over_modes(const ModeSet& modes, std::span<const Point2> truth) {
  if (modes.modes.empty()) throw std::invalid_argument("min_over_modes: empty mode set");
  ModeChoice best;
  best.error.ade = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < modes.modes.size(); ++i) {
    const auto pos = trace_positions(modes.modes[i].trace);
    const DisplacementError e = ade_fde(pos, truth);
    if (e.ade < best.error.ade) best = {e, i};
  }
  return best;
}

std::vector<SummaryRow> summarize(std::span<const ErrorRecord> records) {
  std::vector<SummaryRow> rows;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    auto [it, inserted] = index.try_emplace(r.model, rows.size());
    if (inserted) rows.push_back({r.model, 0.0, 0.0, 0});
    SummaryRow& row = rows[it->second];
    row.mean_ade += r.ade;
    row.mean_fde += r.fde;
    ++row.count;
  }
  for (auto& row : rows) {
    row.mean_ade /= static_cast<double>(row.count);
    row.mean_fde /= static_cast<double>(row.count);
  }
  return rows;
}

SortedErrorTable sorted_errors(std::span<const ErrorRecord> records,
                               const std::string& reference_model) {
  SortedErrorTable table;
  table.models.push_back(reference_model);
  for (const auto& r : records) {
    if (std::find(table.models.begin(), table.models.end(), r.model) == table.models.end()) {
      table.models.push_back(r.model);
    }
  }
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < table.models.size(); ++i) column[table.models[i]] = i;

  using Key = std::pair<std::string, double>;
  std::map<Key, SortedErrorRow> by_window;
  bool has_reference = false;
  for (const auto& r : records) {
    auto& row = by_window[{r.agent_id, r.t0}];
    if (row.ade.empty()) {
      row.agent_id = r.agent_id;
      row.t0 = r.t0;
      row.ade.assign(table.models.size(), std::numeric_limits<double>::quiet_NaN());
    }
    row.ade[column[r.model]] = r.ade;
    has_reference = has_reference || r.model == reference_model;
  }
  if (!has_reference) {
    throw std::invalid_argument("reference model '" + reference_model + "' has no records");
  }

  for (auto& [key, row] : by_window) {
    if (!std::isnan(row.ade[0])) table.rows.push_back(std::move(row));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const SortedErrorRow& a, const SortedErrorRow& b) {
                     return a.ade[0] < b.ade[0];
                   });
  return table;
}

void write_records_csv(const std::string& path, std::span<const ErrorRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "agent_id,t0,model,ade,fde,mode\n";
  for (const auto& r : records) {
    out << r.agent_id << ',' << detail::format_fixed(r.t0, 3) << ',' << r.model << ','
        << detail::format_fixed(r.ade, 6) << ',' << detail::format_fixed(r.fde, 6) << ','
        << r.mode << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<ErrorRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("records file '" + path + "' is empty");
  const auto header = detail::split(line);
  const std::vector<std::string_view> expected{"agent_id", "t0", "model", "ade", "fde", "mode"};
  if (header.size() < expected.size() ||
      !std::equal(expected.begin(), expected.end(), header.begin())) {
    throw std::runtime_error("records file '" + path + "' has an unexpected header");
  }
  std::vector<ErrorRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line);
    const auto t0 = f.size() >= 6 ? detail::parse_double(f[1]) : std::nullopt;
    const auto ade = f.size() >= 6 ? detail::parse_double(f[3]) : std::nullopt;
    const auto fde = f.size() >= 6 ? detail::parse_double(f[4]) : std::nullopt;
    const auto mode = f.size() >= 6 ? detail::parse_double(f[5]) : std::nullopt;
    if (!t0 || !ade || !fde || !mode) {
      throw std::runtime_error("records file '" + path + "': bad row at line " +
                               std::to_string(line_no));
    }
    records.push_back({std::string(f[0]), *t0, std::string(f[2]), *ade, *fde,
                       static_cast<std::size_t>(*mode)});
  }
  return records;
}

void write_summary_json(const std::string& path, std::span<const SummaryRow> rows) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    doc.push_back({{"model", r.model},
                   {"mean_ade", r.mean_ade},
                   {"mean_fde", r.mean_fde},
                   {"n", r.count}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

void write_sorted_errors_csv(const std::string& path, const SortedErrorTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "rank,agent_id,t0";
  for (const auto& m : table.models) out << ',' << m;
  out << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out << i << ',' << row.agent_id << ',' << detail::format_fixed(row.t0, 3);
    for (double v : row.ade) out << ',' << (std::isnan(v) ? std::string("nan") : detail::format_fixed(v, 6));
    out << '\n';
  }
}

}  // namespace glk
