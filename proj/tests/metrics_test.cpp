#include "glk/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

namespace glk {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("glk_metrics_" + std::to_string(::getpid()) + "_" + name);
}

PredictionTrace trace_of(const std::vector<Point2>& pts) {
  PredictionTrace t;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    t.push_back({0.1 * static_cast<double>(i + 1),
                 GaussianBelief{Vector4(pts[i].x, pts[i].y, 0, 0), Matrix4::Zero()}});
  }
  return t;
}

TEST(AdeFde, Example) {
  const std::vector<Point2> pred{{0, 0}, {1, 0}};
  const std::vector<Point2> truth{{0, 0.1}, {1, 0.6}};
  const auto e = ade_fde(pred, truth);
  EXPECT_NEAR(e.ade, 0.35, 1e-15);
  EXPECT_NEAR(e.fde, 0.6, 1e-15);
}

TEST(AdeFde, InvalidInputsThrow) {
  const std::vector<Point2> one{{0, 0}};
  const std::vector<Point2> two{{0, 0}, {1, 1}};
  EXPECT_THROW(ade_fde({}, {}), std::invalid_argument);
  EXPECT_THROW(ade_fde(one, two), std::invalid_argument);
}

TEST(AdeFde, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_int_distribution<int> len(1, 80), modes(1, 4);
  for (int c = 0; c < 1000; ++c) {
    const int n = len(rng);
    std::vector<Point2> truth(n);
    for (auto& p : truth) p = {u(rng), u(rng)};
    ModeSet set;
    std::vector<std::vector<Point2>> preds;
    for (int m = 0, k = modes(rng); m < k; ++m) {
      std::vector<Point2> pred(n);
      for (auto& p : pred) p = {u(rng), u(rng)};
      preds.push_back(pred);
      set.modes.push_back({trace_of(pred), 1.0 / k, std::nullopt});
    }
    std::size_t best = 0;
    double best_ade = 0.0, best_fde = 0.0;
    for (std::size_t m = 0; m < preds.size(); ++m) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += std::hypot(preds[m][i].x - truth[i].x, preds[m][i].y - truth[i].y);
      const double ade = sum / n;
      const double fde = std::hypot(preds[m][n - 1].x - truth[n - 1].x, preds[m][n - 1].y - truth[n - 1].y);
      if (m == 0 || ade < best_ade) {
        best = m;
        best_ade = ade;
        best_fde = fde;
      }
      const auto e = ade_fde(preds[m], truth);
      EXPECT_EQ(e.ade, ade);
      EXPECT_EQ(e.fde, fde);
    }
    const auto choice = min_over_modes(set, truth);
    EXPECT_EQ(choice.mode, best);
    EXPECT_EQ(choice.error.ade, best_ade);
    EXPECT_EQ(choice.error.fde, best_fde);
  }
}

TEST(MinOverModes, TiesGoToLowerIndex) {
  const std::vector<Point2> truth{{0, 0}, {0, 0}};
  ModeSet set;
  set.modes.push_back({trace_of({{1, 0}, {1, 0}}), 0.2, "a"});
  set.modes.push_back({trace_of({{0, 1}, {0, 1}}), 0.8, "b"});
  EXPECT_EQ(min_over_modes(set, truth).mode, 0u);
  EXPECT_THROW(min_over_modes(ModeSet{}, truth), std::invalid_argument);
}

std::vector<ErrorRecord> random_records(std::mt19937_64& rng, int windows) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<ErrorRecord> recs;
  for (int w = 0; w < windows; ++w) {
    const std::string agent = std::to_string(w % 7);
    const double t0 = 0.5 * (w / 7);
    for (const char* model : {"cv", "ls-cv", "glk-cv"}) {
      recs.push_back({agent, t0, model, u(rng), u(rng), 0});
    }
  }
  return recs;
}

TEST(Summarize, MeansPerModelInFirstAppearanceOrder) {
  const std::vector<ErrorRecord> recs{{"1", 0, "cv", 1, 2, 0}, {"1", 0, "glk-cv", 0.5, 1, 0},
                                      {"2", 0, "cv", 3, 4, 0}};
  const auto s = summarize(recs);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].model, "cv");
  EXPECT_DOUBLE_EQ(s[0].mean_ade, 2.0);
  EXPECT_DOUBLE_EQ(s[0].mean_fde, 3.0);
  EXPECT_EQ(s[0].count, 2u);
  EXPECT_EQ(s[1].model, "glk-cv");
  EXPECT_EQ(s[1].count, 1u);
}

TEST(SortedErrors, ReferenceColumnNondecreasingAndRowsPreserved) {
  std::mt19937_64 rng(2);
  const auto recs = random_records(rng, 200);
  const auto table = sorted_errors(recs, "ls-cv");
  ASSERT_EQ(table.models.front(), "ls-cv");
  ASSERT_EQ(table.models.size(), 3u);
  ASSERT_EQ(table.rows.size(), 200u);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    EXPECT_LE(table.rows[i - 1].ade[0], table.rows[i].ade[0]);
  }
  // Each row carries the ADEs of its own window.
  std::map<std::tuple<std::string, double, std::string>, double> lookup;
  for (const auto& r : recs) lookup[{r.agent_id, r.t0, r.model}] = r.ade;
  for (const auto& row : table.rows) {
    for (std::size_t m = 0; m < table.models.size(); ++m) {
      EXPECT_EQ(row.ade[m], (lookup[{row.agent_id, row.t0, table.models[m]}]));
    }
  }
  // Per-model means from the table equal the summary.
  const auto summary = summarize(recs);
  for (const auto& s : summary) {
    const auto col = std::find(table.models.begin(), table.models.end(), s.model) - table.models.begin();
    double sum = 0.0;
    for (const auto& row : table.rows) sum += row.ade[col];
    EXPECT_NEAR(sum / table.rows.size(), s.mean_ade, 1e-12);
  }
}

TEST(SortedErrors, MissingModelIsNanAndMissingReferenceThrows) {
  const std::vector<ErrorRecord> recs{{"1", 0, "ls-cv", 1, 2, 0}, {"1", 0, "cv", 3, 4, 0},
                                      {"2", 0.5, "ls-cv", 0.5, 1, 0}};
  const auto table = sorted_errors(recs, "ls-cv");
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].agent_id, "2");
  EXPECT_TRUE(std::isnan(table.rows[0].ade[1]));
  EXPECT_THROW(sorted_errors(recs, "glk-idm"), std::invalid_argument);
}

TEST(RecordsCsv, RoundTrip) {
  const std::vector<ErrorRecord> recs{{"12", 2.5, "glk-cv", 1.234567, 2.5, 1}, {"x", 0.0, "cv", 0.1, 0.2, 0}};
  const auto path = temp_path("records.csv");
  write_records_csv(path.string(), recs);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "agent_id,t0,model,ade,fde,mode");
  const auto back = read_records_csv(path.string());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].agent_id, "12");
  EXPECT_DOUBLE_EQ(back[0].t0, 2.5);
  EXPECT_EQ(back[0].model, "glk-cv");
  EXPECT_NEAR(back[0].ade, 1.234567, 1e-9);
  EXPECT_EQ(back[0].mode, 1u);
  fs::remove(path);
  EXPECT_THROW(read_records_csv(path.string()), std::runtime_error);
}

TEST(SummaryJson, Fields) {
  const std::vector<SummaryRow> rows{{"cv", 2.0, 3.0, 4}};
  const auto path = temp_path("summary.json");
  write_summary_json(path.string(), rows);
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0]["model"], "cv");
  EXPECT_DOUBLE_EQ(j[0]["mean_ade"].get<double>(), 2.0);
  EXPECT_EQ(j[0]["n"].get<int>(), 4);
  fs::remove(path);
}

TEST(SortedErrorsCsv, HeaderAndRanks) {
  const std::vector<ErrorRecord> recs{{"1", 0, "ls-cv", 1, 2, 0}, {"1", 0, "cv", 3, 4, 0}};
  const auto path = temp_path("sorted.csv");
  write_sorted_errors_csv(path.string(), sorted_errors(recs, "ls-cv"));
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "rank,agent_id,t0,ls-cv,cv");
  EXPECT_EQ(row.rfind("0,1,0.000,1.000000,3.000000", 0), 0u);
  fs::remove(path);
}

}  // namespace
}  // namespace glk
