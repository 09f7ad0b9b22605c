#include "glk/dataset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace glk {
namespace {

namespace fs = std::filesystem;

class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("glk_dataset_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv");
    std::ofstream(path_) << contents;
  }
  ~TempFile() { fs::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  fs::path path_;
};

ColumnMap seconds_columns() {
  ColumnMap c;
  c.agent_id = "id";
  c.time = "t";
  c.x = "x";
  c.y = "y";
  return c;
}

RawTrack track_from(const std::string& id, const std::vector<double>& t,
                    double (*fx)(double), double (*fy)(double)) {
  RawTrack r;
  r.agent_id = id;
  for (double ti : t) r.samples.push_back({ti, fx(ti), fy(ti), std::nullopt, std::nullopt});
  return r;
}

std::vector<double> times(double start, double end, double step) {
  std::vector<double> t;
  const long n = std::lround((end - start) / step);
  for (long i = 0; i <= n; ++i) t.push_back(start + static_cast<double>(i) * step);
  return t;
}

TEST(LoadTracks, CitySimDefaultsConvertFeetAndFrames) {
  TempFile f("carId,frameNum,carCenterXft,carCenterYft\n7,30,10,20\n7,33,20,20\n");
  const auto r = load_tracks(f.path(), ColumnMap{}, 0.3048);
  ASSERT_EQ(r.tracks.size(), 1u);
  const auto& s = r.tracks[0].samples;
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0].t, 1.0);
  EXPECT_DOUBLE_EQ(s[1].t, 1.1);
  EXPECT_DOUBLE_EQ(s[0].x, 3.048);
  EXPECT_DOUBLE_EQ(s[0].y, 6.096);
}

TEST(LoadTracks, GroupsSortsAndSkips) {
  TempFile f(
      "id,t,x,y\n"
      "10,0.0,0,0\n"
      "2,0.1,1,1\n"
      "2,0.0,0,0\n"
      "10,0.1,1,0\n"
      "10,abc,1,0\n"
      "10,0.1,5,5\n"
      "3,0.0,0,0\n"
      "10,0.2\n"
      "\n"
      "2,0.2,2,2\n");
  const auto r = load_tracks(f.path(), seconds_columns(), 1.0);
  ASSERT_EQ(r.tracks.size(), 2u);
  EXPECT_EQ(r.tracks[0].agent_id, "2");
  EXPECT_EQ(r.tracks[1].agent_id, "10");
  EXPECT_EQ(r.tracks[0].samples.size(), 3u);
  EXPECT_DOUBLE_EQ(r.tracks[0].samples[0].t, 0.0);
  EXPECT_EQ(r.tracks[1].samples.size(), 2u);
  EXPECT_DOUBLE_EQ(r.tracks[1].samples[1].x, 1.0);
  // Bad time, short row, and the duplicate time of agent 10.
  EXPECT_EQ(r.skipped_rows, 3u);
}

TEST(LoadTracks, OptionalColumns) {
  ColumnMap c = seconds_columns();
  c.speed = "v";
  c.length = "len";
  TempFile f("id,t,x,y,v,len\na,0,0,0,10,15\na,1,1,0,10,15\n");
  const auto r = load_tracks(f.path(), c, 0.3048);
  ASSERT_EQ(r.tracks.size(), 1u);
  EXPECT_DOUBLE_EQ(r.tracks[0].length, 15 * 0.3048);
  EXPECT_DOUBLE_EQ(*r.tracks[0].samples[0].speed, 3.048);
}

TEST(LoadTracks, Errors) {
  EXPECT_THROW(load_tracks("/nonexistent/tracks.csv", ColumnMap{}, 1.0), std::runtime_error);
  TempFile empty("");
  EXPECT_THROW(load_tracks(empty.path(), ColumnMap{}, 1.0), std::runtime_error);
  TempFile header_only("id,t,x,y\n");
  EXPECT_THROW(load_tracks(header_only.path(), seconds_columns(), 1.0), std::runtime_error);
  TempFile missing("id,t,x\n1,0,0\n");
  EXPECT_THROW(load_tracks(missing.path(), seconds_columns(), 1.0), std::runtime_error);
}

TEST(Resample, LinearMotionIsExact) {
  RawTrack r;
  r.agent_id = "lin";
  for (double t : {0.03, 0.2, 0.27, 0.61, 1.05, 1.5, 2.02}) r.samples.push_back({t, 2 + 3 * t, -1 * t, {}, {}});
  const auto out = resample_and_differentiate(r, 0.1);
  EXPECT_EQ(out.first_index, 1);
  EXPECT_EQ(out.last_index(), 20);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_NEAR(out.x[i], 2 + 3 * out.time(i), 1e-12);
    EXPECT_NEAR(out.vx[i], 3.0, 1e-9);
    EXPECT_NEAR(out.vy[i], -1.0, 1e-9);
    EXPECT_NEAR(out.speed[i], std::sqrt(10.0), 1e-9);
    EXPECT_NEAR(out.accel[i], 0.0, 1e-8);
  }
}

TEST(Resample, OnGridDataIsUnchanged) {
  const auto r = track_from("g", times(0.0, 3.0, 0.1), [](double t) { return std::sin(t) * 5; },
                            [](double t) { return t * t; });
  const auto out = resample_and_differentiate(r, 0.1);
  ASSERT_EQ(out.size(), r.samples.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_NEAR(out.x[i], r.samples[i].x, 1e-12);
    EXPECT_NEAR(out.y[i], r.samples[i].y, 1e-12);
  }
}

TEST(Resample, QuadraticCentralDifferencesAreExactInside) {
  const auto r = track_from("q", times(1.0, 4.0, 0.1), [](double t) { return t * t; },
                            [](double) { return 0.0; });
  const auto out = resample_and_differentiate(r, 0.1);
  const std::size_t n = out.size();
  for (std::size_t i = 1; i + 1 < n; ++i) EXPECT_NEAR(out.vx[i], 2 * out.time(i), 1e-9);
  // Speed is exact from index 1, so its central difference is exact from 2.
  for (std::size_t i = 2; i + 2 < n; ++i) EXPECT_NEAR(out.accel[i], 2.0, 1e-8);
}

TEST(Resample, SinusoidDerivativesAreSecondOrderAccurate) {
  const auto r = track_from("s", times(0.0, 10.0, 0.01), [](double t) { return std::sin(t); },
                            [](double) { return 0.0; });
  const auto out = resample_and_differentiate(r, 0.1);
  // Central difference error is about dt^2/6 times |x'''|.
  for (std::size_t i = 1; i + 1 < out.size(); ++i) {
    EXPECT_NEAR(out.vx[i], std::cos(out.time(i)), 0.1 * 0.1 / 6.0 + 1e-6);
  }
}

TEST(Resample, CausalStateUsesBackwardDifference) {
  const auto r = track_from("q", times(0.0, 1.0, 0.1), [](double t) { return t * t; },
                            [](double) { return 0.0; });
  const auto out = resample_and_differentiate(r, 0.1);
  const auto s = out.causal_state(5);
  EXPECT_NEAR(s.vx, (0.25 - 0.16) / 0.1, 1e-9);
  EXPECT_NEAR(out.causal_state(0).vx, 0.1, 1e-9);
}

TEST(Resample, TooShortThrows) {
  RawTrack r;
  r.agent_id = "x";
  r.samples = {{0.01, 0, 0, {}, {}}, {0.05, 1, 0, {}, {}}};
  EXPECT_THROW(resample_and_differentiate(r, 0.1), std::invalid_argument);
}

TEST(MovingAverage, CenteredWithShrinkingEdges) {
  const auto m = moving_average({1, 2, 3, 4, 5}, 3);
  EXPECT_DOUBLE_EQ(m[0], 1.5);
  EXPECT_DOUBLE_EQ(m[2], 3.0);
  EXPECT_DOUBLE_EQ(m[4], 4.5);
  EXPECT_EQ(moving_average({1, 2}, 1), (std::vector<double>{1, 2}));
}

Scene scene_with(std::vector<RawTrack> tracks) { return make_scene(tracks, {}, 0.1); }

TEST(Windows, TenSecondTrackGivesNineWindows) {
  const auto scene = scene_with({track_from("a", times(0.0, 10.0, 0.1), [](double t) { return 2 * t; },
                                            [](double) { return 0.0; })});
  const auto w = make_windows(scene, 0.5, 6.0, 0.0);
  ASSERT_EQ(w.size(), 9u);
  EXPECT_DOUBLE_EQ(w.front().t0, 0.0);
  EXPECT_DOUBLE_EQ(w.back().t0, 4.0);
  for (const auto& win : w) {
    EXPECT_EQ(win.future.size(), 60u);
    EXPECT_FALSE(win.history.empty());
    EXPECT_NEAR(win.history.back().px, 2 * win.t0, 1e-9);
    EXPECT_NEAR(win.future.back().x, 2 * (win.t0 + 6.0), 1e-9);
    EXPECT_LE(win.history.size(), 11u);
  }
}

TEST(Windows, WarmupAndGlobalAlignment) {
  const auto scene = scene_with({track_from("a", times(0.3, 10.3, 0.1), [](double t) { return t; },
                                            [](double) { return 0.0; })});
  const auto plain = make_windows(scene, 0.5, 6.0, 0.0);
  ASSERT_FALSE(plain.empty());
  EXPECT_DOUBLE_EQ(plain.front().t0, 0.5);
  const auto warm = make_windows(scene, 0.5, 6.0, 2.0);
  ASSERT_EQ(warm.size(), 4u);
  EXPECT_DOUBLE_EQ(warm.front().t0, 2.5);
  EXPECT_DOUBLE_EQ(warm.back().t0, 4.0);
}

TEST(Windows, CoarsePredictionStepSubsamplesFuture) {
  const auto scene = scene_with({track_from("a", times(0.0, 10.0, 0.1), [](double t) { return t; },
                                            [](double) { return 0.0; })});
  const auto w = make_windows(scene, 0.5, 6.0, 0.0, 0.2);
  ASSERT_FALSE(w.empty());
  EXPECT_EQ(w[0].future.size(), 30u);
  EXPECT_NEAR(w[0].future[0].x, 0.2, 1e-9);
}

TEST(Windows, InvalidGridMultiplesThrow) {
  const auto scene = scene_with({});
  EXPECT_THROW(make_windows(scene, 0.25, 6.0, 0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(make_windows(scene, 0.5, 6.05, 0.0), std::invalid_argument);
  EXPECT_THROW(make_windows(scene, 0.0, 6.0, 0.0), std::invalid_argument);
  EXPECT_TRUE(make_windows(scene, 0.5, 6.0, 0.0).empty());
}

TEST(Scene, FindAndShortTracksDropped) {
  RawTrack tiny;
  tiny.agent_id = "tiny";
  tiny.samples = {{0.01, 0, 0, {}, {}}, {0.02, 0, 0, {}, {}}};
  const auto scene = scene_with({tiny, track_from("b", times(0.0, 1.0, 0.1), [](double t) { return t; },
                                                  [](double) { return 0.0; })});
  ASSERT_EQ(scene.tracks.size(), 1u);
  EXPECT_NE(scene.find("b"), nullptr);
  EXPECT_EQ(scene.find("tiny"), nullptr);
}

}  // namespace
}  // namespace glk
