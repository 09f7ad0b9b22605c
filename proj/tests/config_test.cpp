#include "glk/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace glk {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("glk_config_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return (path_ / name).string();
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(Models, NamesRoundTrip) {
  for (Model m : {Model::cv, Model::curv_cv, Model::ls_cv, Model::glk_cv, Model::ls_idm, Model::glk_idm}) {
    EXPECT_EQ(parse_model(model_name(m)), m);
  }
  EXPECT_FALSE(parse_model("kalman"));
  EXPECT_EQ(parse_model_list("cv, glk-cv,cv"), (std::vector<Model>{Model::cv, Model::glk_cv}));
  EXPECT_THROW(parse_model_list("cv,bogus"), ConfigError);
  EXPECT_THROW(parse_model_list(""), ConfigError);
  EXPECT_TRUE(uses_idm(Model::glk_idm));
  EXPECT_FALSE(uses_idm(Model::glk_cv));
}

TEST(Config, DefaultsAreValid) { EXPECT_NO_THROW(RunConfig{}.validate()); }

TEST(Config, LoadsSectionsAndResolvesRelativePaths) {
  TempDir dir;
  const auto path = dir.write("run.ini",
                              "[paths]\ntracks = data/t.csv\nlanes = /abs/lanes.csv\n"
                              "[run]\nmodels = cv,glk-idm\nhorizon = 4\nseed = 99\nmultimodal = false\n"
                              "[noise]\nsigma_cv_sq = 0.1\nsigma_ls_sq = 1,2,3,4\n"
                              "[pf]\nv0_range = 5,30\n"
                              "[dataset]\ntime = t\nunit_scale = 1\n");
  const RunConfig cfg = load_config(path);
  EXPECT_EQ(fs::path(cfg.tracks_path), (dir.path() / "data/t.csv").lexically_normal());
  EXPECT_EQ(cfg.lanes_path, "/abs/lanes.csv");
  EXPECT_EQ(cfg.models, (std::vector<Model>{Model::cv, Model::glk_idm}));
  EXPECT_DOUBLE_EQ(cfg.prediction.horizon, 4.0);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_FALSE(cfg.multimodal);
  EXPECT_TRUE(cfg.noise.sigma_cv_sq.isApprox(Vector4::Constant(0.1)));
  EXPECT_TRUE(cfg.noise.sigma_ls_sq.isApprox(Vector4(1, 2, 3, 4)));
  EXPECT_DOUBLE_EQ(cfg.pf.priors.v0.lo, 5.0);
  EXPECT_DOUBLE_EQ(cfg.pf.priors.v0.hi, 30.0);
  EXPECT_EQ(cfg.columns.time, "t");
  EXPECT_DOUBLE_EQ(cfg.unit_scale, 1.0);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RenderRoundTrips) {
  RunConfig cfg;
  cfg.tracks_path = "/data/tracks.csv";
  cfg.out_dir = "/data/out";
  cfg.models = {Model::curv_cv, Model::ls_idm};
  cfg.prediction.horizon = 3.0;
  cfg.noise.sigma_cv_sq = Vector4(0.1, 0.2, 0.3, 0.123456789);
  cfg.thresholds.theta_max = 0.4;
  cfg.pf.priors.b = {0.7, 3.3};
  cfg.columns.time = "time_s";
  cfg.seed = 12345678901234ULL;
  TempDir dir;
  const auto path = dir.write("manifest.ini", render_config(cfg));
  const RunConfig back = load_config(path);
  EXPECT_EQ(render_config(back), render_config(cfg));
  EXPECT_EQ(back.noise.sigma_cv_sq[3], 0.123456789);
  EXPECT_EQ(back.seed, cfg.seed);
}

TEST(Config, RejectsUnknownAndMalformed) {
  TempDir dir;
  EXPECT_THROW(load_config(dir.write("a.ini", "[run]\nhorizn = 6\n")), ConfigError);
  EXPECT_THROW(load_config(dir.write("b.ini", "[bogus]\nx = 1\n")), ConfigError);
  EXPECT_THROW(load_config(dir.write("c.ini", "[run]\nhorizon = six\n")), ConfigError);
  EXPECT_THROW(load_config(dir.write("d.ini", "[noise]\nsigma_cv_sq = 1,2\n")), ConfigError);
  EXPECT_THROW(load_config(dir.write("e.ini", "[pf]\nb_range = 1\n")), ConfigError);
  EXPECT_THROW(load_config(dir.write("f.ini", "[run]\nmultimodal = maybe\n")), ConfigError);
  EXPECT_THROW(load_config(dir.write("g.ini", "[run\n")), ConfigError);
  EXPECT_THROW(load_config((dir.path() / "missing.ini").string()), ConfigError);
}

TEST(Config, ValidateCatchesInconsistencies) {
  RunConfig cfg;
  cfg.prediction.dt = 0.15;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.stride = 0.25;
  cfg.prediction.dt = 0.2;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.noise.sigma_ls_sq[2] = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.pf.priors.v0 = {10.0, 5.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.models.clear();
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace glk
