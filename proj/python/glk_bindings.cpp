#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "glk/config.hpp"
#include "glk/geometry.hpp"
#include "glk/interaction.hpp"
#include "glk/metrics.hpp"
#include "glk/motion_models.hpp"
#include "glk/multimodal.hpp"
#include "glk/pipeline.hpp"

namespace py = pybind11;

namespace {

glk::KinematicState to_state(const std::array<double, 4>& x) { return {x[0], x[1], x[2], x[3]}; }

py::dict trace_to_dict(const glk::PredictionTrace& trace) {
  std::vector<double> t;
  std::vector<glk::Vector4> mean;
  std::vector<glk::Matrix4> cov;
  for (const auto& tp : trace) {
    t.push_back(tp.t);
    mean.push_back(tp.belief.mean);
    cov.push_back(tp.belief.cov);
  }
  py::dict d;
  d["t"] = t;
  d["mean"] = mean;
  d["cov"] = cov;
  return d;
}

glk::PredictionConfig make_cfg(double dt, double horizon) {
  glk::PredictionConfig cfg;
  cfg.dt = dt;
  cfg.horizon = horizon;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_glk, m) {
  m.doc() = "Lane-keeping trajectory prediction baselines";

  py::class_<glk::LaneProjection>(m, "LaneProjection")
      .def_readonly("s", &glk::LaneProjection::s)
      .def_readonly("d", &glk::LaneProjection::d)
      .def_readonly("theta_l", &glk::LaneProjection::theta_l);

  py::class_<glk::LaneCenterline>(m, "LaneCenterline")
      .def(py::init([](std::string id, const std::vector<std::pair<double, double>>& pts) {
             std::vector<glk::Point2> wp;
             for (auto [x, y] : pts) wp.push_back({x, y});
             return glk::LaneCenterline(std::move(id), std::move(wp));
           }),
           py::arg("id"), py::arg("waypoints"))
      .def_property_readonly("id", &glk::LaneCenterline::id)
      .def_property_readonly("length", &glk::LaneCenterline::length)
      .def("project",
           [](const glk::LaneCenterline& l, double x, double y) { return l.project({x, y}); })
      .def("frenet_to_cartesian",
           [](const glk::LaneCenterline& l, double s, double d) {
             const auto p = l.frenet_to_cartesian(s, d);
             return std::make_pair(p.x, p.y);
           })
      .def("tangent_angle", &glk::LaneCenterline::tangent_angle);

  m.def("cv_matrix", &glk::cv_matrix, py::arg("dt"));

  m.def(
      "cv_predict",
      [](const std::array<double, 4>& x0, double dt, double horizon, double cv_sq) {
        return trace_to_dict(
            glk::cv_predict(to_state(x0), make_cfg(dt, horizon), glk::NoiseConfig::uniform(cv_sq, 1.0)));
      },
      py::arg("x0"), py::arg("dt") = 0.1, py::arg("horizon") = 6.0, py::arg("sigma_cv_sq") = 0.25);

  m.def(
      "glk_predict",
      [](const std::array<double, 4>& x0, const glk::LaneCenterline& lane, double dt,
         double horizon, double cv_sq, double ls_sq) {
        return trace_to_dict(glk::glk_predict(to_state(x0), lane,
                                              glk::NoiseConfig::uniform(cv_sq, ls_sq),
                                              make_cfg(dt, horizon)));
      },
      py::arg("x0"), py::arg("lane"), py::arg("dt") = 0.1, py::arg("horizon") = 6.0,
      py::arg("sigma_cv_sq") = 0.25, py::arg("sigma_ls_sq") = 0.25);

  m.def(
      "ls_predict",
      [](const std::array<double, 4>& x0, const glk::LaneCenterline& lane, double dt,
         double horizon, double cv_sq, double ls_sq) {
        return trace_to_dict(glk::ls_predict(to_state(x0), lane,
                                             glk::NoiseConfig::uniform(cv_sq, ls_sq),
                                             make_cfg(dt, horizon)));
      },
      py::arg("x0"), py::arg("lane"), py::arg("dt") = 0.1, py::arg("horizon") = 6.0,
      py::arg("sigma_cv_sq") = 0.25, py::arg("sigma_ls_sq") = 0.25);

  m.def(
      "curvature_cv_predict",
      [](const std::array<double, 4>& x0, double delta_theta, double decay_rate, double dt,
         double horizon, double cv_sq) {
        glk::CurvatureConfig c;
        c.decay_rate = decay_rate;
        c.validate();
        return trace_to_dict(glk::curvature_cv_predict(to_state(x0), delta_theta, c,
                                                       make_cfg(dt, horizon),
                                                       glk::NoiseConfig::uniform(cv_sq, 1.0)));
      },
      py::arg("x0"), py::arg("delta_theta"), py::arg("decay_rate") = 0.9, py::arg("dt") = 0.1,
      py::arg("horizon") = 6.0, py::arg("sigma_cv_sq") = 0.25);

  m.def(
      "ls_jacobian",
      [](const std::array<double, 4>& x, double theta_l, double dt) {
        return glk::ls_jacobian(to_state(x), theta_l, dt);
      },
      py::arg("x"), py::arg("theta_l"), py::arg("dt"));

  py::class_<glk::IDMParams>(m, "IDMParams")
      .def(py::init<>())
      .def(py::init([](double v0, double s0, double s1, double t, double a, double b) {
             glk::IDMParams p{v0, s0, s1, t, a, b};
             p.validate();
             return p;
           }),
           py::arg("v0"), py::arg("s0"), py::arg("s1"), py::arg("t_headway"), py::arg("a_max"),
           py::arg("b"))
      .def_readwrite("v0", &glk::IDMParams::v0)
      .def_readwrite("s0", &glk::IDMParams::s0)
      .def_readwrite("s1", &glk::IDMParams::s1)
      .def_readwrite("t_headway", &glk::IDMParams::t_headway)
      .def_readwrite("a_max", &glk::IDMParams::a_max)
      .def_readwrite("b", &glk::IDMParams::b);

  m.def(
      "idm_accel",
      [](double v, const glk::IDMParams& p, std::optional<double> gap, double v_lead) {
        std::optional<glk::LeadInfo> lead;
        if (gap) lead = glk::LeadInfo{*gap, v_lead};
        return glk::idm_accel(v, p, lead);
      },
      py::arg("v"), py::arg("params"), py::arg("gap") = py::none(), py::arg("v_lead") = 0.0);

  py::class_<glk::ParticleSet>(m, "ParticleSet")
      .def("__len__", [](const glk::ParticleSet& ps) { return ps.particles.size(); })
      .def_property_readonly("weights",
                             [](const glk::ParticleSet& ps) {
                               std::vector<double> w;
                               for (const auto& p : ps.particles) w.push_back(p.weight);
                               return w;
                             })
      .def("effective_sample_size", &glk::ParticleSet::effective_sample_size)
      .def("best", &glk::pf_best);

  m.def(
      "pf_init", [](std::size_t n, std::uint64_t seed) { return glk::pf_init({}, n, seed); },
      py::arg("n") = 1000, py::arg("seed") = 0);
  m.def(
      "pf_update",
      [](const glk::ParticleSet& ps, double v, std::optional<double> gap, double v_lead,
         double observed, double sigma_a) {
        std::optional<glk::LeadInfo> lead;
        if (gap) lead = glk::LeadInfo{*gap, v_lead};
        return glk::pf_update(ps, v, lead, observed, sigma_a);
      },
      py::arg("ps"), py::arg("v"), py::arg("gap"), py::arg("v_lead"), py::arg("observed_accel"),
      py::arg("sigma_a") = 0.5);

  m.def(
      "ade_fde",
      [](const std::vector<std::pair<double, double>>& pred,
         const std::vector<std::pair<double, double>>& truth) {
        std::vector<glk::Point2> a, b;
        for (auto [x, y] : pred) a.push_back({x, y});
        for (auto [x, y] : truth) b.push_back({x, y});
        const auto e = glk::ade_fde(a, b);
        return std::make_pair(e.ade, e.fde);
      },
      py::arg("pred"), py::arg("truth"));

  m.def(
      "associate_lanes",
      [](const std::array<double, 4>& x, const std::vector<glk::LaneCenterline>& lanes,
         double d_max, double theta_max) {
        glk::AssociationThresholds th;
        th.d_max = d_max;
        th.theta_max = theta_max;
        std::vector<std::tuple<std::string, double, double>> out;
        for (const auto& a : glk::associate_lanes(to_state(x), lanes, th)) {
          out.emplace_back(a.lane_id, a.lateral_dist, a.heading_diff);
        }
        return out;
      },
      py::arg("x"), py::arg("lanes"), py::arg("d_max") = 3.5,
      py::arg("theta_max") = 3.14159265358979323846 / 6.0);

  m.def(
      "evaluate",
      [](const std::string& config_path, const std::string& out_dir) {
        glk::RunConfig cfg = glk::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        std::ostringstream log;
        const int code = glk::cmd_evaluate(cfg, log);
        return std::make_pair(code, log.str());
      },
      py::arg("config"), py::arg("out_dir") = "");
}
