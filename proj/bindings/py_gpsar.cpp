#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpsar/clock/servo.hpp"
#include "gpsar/control/altitude_filter.hpp"
#include "gpsar/estimator/init.hpp"
#include "gpsar/sar/sar.hpp"
#include "gpsar/trajectory/planner.hpp"

namespace py = pybind11;
using namespace gpsar;

PYBIND11_MODULE(_gpsar, m) {
  m.doc() = "GPSAR toolkit core bindings";

  // geometry
  m.def("so3_exp", [](const Vec3& w) { return so3_exp(w).matrix(); },
        py::arg("omega"), "Rodrigues exponential map, returns a 3x3 matrix");
  m.def("so3_log", [](const Mat3& r) { return Rot3(r).log(); }, py::arg("r"));
  m.def("skew", &skew, py::arg("v"));

  // trajectory
  m.def("circle_vertex_count", &traj::circle_vertex_count, py::arg("theta"),
        py::arg("deviation"));

  py::class_<traj::FlatState>(m, "FlatState")
      .def_readonly("position", &traj::FlatState::position)
      .def_readonly("velocity", &traj::FlatState::velocity)
      .def_readonly("acceleration", &traj::FlatState::acceleration)
      .def_readonly("jerk", &traj::FlatState::jerk)
      .def_readonly("yaw", &traj::FlatState::yaw)
      .def_readonly("yaw_rate", &traj::FlatState::yaw_rate);

  py::class_<traj::Trajectory>(m, "Trajectory")
      .def_property_readonly("duration", &traj::Trajectory::duration)
      .def_property_readonly(
          "start_time",
          [](const traj::Trajectory& t) { return t.start_time; })
      .def("sample", &traj::Trajectory::sample, py::arg("t"))
      .def("num_segments",
           [](const traj::Trajectory& t) { return t.segments.size(); });

  py::class_<traj::Mission>(m, "Mission")
      .def_readonly("trajectory", &traj::Mission::trajectory)
      .def_readonly("mask", &traj::Mission::mask);

  m.def(
      "plan_circle_mission",
      [](const Vec3& center, double radius, double speed, double deviation,
         int laps) {
        traj::MissionConfig config;
        for (int i = 0; i < laps; ++i) {
          traj::CirclePlan plan;
          plan.center = center;
          plan.radius = radius;
          plan.speed = speed;
          plan.deviation = deviation;
          config.primitives.emplace_back(plan);
        }
        return traj::plan_mission(config);
      },
      py::arg("center"), py::arg("radius") = 7.5, py::arg("speed") = 1.0,
      py::arg("deviation") = 0.02, py::arg("laps") = 1,
      "Plan a circular measurement mission with run-up and braking");

  // clock servo
  m.def("max_imu_delay", &clk::max_imu_delay, py::arg("innovation"),
        py::arg("jerk_max"), py::arg("gnss_period"));
  m.def("lqr_gain", &clk::lqr_gain, py::arg("c"), py::arg("dt"),
        py::arg("q_lqr"), py::arg("r_lqr"));
  m.def(
      "simulate_servo",
      [](double tau0, int steps, uint64_t seed) {
        const auto series =
            clk::simulate_servo(clk::OscillatorTruth{}, tau0, steps, seed);
        std::vector<std::tuple<double, double, double, double>> out;
        out.reserve(series.size());
        for (const auto& s : series) {
          out.emplace_back(s.t, s.tau_true, s.tau_est, s.v_dac);
        }
        return out;
      },
      py::arg("tau0"), py::arg("steps") = 300, py::arg("seed") = 1,
      "Returns (t, tau_true, tau_est, v_dac) tuples");

  // altitude filter
  py::class_<ctrl::AltitudeFilterState>(m, "AltitudeFilterState")
      .def(py::init<>())
      .def_readwrite("agl", &ctrl::AltitudeFilterState::agl)
      .def_readwrite("variance", &ctrl::AltitudeFilterState::variance);
  m.def("alt_predict", &ctrl::alt_predict, py::arg("state"),
        py::arg("delta_z"), py::arg("process_noise"));
  m.def(
      "alt_update",
      [](const ctrl::AltitudeFilterState& state, double range, double roll,
         double pitch) {
        const auto out = ctrl::alt_update(state, range, roll, pitch,
                                          ctrl::AltimeterParams{});
        return std::make_pair(out.state, out.accepted);
      },
      py::arg("state"), py::arg("range"), py::arg("roll"), py::arg("pitch"));

  // estimator building blocks
  m.def(
      "triad_init",
      [](const Vec3& accel, const Vec3& baseline_i, const Vec3& baseline_b) {
        return est::triad_init(accel, baseline_i, baseline_b).matrix();
      },
      py::arg("accel_standstill"), py::arg("baseline_inertial"),
      py::arg("baseline_body"));

  // sar
  m.def(
      "expected_phase",
      [](const Vec3& tx, const Vec3& rx, const Vec3& cell, double f_c,
         double eps_r, double surface_z) {
        sar::SarConfig cfg;
        cfg.f_c = f_c;
        cfg.eps_r = eps_r;
        cfg.surface_z = surface_z;
        const auto out = sar::expected_phase(Pose3(Rot3(), tx),
                                             Pose3(Rot3(), rx), cell, cfg);
        return std::make_tuple(out.phase, out.delay, out.path);
      },
      py::arg("tx"), py::arg("rx"), py::arg("cell"), py::arg("f_c") = 2.5e9,
      py::arg("eps_r") = 1.0, py::arg("surface_z") = 0.0,
      "Returns (phase, delay, two-way optical path)");

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "GpsarNumericalError");
}
