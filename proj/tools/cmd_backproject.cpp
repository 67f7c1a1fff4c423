#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "gpsar/io/config_io.hpp"
#include "gpsar/io/image_io.hpp"
#include "gpsar/io/streams.hpp"

namespace gpsar::cli {

namespace {

std::vector<sar::PulsePose> poses_at_pulses(
    const std::vector<est::TimedPose>& body, const Pose3& tx_ext,
    const Pose3& rx_ext, const sar::PulseSet& pulses) {
  std::vector<sar::PulsePose> out;
  out.reserve(pulses.pulses.size());
  size_t j = 0;
  for (const auto& p : pulses.pulses) {
    while (j + 1 < body.size() && body[j + 1].t <= p.t) ++j;
    if (p.t < body.front().t - 1e-6 || p.t > body.back().t + 1e-6) {
      throw ConfigError("pulse at t=" + std::to_string(p.t) +
                        " outside the pose series span");
    }
    Pose3 pose;
    if (j + 1 >= body.size()) {
      pose = body.back().pose;
    } else {
      const double alpha =
          (p.t - body[j].t) / std::max(body[j + 1].t - body[j].t, 1e-12);
      pose = body[j].pose.interpolate(body[j + 1].pose,
                                      std::clamp(alpha, 0.0, 1.0));
    }
    out.push_back({pose * tx_ext, pose * rx_ext});
  }
  return out;
}

}  // namespace

void setup_backproject(CLI::App* app, GlobalArgs* globals) {
  auto pulses_path = std::make_shared<std::string>();
  auto poses_path = std::make_shared<std::string>();
  auto mask_path = std::make_shared<std::string>();
  auto pose_source = std::make_shared<std::string>("file");
  auto streams_dir = std::make_shared<std::string>(".");
  auto grid_center = std::make_shared<std::vector<double>>();
  auto grid_size = std::make_shared<std::vector<double>>();
  auto cell = std::make_shared<double>(0.01);
  auto f_c = std::make_shared<double>(2.5e9);
  auto eps_r = std::make_shared<double>(1.0);
  auto surface_z = std::make_shared<double>(0.0);
  auto tx_lever = std::make_shared<std::vector<double>>();
  auto lever_offset = std::make_shared<std::vector<double>>();
  auto range_bias = std::make_shared<double>(0.0);
  auto weighting = std::make_shared<std::string>("uniform");

  app->add_option("pulses", *pulses_path, "GPSARv1 pulse file")->required();
  app->add_option("--poses", *poses_path, "Body pose CSV (1 kHz)");
  app->add_option("--pose-source", *pose_source,
                  "file | dji-rtk (interpolated RTK + autopilot attitude)")
      ->check(CLI::IsMember({"file", "dji-rtk"}));
  app->add_option("--streams", *streams_dir,
                  "Stream directory for --pose-source dji-rtk");
  app->add_option("--mask", *mask_path, "Measurement mask JSON");
  app->add_option("--center", *grid_center, "Grid center x,y,z (m)")
      ->expected(3);
  app->add_option("--size", *grid_size, "Grid extent x,y,z (m)")->expected(3);
  app->add_option("--cell", *cell, "Cell size (m)");
  app->add_option("--f-c", *f_c, "Center frequency (Hz)");
  app->add_option("--eps-r", *eps_r, "Relative permittivity below surface");
  app->add_option("--surface-z", *surface_z, "Surface plane height (m)");
  app->add_option("--tx-lever", *tx_lever, "Radar antenna lever arm in B")
      ->expected(3);
  app->add_option("--lever-offset", *lever_offset,
                  "Extrinsic corruption for the ablation study")
      ->expected(3);
  app->add_option("--range-bias", *range_bias, "One-way range bias (m)");
  app->add_option("--weighting", *weighting, "uniform | density")
      ->check(CLI::IsMember({"uniform", "density"}));

  app->callback([=]() {
    const sar::PulseSet pulses = io::read_pulse_file(*pulses_path);

    std::vector<std::pair<double, double>> mask;
    if (!mask_path->empty()) mask = io::read_mask(*mask_path);

    Vec3 tx(0.0, 0.0, -0.1);
    if (tx_lever->size() == 3) {
      tx = Vec3((*tx_lever)[0], (*tx_lever)[1], (*tx_lever)[2]);
    }
    const Pose3 tx_ext(Rot3(), tx);

    std::vector<sar::PulsePose> pulse_poses;
    if (*pose_source == "file") {
      if (poses_path->empty()) {
        throw ConfigError("--poses required for --pose-source file");
      }
      const auto body = io::read_poses_csv(*poses_path);
      pulse_poses = poses_at_pulses(body, tx_ext, tx_ext, pulses);
    } else {
      // DJI+RTK chain: T_IS = T_ID * T_DB * T_BS with the D frame anchored
      // at the position antenna.
      const auto dir = std::filesystem::path(*streams_dir);
      const auto att = io::read_attitude_csv(dir / "dji_att.csv");
      const auto gnss = io::read_gnss_pos_csv(dir / "gnss_pos.csv");
      est::EstimatorOptions defaults = io::default_estimator_options();
      Vec3 lever_pos = defaults.lever_prior.head<3>();
      if (lever_offset->size() == 3) {
        lever_pos += Vec3((*lever_offset)[0], (*lever_offset)[1],
                          (*lever_offset)[2]);
      }
      std::vector<std::pair<double, Rot3>> att_series(att.begin(), att.end());
      std::vector<std::pair<double, Vec3>> pos_series;
      pos_series.reserve(gnss.size());
      for (const auto& z : gnss) pos_series.emplace_back(z.t, z.position);
      std::vector<double> query;
      query.reserve(pulses.pulses.size());
      for (const auto& p : pulses.pulses) query.push_back(p.t);
      const Pose3 t_db(Rot3(), -lever_pos);
      const auto sensor = est::dji_rtk_compose(att_series, pos_series, t_db,
                                               tx_ext, query);
      pulse_poses.reserve(sensor.size());
      for (const auto& s : sensor) pulse_poses.push_back({s.pose, s.pose});
    }

    if (grid_center->size() != 3 || grid_size->size() != 3) {
      throw ConfigError("--center and --size are required");
    }
    sar::VoxelImage grid;
    grid.cell = *cell;
    grid.nx = std::max(1, static_cast<int>(std::round((*grid_size)[0] / *cell)));
    grid.ny = std::max(1, static_cast<int>(std::round((*grid_size)[1] / *cell)));
    grid.nz = std::max(1, static_cast<int>(std::round((*grid_size)[2] / *cell)));
    grid.origin = Vec3((*grid_center)[0] - 0.5 * grid.nx * *cell,
                       (*grid_center)[1] - 0.5 * grid.ny * *cell,
                       (*grid_center)[2] - 0.5 * grid.nz * *cell);

    sar::SarConfig cfg;
    cfg.f_c = *f_c;
    cfg.eps_r = *eps_r;
    cfg.surface_z = *surface_z;
    cfg.range_bias = *range_bias;
    cfg.weighting = *weighting == "density"
                        ? sar::SarConfig::Weighting::kDensity
                        : sar::SarConfig::Weighting::kUniform;

    sar::BackprojectOptions bp;
    bp.workers = globals->workers;
    const sar::VoxelImage image =
        sar::backproject(pulses, pulse_poses, mask, grid, cfg, bp);
    const sar::FocusReport report = sar::focus_metrics(image);

    std::filesystem::create_directories(globals->out);
    const auto out = std::filesystem::path(globals->out);
    io::write_image(out / "image", image, cfg.f_c, cfg.eps_r);
    io::write_magnitude_pgm(out / "image.pgm", image, image.nz / 2);

    nlohmann::json rj{
        {"peak_cell", {report.peak_ix, report.peak_iy, report.peak_iz}},
        {"peak_position",
         {report.peak_position.x(), report.peak_position.y(),
          report.peak_position.z()}},
        {"peak_magnitude", report.peak_magnitude},
        {"pslr_db", report.pslr_db},
        {"width_3db_m",
         {report.width_3db.x(), report.width_3db.y(), report.width_3db.z()}}};
    std::ofstream rf(out / "focus_report.json");
    rf << rj.dump(2) << "\n";

    std::printf("image %dx%dx%d peak %.4g at (%.3f, %.3f, %.3f), PSLR %.1f dB\n",
                image.nx, image.ny, image.nz, report.peak_magnitude,
                report.peak_position.x(), report.peak_position.y(),
                report.peak_position.z(), report.pslr_db);
  });
}

}  // namespace gpsar::cli
