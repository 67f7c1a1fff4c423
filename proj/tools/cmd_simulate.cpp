#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "gpsar/io/config_io.hpp"
#include "gpsar/io/streams.hpp"

namespace gpsar::cli {

void setup_simulate(CLI::App* app, GlobalArgs* globals) {
  auto scenario_path = std::make_shared<std::string>();
  auto trajectory_path = std::make_shared<std::string>();
  app->add_option("scenario", *scenario_path, "Scenario JSON")->required();
  app->add_option("--trajectory", *trajectory_path,
                  "Planned trajectory for source=planned");

  app->callback([scenario_path, trajectory_path, globals]() {
    sim::ScenarioConfig config = io::read_scenario(*scenario_path);
    config.seed = globals->seed;

    traj::Trajectory planned;
    const traj::Trajectory* planned_ptr = nullptr;
    if (!trajectory_path->empty()) {
      planned = io::read_trajectory(*trajectory_path);
      planned_ptr = &planned;
    }
    const sim::ScenarioOutput output = sim::run_scenario(config, planned_ptr);

    std::filesystem::create_directories(globals->out);
    const auto out = std::filesystem::path(globals->out);
    io::write_imu_csv(out / "imu.csv", output.streams.imu);
    io::write_gnss_pos_csv(out / "gnss_pos.csv", output.streams.gnss_pos);
    io::write_gnss_mb_csv(out / "gnss_mb.csv", output.streams.gnss_mb);
    io::write_attitude_csv(out / "dji_att.csv", output.dji_attitude);

    std::vector<est::TimedPose> truth_poses;
    truth_poses.reserve(output.truth.size());
    for (size_t k = 0; k < output.truth.size(); ++k) {
      truth_poses.push_back({output.truth.t[k], output.truth.pose(k)});
    }
    io::write_poses_csv(out / "truth_poses.csv", truth_poses);
    if (!output.pulses.pulses.empty()) {
      io::write_pulse_file(out / "pulses.bin", output.pulses);
    }
    if (!output.mask.empty()) {
      io::write_mask(out / "mask.json", output.mask);
    }

    nlohmann::json manifest{{"seed", config.seed},
                            {"scenario", *scenario_path},
                            {"files", nlohmann::json::object()}};
    for (const auto& name :
         {"imu.csv", "gnss_pos.csv", "gnss_mb.csv", "dji_att.csv",
          "truth_poses.csv"}) {
      manifest["files"][name] = io::file_checksum(out / name);
    }
    if (!output.pulses.pulses.empty()) {
      manifest["files"]["pulses.bin"] = io::file_checksum(out / "pulses.bin");
    }
    std::ofstream mf(out / "manifest.json");
    mf << manifest.dump(2) << "\n";

    std::printf("simulated %zu imu, %zu gnss, %zu mb, %zu pulses\n",
                output.streams.imu.size(), output.streams.gnss_pos.size(),
                output.streams.gnss_mb.size(), output.pulses.pulses.size());
  });
}

}  // namespace gpsar::cli
