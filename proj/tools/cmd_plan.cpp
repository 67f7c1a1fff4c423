#include <cstdio>
#include <filesystem>

#include "commands.hpp"
#include "gpsar/io/config_io.hpp"

namespace gpsar::cli {

void setup_plan(CLI::App* app, GlobalArgs* globals) {
  auto mission_path = std::make_shared<std::string>();
  app->add_option("mission", *mission_path, "Mission JSON")->required();

  app->callback([app, mission_path, globals]() {
    (void)app;
    const traj::MissionConfig config = io::read_mission(*mission_path);
    const traj::Mission mission = traj::plan_mission(config);

    std::filesystem::create_directories(globals->out);
    const auto out = std::filesystem::path(globals->out);
    io::write_trajectory(out / "trajectory.json", mission.trajectory);
    io::write_mask(out / "mask.json", mission.mask);
    std::printf("planned %zu segments, %zu measurement windows, %.1f s\n",
                mission.trajectory.segments.size(), mission.mask.size(),
                mission.trajectory.duration());
  });
}

}  // namespace gpsar::cli
