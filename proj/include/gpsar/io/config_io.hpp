#pragma once

#include <string>

#include "gpsar/sim/scenario.hpp"
#include "gpsar/trajectory/planner.hpp"

namespace gpsar::io {

// Mission plan JSON: {"speed": .., "deviation": .., "limits": {..},
// "primitives": [{"type": "circle"|"stripmap", ...}]}. Schema errors carry
// the offending field.
traj::MissionConfig read_mission(const std::string& path);

void write_trajectory(const std::string& path, const traj::Trajectory& traj);
traj::Trajectory read_trajectory(const std::string& path);

void write_mask(const std::string& path,
                const std::vector<std::pair<double, double>>& mask);
std::vector<std::pair<double, double>> read_mask(const std::string& path);

sim::ScenarioConfig read_scenario(const std::string& path);

est::EstimatorOptions read_estimator_options(const std::string& path);
est::EstimatorOptions default_estimator_options();

}  // namespace gpsar::io
