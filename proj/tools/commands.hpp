#pragma once

#include <CLI11.hpp>

namespace gpsar::cli {

// Shared flags threaded through every stage.
struct GlobalArgs {
  uint64_t seed = 1;
  std::string out = ".";
  int workers = 1;
};

void setup_plan(CLI::App* app, GlobalArgs* globals);
void setup_simulate(CLI::App* app, GlobalArgs* globals);
void setup_estimate(CLI::App* app, GlobalArgs* globals);
void setup_backproject(CLI::App* app, GlobalArgs* globals);
void setup_clocksim(CLI::App* app, GlobalArgs* globals);
void setup_report(CLI::App* app, GlobalArgs* globals);

}  // namespace gpsar::cli
