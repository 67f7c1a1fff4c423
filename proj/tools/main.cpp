#include <cstdio>

#include "commands.hpp"
#include "gpsar/core/types.hpp"

// Exit codes: 0 success, 2 user or configuration error, 3 numerical failure.
int main(int argc, char** argv) {
  CLI::App app{"GPSAR toolkit: plan, simulate, estimate, backproject"};
  app.require_subcommand(1);

  gpsar::cli::GlobalArgs globals;
  app.add_option("--seed", globals.seed, "Random seed")->capture_default_str();
  app.add_option("--out", globals.out, "Output directory")
      ->capture_default_str();
  app.add_option("--workers", globals.workers, "Worker threads")
      ->capture_default_str();

  gpsar::cli::setup_plan(app.add_subcommand("plan", "Plan a mission"),
                         &globals);
  gpsar::cli::setup_simulate(
      app.add_subcommand("simulate", "Generate sensor streams"), &globals);
  gpsar::cli::setup_estimate(
      app.add_subcommand("estimate", "Run the localization pipeline"),
      &globals);
  gpsar::cli::setup_backproject(
      app.add_subcommand("backproject", "Form the radar image"), &globals);
  gpsar::cli::setup_clocksim(
      app.add_subcommand("clocksim", "Simulate the clock servo"), &globals);
  gpsar::cli::setup_report(
      app.add_subcommand("report", "Summarize stage outputs"), &globals);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const gpsar::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gpsar::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
