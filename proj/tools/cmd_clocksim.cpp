#include <cstdio>
#include <filesystem>

#include "commands.hpp"
#include "gpsar/clock/servo.hpp"

namespace gpsar::cli {

void setup_clocksim(CLI::App* app, GlobalArgs* globals) {
  auto tau0_us = std::make_shared<double>(6.0);
  auto steps = std::make_shared<int>(300);
  app->add_option("--tau0", *tau0_us, "Initial offset, microseconds")
      ->capture_default_str();
  app->add_option("--steps", *steps, "Simulated seconds")
      ->capture_default_str();

  app->callback([=]() {
    const clk::OscillatorTruth truth;
    const auto series = clk::simulate_servo(truth, *tau0_us * 1e-6, *steps,
                                            globals->seed);

    std::filesystem::create_directories(globals->out);
    const auto path = std::filesystem::path(globals->out) / "clock.csv";
    FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw ConfigError("cannot open " + path.string());
    std::fputs("t,tau_true,tau_est,v_dac\n", f);
    for (const auto& s : series) {
      std::fprintf(f, "%.3f,%.12g,%.12g,%.12g\n", s.t, s.tau_true, s.tau_est,
                   s.v_dac);
    }
    std::fclose(f);
    std::printf("servo: final |tau| %.3g us after %d s\n",
                std::abs(series.back().tau_true) * 1e6, *steps);
  });
}

}  // namespace gpsar::cli
