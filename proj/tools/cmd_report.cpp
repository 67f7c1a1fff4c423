#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "gpsar/core/types.hpp"

namespace gpsar::cli {

// Gathers the per-stage JSON products from a run directory into one
// report.json and prints a short summary.
void setup_report(CLI::App* app, GlobalArgs* globals) {
  auto run_dir = std::make_shared<std::string>(".");
  app->add_option("dir", *run_dir, "Run directory to summarize");

  app->callback([=]() {
    const auto dir = std::filesystem::path(*run_dir);
    nlohmann::json report = nlohmann::json::object();
    for (const auto& name :
         {"manifest.json", "diagnostics.json", "calibration.json",
          "focus_report.json"}) {
      const auto path = dir / name;
      if (!std::filesystem::exists(path)) continue;
      std::ifstream in(path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
      }
      report[name] = j;
    }
    if (report.empty()) {
      throw ConfigError("no stage outputs found in " + dir.string());
    }

    std::filesystem::create_directories(globals->out);
    std::ofstream out(std::filesystem::path(globals->out) / "report.json");
    out << report.dump(2) << "\n";

    for (const auto& [name, content] : report.items()) {
      std::printf("%s: %zu fields\n", name.c_str(), content.size());
    }
  });
}

}  // namespace gpsar::cli
