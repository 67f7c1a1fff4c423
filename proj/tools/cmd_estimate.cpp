#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "gpsar/io/config_io.hpp"
#include "gpsar/io/streams.hpp"

namespace gpsar::cli {

namespace {

// Position RMSE of the estimate series against interpolated truth poses.
double rmse_vs_truth(const std::vector<est::TimedPose>& truth,
                     const std::vector<est::NavState>& states) {
  if (truth.empty() || states.empty()) return -1.0;
  double sum = 0.0;
  int count = 0;
  size_t j = 0;
  for (const auto& s : states) {
    while (j + 1 < truth.size() && truth[j + 1].t <= s.t) ++j;
    if (j + 1 >= truth.size()) break;
    const double alpha =
        (s.t - truth[j].t) / std::max(truth[j + 1].t - truth[j].t, 1e-12);
    const Vec3 p = (1.0 - alpha) * truth[j].pose.translation() +
                   alpha * truth[j + 1].pose.translation();
    sum += (s.position - p).squaredNorm();
    ++count;
  }
  return count > 0 ? std::sqrt(sum / count) : -1.0;
}

}  // namespace

void setup_estimate(CLI::App* app, GlobalArgs* globals) {
  auto streams_dir = std::make_shared<std::string>();
  auto config_path = std::make_shared<std::string>();
  auto mode = std::make_shared<std::string>("full");
  auto single_receiver = std::make_shared<bool>(false);
  auto heading_offset_deg = std::make_shared<double>(0.0);
  auto window = std::make_shared<double>(-1.0);
  auto truth_path = std::make_shared<std::string>();

  app->add_option("streams", *streams_dir, "Directory with sensor CSV files")
      ->required();
  app->add_option("--config", *config_path, "Estimator config JSON");
  app->add_option("--mode", *mode, "full | online-only")
      ->check(CLI::IsMember({"full", "online-only"}));
  app->add_flag("--single-receiver", *single_receiver,
                "Drop moving-baseline factors");
  app->add_option("--heading-offset", *heading_offset_deg,
                  "Initial heading offset, degrees");
  app->add_option("--window", *window, "Sliding window, seconds");
  app->add_option("--truth", *truth_path, "Truth poses CSV for diagnostics");

  app->callback([=]() {
    const auto dir = std::filesystem::path(*streams_dir);
    est::SensorStreams streams;
    streams.imu = io::read_imu_csv(dir / "imu.csv");
    streams.gnss_pos = io::read_gnss_pos_csv(dir / "gnss_pos.csv");
    if (std::filesystem::exists(dir / "gnss_mb.csv")) {
      streams.gnss_mb = io::read_gnss_mb_csv(dir / "gnss_mb.csv");
    }

    est::EstimatorOptions opts = config_path->empty()
                                     ? io::default_estimator_options()
                                     : io::read_estimator_options(*config_path);
    if (*single_receiver) opts.use_moving_baseline = false;
    if (*heading_offset_deg != 0.0) {
      opts.heading_offset = *heading_offset_deg * M_PI / 180.0;
    }
    if (*window > 0.0) opts.window = *window;
    opts.run_batch = (*mode == "full");

    const est::EstimationResult result = est::run_estimation(streams, opts);

    std::filesystem::create_directories(globals->out);
    const auto out = std::filesystem::path(globals->out);
    const est::Values& solution = opts.run_batch ? result.batch : result.online;
    const auto poses = est::predict_intermediate(
        solution, result.epoch_times, streams.imu, opts.noise.gravity_vec());
    io::write_poses_csv(out / "poses.csv", poses);

    const est::Calibration calib =
        solution.calibration_at(solution.num_epochs() - 1);
    nlohmann::json calib_json{
        {"accel_bias",
         {calib.accel_bias.x(), calib.accel_bias.y(), calib.accel_bias.z()}},
        {"gyro_bias",
         {calib.gyro_bias.x(), calib.gyro_bias.y(), calib.gyro_bias.z()}},
        {"lever_pos",
         {calib.lever_pos.x(), calib.lever_pos.y(), calib.lever_pos.z()}},
        {"lever_mb",
         {calib.lever_mb.x(), calib.lever_mb.y(), calib.lever_mb.z()}},
        {"bias_marginal_std",
         {result.bias_marginal_std[0], result.bias_marginal_std[1],
          result.bias_marginal_std[2], result.bias_marginal_std[3],
          result.bias_marginal_std[4], result.bias_marginal_std[5]}},
        {"lever_marginal_std",
         {result.lever_marginal_std[0], result.lever_marginal_std[1],
          result.lever_marginal_std[2], result.lever_marginal_std[3],
          result.lever_marginal_std[4], result.lever_marginal_std[5]}}};
    std::ofstream cf(out / "calibration.json");
    cf << calib_json.dump(2) << "\n";

    nlohmann::json diag{
        {"epochs", result.epoch_times.size()},
        {"mode", *mode},
        {"single_receiver", *single_receiver},
        {"heading_offset_deg", *heading_offset_deg},
        {"batch_cost", result.batch_cost},
        {"online_cost_full_graph", result.online_cost_full_graph},
        {"batch_iterations", result.batch_stats.iterations},
        {"batch_converged", result.batch_stats.converged},
        {"notes", result.diagnostics}};
    if (!truth_path->empty()) {
      const auto truth = io::read_poses_csv(*truth_path);
      diag["online_rmse_m"] = rmse_vs_truth(truth, result.online.states);
      diag["batch_rmse_m"] = rmse_vs_truth(truth, result.batch.states);
    }
    std::ofstream df(out / "diagnostics.json");
    df << diag.dump(2) << "\n";

    std::printf("estimated %zu epochs, batch cost %.6g\n",
                result.epoch_times.size(), result.batch_cost);
  });
}

}  // namespace gpsar::cli
