#include <cmath>

#include "gpsar/sar/sar.hpp"

namespace gpsar::sar {

double optical_path(const Vec3& antenna, const Vec3& point,
                    const SarConfig& cfg) {
  const double geometric = (point - antenna).norm();
  if (cfg.eps_r <= 1.0 || point.z() >= cfg.surface_z) {
    return geometric;
  }
  // Antenna above, point below: split the straight segment at the plane.
  const double dz = antenna.z() - point.z();
  if (dz <= 0.0) {
    // Both below: the whole path is in the slow medium.
    return std::sqrt(cfg.eps_r) * geometric;
  }
  const double frac_above = (antenna.z() - cfg.surface_z) / dz;
  const double d_above = frac_above * geometric;
  const double d_below = geometric - d_above;
  return d_above + std::sqrt(cfg.eps_r) * d_below;
}

PhaseResult expected_phase(const Pose3& tx, const Pose3& rx, const Vec3& cell,
                           const SarConfig& cfg) {
  const double min_range = 1e-3;
  if ((cell - tx.translation()).norm() < min_range ||
      (cell - rx.translation()).norm() < min_range) {
    throw NumericalError("image cell degenerate with an antenna position");
  }
  PhaseResult out;
  out.path = optical_path(tx.translation(), cell, cfg) +
             optical_path(rx.translation(), cell, cfg) + 2.0 * cfg.range_bias;
  out.delay = out.path / cfg.c;
  out.phase = std::fmod(2.0 * M_PI * cfg.f_c * out.delay, 2.0 * M_PI);
  return out;
}

std::vector<double> uniform_weights(const std::vector<double>& pulse_times,
                                    SarConfig::Weighting mode) {
  const size_t n = pulse_times.size();
  std::vector<double> w(n, 0.0);
  if (n == 0) return w;
  if (mode == SarConfig::Weighting::kUniform) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
    return w;
  }

  // Density compensation: weight by the inverse local rate in +-0.1 s.
  const double half_window = 0.1;
  double total = 0.0;
  size_t lo = 0, hi = 0;
  for (size_t i = 0; i < n; ++i) {
    while (lo < n && pulse_times[lo] < pulse_times[i] - half_window) ++lo;
    while (hi < n && pulse_times[hi] <= pulse_times[i] + half_window) ++hi;
    w[i] = 1.0 / static_cast<double>(hi - lo);
    total += w[i];
  }
  for (auto& x : w) x /= total;
  return w;
}

bool in_mask(const std::vector<std::pair<double, double>>& mask, double t) {
  if (mask.empty()) return true;
  for (const auto& [a, b] : mask) {
    if (t >= a && t <= b) return true;
  }
  return false;
}

}  // namespace gpsar::sar
