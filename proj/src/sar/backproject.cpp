#include <cmath>
#include <cstdio>
#include <thread>

#include "gpsar/sar/sar.hpp"

namespace gpsar::sar {

namespace {

inline void phase_sincos(double x, double* s, double* c) {
#if defined(__GNUC__) && defined(__linux__)
  ::sincos(x, s, c);
#else
  *s = std::sin(x);
  *c = std::cos(x);
#endif
}

struct ActivePulse {
  const std::complex<float>* samples = nullptr;
  Vec3 tx = Vec3::Zero();
  Vec3 rx = Vec3::Zero();
  double weight = 0.0;
  bool monostatic = true;
};

}  // namespace

VoxelImage backproject(const PulseSet& pulses,
                       const std::vector<PulsePose>& poses,
                       const std::vector<std::pair<double, double>>& mask,
                       const VoxelImage& grid_spec, const SarConfig& cfg,
                       const BackprojectOptions& opts) {
  if (poses.size() != pulses.pulses.size()) {
    throw ConfigError("pose count does not match pulse count");
  }
  VoxelImage image = grid_spec;
  image.data.assign(static_cast<size_t>(image.nx) * image.ny * image.nz,
                    std::complex<double>(0.0, 0.0));

  // Select contributing pulses and their normalization weights.
  std::vector<ActivePulse> active;
  std::vector<double> active_times;
  active.reserve(pulses.pulses.size());
  for (size_t i = 0; i < pulses.pulses.size(); ++i) {
    const RadarPulse& p = pulses.pulses[i];
    if (p.saturated || !in_mask(mask, p.t)) continue;
    if (static_cast<int>(p.samples.size()) != pulses.header.num_bins) {
      throw ConfigError("pulse sample count does not match header");
    }
    ActivePulse ap;
    ap.samples = p.samples.data();
    ap.tx = poses[i].tx.translation();
    ap.rx = poses[i].rx.translation();
    ap.monostatic = (ap.tx - ap.rx).norm() < 1e-12;
    active.push_back(ap);
    active_times.push_back(p.t);
  }
  if (active.empty()) {
    std::fprintf(stderr,
                 "backproject warning: no pulses inside the mask windows\n");
    return image;
  }
  const std::vector<double> weights =
      uniform_weights(active_times, cfg.weighting);
  for (size_t i = 0; i < active.size(); ++i) active[i].weight = weights[i];

  const double k_phase = 2.0 * M_PI * cfg.f_c / cfg.c;
  const double inv_spacing = 1.0 / pulses.header.bin_spacing;
  const double start_range = pulses.header.start_range;
  const int num_bins = pulses.header.num_bins;
  const bool free_space = cfg.eps_r <= 1.0;

  const int rows = image.ny * image.nz;
  auto process_rows = [&](int row_begin, int row_end) {
    for (const ActivePulse& ap : active) {
      for (int row = row_begin; row < row_end; ++row) {
        const int iz = row / image.ny;
        const int iy = row % image.ny;
        const double cy = image.origin.y() + (iy + 0.5) * image.cell;
        const double cz = image.origin.z() + (iz + 0.5) * image.cell;
        std::complex<double>* out = &image.data[image.index(0, iy, iz)];

        const double dy_tx = cy - ap.tx.y(), dz_tx = cz - ap.tx.z();
        const double dy_rx = cy - ap.rx.y(), dz_rx = cz - ap.rx.z();
        const double yz_tx = dy_tx * dy_tx + dz_tx * dz_tx;
        const double yz_rx = dy_rx * dy_rx + dz_rx * dz_rx;

        for (int ix = 0; ix < image.nx; ++ix) {
          const double cx = image.origin.x() + (ix + 0.5) * image.cell;
          double path;
          if (free_space) {
            const double dx_tx = cx - ap.tx.x();
            const double r_tx = std::sqrt(dx_tx * dx_tx + yz_tx);
            double r_rx = r_tx;
            if (!ap.monostatic) {
              const double dx_rx = cx - ap.rx.x();
              r_rx = std::sqrt(dx_rx * dx_rx + yz_rx);
            }
            path = r_tx + r_rx + 2.0 * cfg.range_bias;
          } else {
            const Vec3 cell(cx, cy, cz);
            path = optical_path(ap.tx, cell, cfg) +
                   optical_path(ap.rx, cell, cfg) + 2.0 * cfg.range_bias;
          }

          // Sample the range-compressed signal at the expected one-way
          // range, linear between bins.
          const double u = (0.5 * path - start_range) * inv_spacing;
          if (u < 0.0 || u > num_bins - 1.001) continue;
          const int bin = static_cast<int>(u);
          const double frac = u - bin;
          const std::complex<float> s0 = ap.samples[bin];
          const std::complex<float> s1 = ap.samples[bin + 1];
          const double re = (1.0 - frac) * s0.real() + frac * s1.real();
          const double im = (1.0 - frac) * s0.imag() + frac * s1.imag();

          double sp, cp;
          phase_sincos(k_phase * path, &sp, &cp);
          // (re + j im) * (cp - j sp), scaled by the pulse weight.
          out[ix] += std::complex<double>(
              ap.weight * (re * cp + im * sp),
              ap.weight * (im * cp - re * sp));
        }
      }
    }
  };

  const int workers = std::max(1, opts.workers);
  if (workers == 1 || rows < 2) {
    process_rows(0, rows);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (rows + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(rows, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(process_rows, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return image;
}

VoxelImage coherent_add(const std::vector<VoxelImage>& images) {
  if (images.empty()) throw ConfigError("coherent_add needs images");
  VoxelImage out = images.front();
  for (size_t i = 1; i < images.size(); ++i) {
    if (!out.same_grid(images[i])) {
      throw ConfigError("coherent_add grid mismatch");
    }
    for (size_t k = 0; k < out.data.size(); ++k) {
      out.data[k] += images[i].data[k];
    }
  }
  return out;
}

}  // namespace gpsar::sar
