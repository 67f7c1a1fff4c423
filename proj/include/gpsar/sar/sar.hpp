#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "gpsar/core/pose3.hpp"

namespace gpsar::sar {

// One range-compressed chirp. Samples index one-way range bins:
// bin b sits at start_range + b * bin_spacing meters.
struct RadarPulse {
  double t = 0.0;
  std::vector<std::complex<float>> samples;
  bool saturated = false;
};

struct PulseHeader {
  int num_bins = 256;
  double bin_spacing = 0.05;  // m, c / (2 * bandwidth)
  double start_range = 0.0;   // m
  double f_c = 2.5e9;         // Hz
};

struct PulseSet {
  PulseHeader header;
  std::vector<RadarPulse> pulses;
};

inline constexpr double kSpeedOfLight = 299792458.0;

struct SarConfig {
  double f_c = 2.5e9;
  double c = kSpeedOfLight;
  double eps_r = 1.0;          // relative permittivity below the surface
  double surface_z = 0.0;      // surface plane height, m
  double range_bias = 0.0;     // added per one-way path (imaging side only)
  enum class Weighting { kUniform, kDensity } weighting = Weighting::kUniform;
};

// Complex-amplitude voxel grid. origin is the grid corner; cell centers sit
// at origin + (i + 0.5) * cell. Storage row-major, x fastest.
struct VoxelImage {
  Vec3 origin = Vec3::Zero();
  double cell = 0.01;
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::complex<double>> data;

  size_t index(int ix, int iy, int iz) const {
    return static_cast<size_t>((iz * ny + iy) * nx + ix);
  }
  Vec3 cell_center(int ix, int iy, int iz) const {
    return origin + Vec3((ix + 0.5) * cell, (iy + 0.5) * cell,
                         (iz + 0.5) * cell);
  }
  bool same_grid(const VoxelImage& other) const {
    return (origin - other.origin).norm() < 1e-12 &&
           std::abs(cell - other.cell) < 1e-15 && nx == other.nx &&
           ny == other.ny && nz == other.nz;
  }
};

// Straight-ray two-layer optical path: below the surface plane the slowness
// scales with sqrt(eps_r), no refraction bend. Returns the one-way optical
// length from the antenna to the point.
double optical_path(const Vec3& antenna, const Vec3& point,
                    const SarConfig& cfg);

struct PhaseResult {
  double phase = 0.0;  // rad, mod 2 pi of 2 pi f_c * delay
  double delay = 0.0;  // s, two-way
  double path = 0.0;   // m, two-way optical length
};

// Expected phase of a point target in the cell for one TX/RX pose pair.
// Throws NumericalError when the cell (nearly) coincides with an antenna.
PhaseResult expected_phase(const Pose3& tx, const Pose3& rx, const Vec3& cell,
                           const SarConfig& cfg);

// Normalization weights over the unmasked pulses. Uniform: w = 1/N.
// Density: w inversely proportional to the pulse rate in a +-0.1 s window,
// normalized to sum 1.
std::vector<double> uniform_weights(const std::vector<double>& pulse_times,
                                    SarConfig::Weighting mode);

struct PulsePose {
  Pose3 tx;
  Pose3 rx;
};

struct BackprojectOptions {
  int workers = 1;
};

// Back projection per Eq. A = sum w S exp(-j phi): every unmasked,
// unsaturated pulse is sampled at the expected delay (linear interpolation
// between bins) and phase-compensated into each cell. Pulse->pose
// correspondence is positional; poses must already be interpolated.
VoxelImage backproject(const PulseSet& pulses,
                       const std::vector<PulsePose>& poses,
                       const std::vector<std::pair<double, double>>& mask,
                       const VoxelImage& grid_spec, const SarConfig& cfg,
                       const BackprojectOptions& opts = {});

// Cell-wise complex sum; grids must match exactly.
VoxelImage coherent_add(const std::vector<VoxelImage>& images);

struct FocusReport {
  int peak_ix = 0, peak_iy = 0, peak_iz = 0;
  Vec3 peak_position = Vec3::Zero();
  double peak_magnitude = 0.0;
  double pslr_db = 0.0;        // capped at 120 dB
  Vec3 width_3db = Vec3::Zero();  // m, per axis
};

// Peak, peak-to-sidelobe ratio outside a 5x5x5 exclusion zone, and -3 dB
// widths from 1D cuts through the peak.
FocusReport focus_metrics(const VoxelImage& image);

// True when t falls inside any mask window; an empty mask passes all.
bool in_mask(const std::vector<std::pair<double, double>>& mask, double t);

}  // namespace gpsar::sar
