#include <cmath>

#include "gpsar/sar/sar.hpp"

namespace gpsar::sar {

namespace {

// Half-power width of a 1D magnitude cut through the peak, by linear
// interpolation of the crossings; a single-cell peak reports one cell.
double cut_width(const std::vector<double>& cut, int peak, double cell) {
  const double half = cut[peak] * M_SQRT1_2;
  double left = peak, right = peak;
  for (int i = peak; i > 0; --i) {
    if (cut[i - 1] < half) {
      left = (i - 1) + (half - cut[i - 1]) / (cut[i] - cut[i - 1]);
      break;
    }
    left = i - 1;
  }
  for (int i = peak; i + 1 < static_cast<int>(cut.size()); ++i) {
    if (cut[i + 1] < half) {
      right = i + (cut[i] - half) / (cut[i] - cut[i + 1]);
      break;
    }
    right = i + 1;
  }
  return std::max(right - left, 1.0) * cell;
}

}  // namespace

FocusReport focus_metrics(const VoxelImage& image) {
  if (image.data.empty()) throw ConfigError("focus_metrics on empty image");

  FocusReport report;
  double best = -1.0;
  for (int iz = 0; iz < image.nz; ++iz) {
    for (int iy = 0; iy < image.ny; ++iy) {
      for (int ix = 0; ix < image.nx; ++ix) {
        const double mag = std::abs(image.data[image.index(ix, iy, iz)]);
        if (mag > best) {
          best = mag;
          report.peak_ix = ix;
          report.peak_iy = iy;
          report.peak_iz = iz;
        }
      }
    }
  }
  report.peak_magnitude = best;
  report.peak_position =
      image.cell_center(report.peak_ix, report.peak_iy, report.peak_iz);

  // Largest magnitude outside the 5x5x5 exclusion zone around the peak.
  double sidelobe = 0.0;
  for (int iz = 0; iz < image.nz; ++iz) {
    for (int iy = 0; iy < image.ny; ++iy) {
      for (int ix = 0; ix < image.nx; ++ix) {
        if (std::abs(ix - report.peak_ix) <= 2 &&
            std::abs(iy - report.peak_iy) <= 2 &&
            std::abs(iz - report.peak_iz) <= 2) {
          continue;
        }
        sidelobe = std::max(sidelobe,
                            std::abs(image.data[image.index(ix, iy, iz)]));
      }
    }
  }
  if (sidelobe <= 0.0 || best <= 0.0) {
    report.pslr_db = 120.0;
  } else {
    report.pslr_db = std::min(120.0, 20.0 * std::log10(best / sidelobe));
  }

  // -3 dB widths from axis cuts through the peak.
  std::vector<double> cut;
  cut.resize(image.nx);
  for (int ix = 0; ix < image.nx; ++ix) {
    cut[ix] = std::abs(image.data[image.index(ix, report.peak_iy,
                                              report.peak_iz)]);
  }
  report.width_3db.x() = cut_width(cut, report.peak_ix, image.cell);
  cut.resize(image.ny);
  for (int iy = 0; iy < image.ny; ++iy) {
    cut[iy] = std::abs(image.data[image.index(report.peak_ix, iy,
                                              report.peak_iz)]);
  }
  report.width_3db.y() = cut_width(cut, report.peak_iy, image.cell);
  cut.resize(image.nz);
  for (int iz = 0; iz < image.nz; ++iz) {
    cut[iz] = std::abs(image.data[image.index(report.peak_ix, report.peak_iy,
                                              iz)]);
  }
  report.width_3db.z() = cut_width(cut, report.peak_iz, image.cell);
  return report;
}

}  // namespace gpsar::sar
