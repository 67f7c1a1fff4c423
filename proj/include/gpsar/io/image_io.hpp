#pragma once

#include <string>

#include "gpsar/sar/sar.hpp"

namespace gpsar::io {

// Image persistence: float32 real and imaginary planes, row-major with x
// fastest, plus a JSON sidecar {origin, cell, dims, f_c, eps_r} and an
// 8-bit PGM magnitude rendering with the top 2% clipped.
void write_image(const std::string& base_path, const sar::VoxelImage& image,
                 double f_c, double eps_r);
sar::VoxelImage read_image(const std::string& base_path);

void write_magnitude_pgm(const std::string& path,
                         const sar::VoxelImage& image, int slice_iz = 0,
                         double clip_fraction = 0.02);

}  // namespace gpsar::io
