#include <algorithm>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gpsar/io/image_io.hpp"

namespace gpsar::io {

void write_image(const std::string& base_path, const sar::VoxelImage& image,
                 double f_c, double eps_r) {
  nlohmann::json sidecar{
      {"origin", {image.origin.x(), image.origin.y(), image.origin.z()}},
      {"cell", image.cell},
      {"dims", {image.nx, image.ny, image.nz}},
      {"f_c", f_c},
      {"eps_r", eps_r}};
  std::ofstream meta(base_path + ".json");
  if (!meta) throw ConfigError("cannot open " + base_path + ".json");
  meta << sidecar.dump(2) << "\n";

  FILE* f = std::fopen((base_path + ".bin").c_str(), "wb");
  if (f == nullptr) throw ConfigError("cannot open " + base_path + ".bin");
  std::vector<float> plane(image.data.size());
  for (size_t i = 0; i < image.data.size(); ++i) {
    plane[i] = static_cast<float>(image.data[i].real());
  }
  std::fwrite(plane.data(), sizeof(float), plane.size(), f);
  for (size_t i = 0; i < image.data.size(); ++i) {
    plane[i] = static_cast<float>(image.data[i].imag());
  }
  std::fwrite(plane.data(), sizeof(float), plane.size(), f);
  std::fclose(f);
}

sar::VoxelImage read_image(const std::string& base_path) {
  std::ifstream meta(base_path + ".json");
  if (!meta) throw ConfigError("cannot open " + base_path + ".json");
  nlohmann::json sidecar;
  meta >> sidecar;

  sar::VoxelImage image;
  const auto& origin = sidecar.at("origin");
  image.origin = Vec3(origin[0], origin[1], origin[2]);
  image.cell = sidecar.at("cell").get<double>();
  const auto& dims = sidecar.at("dims");
  image.nx = dims[0];
  image.ny = dims[1];
  image.nz = dims[2];

  const size_t n = static_cast<size_t>(image.nx) * image.ny * image.nz;
  image.data.resize(n);
  FILE* f = std::fopen((base_path + ".bin").c_str(), "rb");
  if (f == nullptr) throw ConfigError("cannot open " + base_path + ".bin");
  std::vector<float> re(n), im(n);
  if (std::fread(re.data(), sizeof(float), n, f) != n ||
      std::fread(im.data(), sizeof(float), n, f) != n) {
    std::fclose(f);
    throw ConfigError("truncated image planes in " + base_path + ".bin");
  }
  std::fclose(f);
  for (size_t i = 0; i < n; ++i) image.data[i] = {re[i], im[i]};
  return image;
}

void write_magnitude_pgm(const std::string& path,
                         const sar::VoxelImage& image, int slice_iz,
                         double clip_fraction) {
  if (slice_iz < 0 || slice_iz >= image.nz) {
    throw ConfigError("pgm slice outside the image");
  }
  std::vector<double> mags(static_cast<size_t>(image.nx) * image.ny);
  for (int iy = 0; iy < image.ny; ++iy) {
    for (int ix = 0; ix < image.nx; ++ix) {
      mags[iy * image.nx + ix] =
          std::abs(image.data[image.index(ix, iy, slice_iz)]);
    }
  }
  // Clip at the (1 - clip_fraction) quantile.
  std::vector<double> sorted = mags;
  std::sort(sorted.begin(), sorted.end());
  const size_t idx = static_cast<size_t>(
      std::min<double>(sorted.size() - 1.0,
                       (1.0 - clip_fraction) * sorted.size()));
  const double clip = std::max(sorted[idx], 1e-300);

  FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw ConfigError("cannot open " + path);
  std::fprintf(f, "P5\n%d %d\n255\n", image.nx, image.ny);
  for (int iy = image.ny - 1; iy >= 0; --iy) {  // north up
    for (int ix = 0; ix < image.nx; ++ix) {
      const double v = std::min(mags[iy * image.nx + ix] / clip, 1.0);
      const uint8_t byte = static_cast<uint8_t>(std::lround(v * 255.0));
      std::fwrite(&byte, 1, 1, f);
    }
  }
  std::fclose(f);
}

}  // namespace gpsar::io
