#include <cstdio>
#include <cstring>

#include <nlohmann/json.hpp>

#include "gpsar/io/streams.hpp"

namespace gpsar::io {

namespace {
constexpr char kMagic[] = "GPSARv1";
constexpr size_t kMagicLen = 7;
}  // namespace

void write_pulse_file(const std::string& path, const sar::PulseSet& set) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw ConfigError("cannot open " + path);

  nlohmann::json header{{"num_bins", set.header.num_bins},
                        {"bin_spacing_m", set.header.bin_spacing},
                        {"start_range_m", set.header.start_range},
                        {"f_c", set.header.f_c}};
  const std::string header_str = header.dump();
  const uint32_t header_len = static_cast<uint32_t>(header_str.size());

  std::fwrite(kMagic, 1, kMagicLen, f);
  std::fwrite(&header_len, sizeof(header_len), 1, f);
  std::fwrite(header_str.data(), 1, header_str.size(), f);

  std::vector<float> row(2 * set.header.num_bins);
  for (const auto& pulse : set.pulses) {
    if (static_cast<int>(pulse.samples.size()) != set.header.num_bins) {
      std::fclose(f);
      throw ConfigError("pulse sample count does not match header");
    }
    std::fwrite(&pulse.t, sizeof(double), 1, f);
    for (int b = 0; b < set.header.num_bins; ++b) {
      row[2 * b] = pulse.samples[b].real();
      row[2 * b + 1] = pulse.samples[b].imag();
    }
    std::fwrite(row.data(), sizeof(float), row.size(), f);
    const uint8_t saturated = pulse.saturated ? 1 : 0;
    std::fwrite(&saturated, 1, 1, f);
  }
  std::fclose(f);
}

sar::PulseSet read_pulse_file(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) throw ConfigError("cannot open " + path);

  auto fail = [&](const std::string& why, long offset) {
    std::fclose(f);
    throw ConfigError(path + " at byte " + std::to_string(offset) + ": " +
                      why);
  };

  char magic[kMagicLen];
  if (std::fread(magic, 1, kMagicLen, f) != kMagicLen ||
      std::memcmp(magic, kMagic, kMagicLen) != 0) {
    fail("bad magic, expected GPSARv1", 0);
  }
  uint32_t header_len = 0;
  if (std::fread(&header_len, sizeof(header_len), 1, f) != 1 ||
      header_len > 1 << 20) {
    fail("bad header length", kMagicLen);
  }
  std::string header_str(header_len, '\0');
  if (std::fread(header_str.data(), 1, header_len, f) != header_len) {
    fail("truncated header", kMagicLen + 4);
  }

  sar::PulseSet set;
  try {
    const nlohmann::json header = nlohmann::json::parse(header_str);
    set.header.num_bins = header.at("num_bins").get<int>();
    set.header.bin_spacing = header.at("bin_spacing_m").get<double>();
    set.header.start_range = header.at("start_range_m").get<double>();
    set.header.f_c = header.at("f_c").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("header parse: ") + e.what(), kMagicLen + 4);
  }
  if (set.header.num_bins <= 0 || set.header.bin_spacing <= 0.0) {
    fail("invalid header fields", kMagicLen + 4);
  }

  std::vector<float> row(2 * set.header.num_bins);
  while (true) {
    double t = 0.0;
    const size_t got = std::fread(&t, sizeof(double), 1, f);
    if (got == 0) break;  // clean EOF
    sar::RadarPulse pulse;
    pulse.t = t;
    if (std::fread(row.data(), sizeof(float), row.size(), f) != row.size()) {
      fail("truncated pulse record", std::ftell(f));
    }
    pulse.samples.resize(set.header.num_bins);
    for (int b = 0; b < set.header.num_bins; ++b) {
      pulse.samples[b] = {row[2 * b], row[2 * b + 1]};
    }
    uint8_t saturated = 0;
    if (std::fread(&saturated, 1, 1, f) != 1) {
      fail("truncated saturation flag", std::ftell(f));
    }
    pulse.saturated = saturated != 0;
    set.pulses.push_back(std::move(pulse));
  }
  std::fclose(f);
  return set;
}

}  // namespace gpsar::io
