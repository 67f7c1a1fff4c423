#pragma once

#include <string>

#include "gpsar/estimator/smoother.hpp"
#include "gpsar/sar/sar.hpp"

namespace gpsar::io {

// CSV schemas (documented in the README):
//   imu.csv      t,ax,ay,az,gx,gy,gz
//   gnss_pos.csv t,x,y,z,sxx,sxy,sxz,syy,syz,szz,fix_mode
//   gnss_mb.csv  t,dx,dy,dz,sxx,sxy,sxz,syy,syz,szz
//   poses.csv    t,x,y,z,qw,qx,qy,qz
//   att.csv      t,qw,qx,qy,qz
// Parsers throw ConfigError with the offending line number.

void write_imu_csv(const std::string& path,
                   const std::vector<est::ImuMeasurement>& imu);
std::vector<est::ImuMeasurement> read_imu_csv(const std::string& path);

void write_gnss_pos_csv(const std::string& path,
                        const std::vector<est::GnssPosition>& gnss);
std::vector<est::GnssPosition> read_gnss_pos_csv(const std::string& path);

void write_gnss_mb_csv(const std::string& path,
                       const std::vector<est::MovingBaseline>& gnss);
std::vector<est::MovingBaseline> read_gnss_mb_csv(const std::string& path);

void write_poses_csv(const std::string& path,
                     const std::vector<est::TimedPose>& poses);
std::vector<est::TimedPose> read_poses_csv(const std::string& path);

void write_attitude_csv(const std::string& path,
                        const std::vector<std::pair<double, Rot3>>& att);
std::vector<std::pair<double, Rot3>> read_attitude_csv(
    const std::string& path);

// Pulse file: magic "GPSARv1", uint32 LE header length, JSON header
// {num_bins, bin_spacing_m, start_range_m, f_c}, then per pulse
// float64 t, float32 re/im per bin, uint8 saturated.
void write_pulse_file(const std::string& path, const sar::PulseSet& set);
sar::PulseSet read_pulse_file(const std::string& path);

// FNV-1a 64 over the file bytes, for the run manifest.
uint64_t file_checksum(const std::string& path);

}  // namespace gpsar::io
