#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gpsar/io/streams.hpp"

namespace gpsar::io {

namespace {

FILE* open_or_throw(const std::string& path, const char* mode) {
  FILE* f = std::fopen(path.c_str(), mode);
  if (f == nullptr) {
    throw ConfigError("cannot open " + path);
  }
  return f;
}

// One parsed CSV row; en-bloc strtod keeps large streams fast.
bool parse_row(const std::string& line, std::vector<double>* fields,
               std::string* trailing) {
  fields->clear();
  trailing->clear();
  const char* p = line.c_str();
  while (*p != '\0') {
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) {
      *trailing = p;
      return !fields->empty();
    }
    fields->push_back(v);
    p = end;
    if (*p == ',') ++p;
  }
  return !fields->empty();
}

[[noreturn]] void bad_row(const std::string& path, int line_no,
                          const std::string& why) {
  throw ConfigError(path + ":" + std::to_string(line_no) + ": " + why);
}

}  // namespace

void write_imu_csv(const std::string& path,
                   const std::vector<est::ImuMeasurement>& imu) {
  FILE* f = open_or_throw(path, "w");
  std::fputs("t,ax,ay,az,gx,gy,gz\n", f);
  for (const auto& m : imu) {
    std::fprintf(f, "%.9f,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", m.t,
                 m.accel.x(), m.accel.y(), m.accel.z(), m.gyro.x(),
                 m.gyro.y(), m.gyro.z());
  }
  std::fclose(f);
}

std::vector<est::ImuMeasurement> read_imu_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<est::ImuMeasurement> out;
  std::string line, trailing;
  std::vector<double> fields;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    if (!parse_row(line, &fields, &trailing) || fields.size() != 7) {
      bad_row(path, line_no, "expected 7 numeric fields");
    }
    est::ImuMeasurement m;
    m.t = fields[0];
    m.accel = Vec3(fields[1], fields[2], fields[3]);
    m.gyro = Vec3(fields[4], fields[5], fields[6]);
    out.push_back(m);
  }
  return out;
}

namespace {

void write_cov_fields(FILE* f, const Mat3& cov) {
  std::fprintf(f, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g", cov(0, 0), cov(0, 1),
               cov(0, 2), cov(1, 1), cov(1, 2), cov(2, 2));
}

Mat3 cov_from_fields(const std::vector<double>& v, size_t at) {
  Mat3 cov;
  cov << v[at], v[at + 1], v[at + 2],
         v[at + 1], v[at + 3], v[at + 4],
         v[at + 2], v[at + 4], v[at + 5];
  return cov;
}

}  // namespace

void write_gnss_pos_csv(const std::string& path,
                        const std::vector<est::GnssPosition>& gnss) {
  FILE* f = open_or_throw(path, "w");
  std::fputs("t,x,y,z,sxx,sxy,sxz,syy,syz,szz,fix_mode\n", f);
  for (const auto& z : gnss) {
    std::fprintf(f, "%.9f,%.12g,%.12g,%.12g,", z.t, z.position.x(),
                 z.position.y(), z.position.z());
    write_cov_fields(f, z.cov);
    std::fprintf(f, ",%s\n", z.fix == est::FixMode::kRtk ? "RTK" : "SBAS");
  }
  std::fclose(f);
}

std::vector<est::GnssPosition> read_gnss_pos_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<est::GnssPosition> out;
  std::string line, trailing;
  std::vector<double> fields;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    if (!parse_row(line, &fields, &trailing) || fields.size() != 10) {
      bad_row(path, line_no, "expected 10 numeric fields plus fix mode");
    }
    est::GnssPosition z;
    z.t = fields[0];
    z.position = Vec3(fields[1], fields[2], fields[3]);
    z.cov = cov_from_fields(fields, 4);
    if (trailing.find("SBAS") != std::string::npos) {
      z.fix = est::FixMode::kSbas;
    } else if (trailing.find("RTK") != std::string::npos) {
      z.fix = est::FixMode::kRtk;
    } else {
      bad_row(path, line_no, "fix mode must be RTK or SBAS");
    }
    out.push_back(z);
  }
  return out;
}

void write_gnss_mb_csv(const std::string& path,
                       const std::vector<est::MovingBaseline>& gnss) {
  FILE* f = open_or_throw(path, "w");
  std::fputs("t,dx,dy,dz,sxx,sxy,sxz,syy,syz,szz\n", f);
  for (const auto& z : gnss) {
    std::fprintf(f, "%.9f,%.12g,%.12g,%.12g,", z.t, z.baseline.x(),
                 z.baseline.y(), z.baseline.z());
    write_cov_fields(f, z.cov);
    std::fputs("\n", f);
  }
  std::fclose(f);
}

std::vector<est::MovingBaseline> read_gnss_mb_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<est::MovingBaseline> out;
  std::string line, trailing;
  std::vector<double> fields;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    if (!parse_row(line, &fields, &trailing) || fields.size() != 10) {
      bad_row(path, line_no, "expected 10 numeric fields");
    }
    est::MovingBaseline z;
    z.t = fields[0];
    z.baseline = Vec3(fields[1], fields[2], fields[3]);
    z.cov = cov_from_fields(fields, 4);
    out.push_back(z);
  }
  return out;
}

void write_poses_csv(const std::string& path,
                     const std::vector<est::TimedPose>& poses) {
  FILE* f = open_or_throw(path, "w");
  std::fputs("t,x,y,z,qw,qx,qy,qz\n", f);
  for (const auto& s : poses) {
    const auto& q = s.pose.rotation().quaternion();
    const auto& p = s.pose.translation();
    std::fprintf(f, "%.9f,%.12g,%.12g,%.12g,%.15g,%.15g,%.15g,%.15g\n", s.t,
                 p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z());
  }
  std::fclose(f);
}

std::vector<est::TimedPose> read_poses_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<est::TimedPose> out;
  std::string line, trailing;
  std::vector<double> fields;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    if (!parse_row(line, &fields, &trailing) || fields.size() != 8) {
      bad_row(path, line_no, "expected 8 numeric fields");
    }
    est::TimedPose s;
    s.t = fields[0];
    s.pose = Pose3(Rot3(Eigen::Quaterniond(fields[4], fields[5], fields[6],
                                           fields[7])),
                   Vec3(fields[1], fields[2], fields[3]));
    out.push_back(s);
  }
  return out;
}

void write_attitude_csv(const std::string& path,
                        const std::vector<std::pair<double, Rot3>>& att) {
  FILE* f = open_or_throw(path, "w");
  std::fputs("t,qw,qx,qy,qz\n", f);
  for (const auto& [t, r] : att) {
    const auto& q = r.quaternion();
    std::fprintf(f, "%.9f,%.15g,%.15g,%.15g,%.15g\n", t, q.w(), q.x(), q.y(),
                 q.z());
  }
  std::fclose(f);
}

std::vector<std::pair<double, Rot3>> read_attitude_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<std::pair<double, Rot3>> out;
  std::string line, trailing;
  std::vector<double> fields;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    if (!parse_row(line, &fields, &trailing) || fields.size() != 5) {
      bad_row(path, line_no, "expected 5 numeric fields");
    }
    out.emplace_back(fields[0],
                     Rot3(Eigen::Quaterniond(fields[1], fields[2], fields[3],
                                             fields[4])));
  }
  return out;
}

uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  uint64_t hash = 1469598103934665603ull;
  char buffer[65536];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

}  // namespace gpsar::io
