#include "liko/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace liko {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string short_name(const std::string& path) {
  return fs::path(path).filename().string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

bool parse_double_token(const std::string& tok, double* out) {
  const char* s = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s, &end);
  while (end != nullptr && (*end == ' ' || *end == '\t')) ++end;
  if (end == s || end == nullptr || *end != '\0') return false;
  *out = v;
  return true;
}

double parse_double(const std::string& tok, const std::string& file,
                    std::size_t line) {
  double v = 0.0;
  if (!parse_double_token(tok, &v)) {
    throw Error(file + ":" + std::to_string(line) + ": not a number: '" + tok +
                "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t c = line.find(',', pos);
    if (c == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
  return fields;
}

struct CsvFile {
  std::vector<std::size_t> line_no;
  std::vector<std::vector<double>> rows;
};

// Comma-separated numeric rows. The first content line may be a textual
// header; '#' lines and blank lines are skipped. expect_fields < 0 means
// "consistent across rows".
CsvFile load_csv(const std::string& path, int expect_fields) {
  const std::string name = short_name(path);
  const std::vector<std::string> lines = split_lines(read_file(path));
  CsvFile out;
  bool allow_header = true;
  int want = expect_fields;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv(line);
    if (allow_header) {
      allow_header = false;
      double probe = 0.0;
      if (!parse_double_token(fields[0], &probe)) continue;  // header line
    }
    if (want > 0 && int(fields.size()) != want) {
      throw Error(name + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(want) + " fields, got " +
                  std::to_string(fields.size()));
    }
    if (want < 0) {
      if (!out.rows.empty() && fields.size() != out.rows.front().size()) {
        throw Error(name + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(out.rows.front().size()) +
                    " fields, got " + std::to_string(fields.size()));
      }
    }
    std::vector<double> row(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
      row[f] = parse_double(fields[f], name, line_no);
    }
    out.line_no.push_back(line_no);
    out.rows.push_back(std::move(row));
  }
  return out;
}

void check_monotone(const CsvFile& f, const std::string& name) {
  for (std::size_t i = 1; i < f.rows.size(); ++i) {
    if (!(f.rows[i][0] > f.rows[i - 1][0])) {
      throw Error(name + ":" + std::to_string(f.line_no[i]) +
                  ": non-monotone timestamp");
    }
  }
}

json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(short_name(path) + ": " + e.what());
  }
}

Vec3 vec3_from(const json& a, const std::string& ctx) {
  if (!a.is_array() || a.size() != 3) {
    throw Error(ctx + " must be an array of 3 numbers");
  }
  return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

Mat3 mat3_from(const json& a, const std::string& ctx) {
  if (!a.is_array() || a.size() != 9) {
    throw Error(ctx + " must be a row-major array of 9 numbers");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = a[std::size_t(3 * r + c)].get<double>();
  }
  return m;
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  }
  return a;
}

KinematicChain chain_from_json(const json& j, const std::string& ctx) {
  KinematicChain c;
  if (j.contains("base_to_hip")) {
    c.base_to_hip = vec3_from(j["base_to_hip"], ctx + ".base_to_hip");
  }
  if (j.contains("foot_offset")) {
    c.foot_offset = vec3_from(j["foot_offset"], ctx + ".foot_offset");
  }
  if (!j.contains("joints") || !j["joints"].is_array() || j["joints"].empty()) {
    throw Error(ctx + ".joints must be a non-empty array");
  }
  for (const json& ji : j["joints"]) {
    Joint joint;
    if (ji.contains("axis")) joint.axis = vec3_from(ji["axis"], ctx + ".axis");
    if (ji.contains("offset")) {
      joint.offset = vec3_from(ji["offset"], ctx + ".offset");
    }
    if (ji.contains("fixed_rotation")) {
      joint.fixed_rotation =
          vec3_from(ji["fixed_rotation"], ctx + ".fixed_rotation");
    }
    c.joints.push_back(joint);
  }
  return c;
}

std::string tum_line(double t, const Vec3& p, const Eigen::Quaterniond& q) {
  std::string s;
  s.reserve(180);
  s += fmt17(t);
  s += ' ';
  s += fmt17(p.x());
  s += ' ';
  s += fmt17(p.y());
  s += ' ';
  s += fmt17(p.z());
  s += ' ';
  s += fmt17(q.x());
  s += ' ';
  s += fmt17(q.y());
  s += ' ';
  s += fmt17(q.z());
  s += ' ';
  s += fmt17(q.w());
  s += '\n';
  return s;
}

Eigen::Quaterniond canonical(const Mat3& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw Error("write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("rename failed for " + path + ": " + ec.message());
}

void save_dataset(const std::string& dir, const Dataset& data,
                  const DatasetMeta& meta) {
  fs::create_directories(dir);

  std::string s = "t,wx,wy,wz,ax,ay,az\n";
  for (const ImuSample& m : data.imu) {
    s += fmt17(m.t);
    for (int i = 0; i < 3; ++i) s += "," + fmt17(m.w[i]);
    for (int i = 0; i < 3; ++i) s += "," + fmt17(m.a[i]);
    s += '\n';
  }
  write_file_atomic(dir + "/imu.csv", s);

  auto save_joints = [&](const std::string& path,
                         const std::vector<JointSample>& stream) {
    std::string out = "t";
    const int dof = stream.empty() ? meta.dof : int(stream.front().q.size());
    for (int i = 0; i < dof; ++i) out += ",q" + std::to_string(i);
    for (int i = 0; i < dof; ++i) out += ",dq" + std::to_string(i);
    out += '\n';
    for (const JointSample& m : stream) {
      out += fmt17(m.t);
      for (int i = 0; i < m.q.size(); ++i) out += "," + fmt17(m.q[i]);
      for (int i = 0; i < m.dq.size(); ++i) out += "," + fmt17(m.dq[i]);
      out += '\n';
    }
    write_file_atomic(path, out);
  };
  save_joints(dir + "/joints_left.csv", data.joints_left);
  save_joints(dir + "/joints_right.csv", data.joints_right);

  s = "t,fz_left,fz_right\n";
  for (const ForceSample& m : data.forces) {
    s += fmt17(m.t) + "," + fmt17(m.fz_left) + "," + fmt17(m.fz_right) + '\n';
  }
  write_file_atomic(dir + "/forces.csv", s);

  const std::string scan_dir = dir + "/scans";
  std::error_code ec;
  fs::remove_all(scan_dir, ec);
  fs::create_directories(scan_dir);
  for (std::size_t i = 0; i < data.scans.size(); ++i) {
    const LidarScan& scan = data.scans[i];
    std::string out = "# end_time=" + fmt17(scan.end_time) + '\n';
    for (const LidarPoint& pt : scan.points) {
      out += fmt17(pt.t);
      for (int c = 0; c < 3; ++c) out += "," + fmt17(pt.p[c]);
      out += '\n';
    }
    char name[32];
    std::snprintf(name, sizeof(name), "scan_%06zu.csv", i);
    write_file_atomic(scan_dir + "/" + name, out);
  }

  json j;
  j["dof"] = meta.dof;
  j["pattern"] = meta.pattern;
  j["seed"] = meta.seed;
  j["duration"] = meta.duration;
  j["rates"] = {{"imu", meta.rates.imu},
                {"joints", meta.rates.joints},
                {"forces", meta.rates.forces},
                {"lidar", meta.rates.lidar},
                {"points_per_scan", meta.rates.points_per_scan}};
  j["extrinsics"] = {{"R", to_json(meta.extrinsics.R)},
                     {"t", to_json(meta.extrinsics.t)}};
  write_file_atomic(dir + "/meta.json", j.dump(2) + "\n");
}

Dataset load_dataset(const std::string& dir) {
  Dataset data;
  if (!fs::exists(dir + "/imu.csv")) {
    throw Error("imu.csv missing in " + dir);
  }
  {
    const CsvFile f = load_csv(dir + "/imu.csv", 7);
    check_monotone(f, "imu.csv");
    data.imu.reserve(f.rows.size());
    for (const std::vector<double>& r : f.rows) {
      ImuSample s;
      s.t = r[0];
      s.w = Vec3(r[1], r[2], r[3]);
      s.a = Vec3(r[4], r[5], r[6]);
      data.imu.push_back(s);
    }
  }

  auto load_joints = [&](const std::string& file) {
    std::vector<JointSample> stream;
    const std::string path = dir + "/" + file;
    if (!fs::exists(path)) return stream;
    const CsvFile f = load_csv(path, -1);
    check_monotone(f, file);
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
      const std::vector<double>& r = f.rows[i];
      if (r.size() < 3 || r.size() % 2 == 0) {
        throw Error(file + ":" + std::to_string(f.line_no[i]) +
                    ": expected 1+2*dof fields, got " +
                    std::to_string(r.size()));
      }
      const long dof = long(r.size() - 1) / 2;
      JointSample s;
      s.t = r[0];
      s.q.resize(dof);
      s.dq.resize(dof);
      for (long d = 0; d < dof; ++d) {
        s.q[d] = r[std::size_t(1 + d)];
        s.dq[d] = r[std::size_t(1 + dof + d)];
      }
      stream.push_back(std::move(s));
    }
    return stream;
  };
  data.joints_left = load_joints("joints_left.csv");
  data.joints_right = load_joints("joints_right.csv");

  if (fs::exists(dir + "/forces.csv")) {
    const CsvFile f = load_csv(dir + "/forces.csv", 3);
    check_monotone(f, "forces.csv");
    for (const std::vector<double>& r : f.rows) {
      data.forces.push_back({r[0], r[1], r[2]});
    }
  }

  const std::string scan_dir = dir + "/scans";
  if (fs::exists(scan_dir)) {
    std::vector<std::string> files;
    for (const fs::directory_entry& e : fs::directory_iterator(scan_dir)) {
      if (e.path().extension() == ".csv") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    for (const std::string& path : files) {
      const std::string name = short_name(path);
      const std::vector<std::string> lines = split_lines(read_file(path));
      if (lines.empty() || lines[0].rfind("# end_time=", 0) != 0) {
        throw Error(name + ":1: missing '# end_time=' header");
      }
      LidarScan scan;
      scan.end_time = parse_double(lines[0].substr(11), name, 1);
      for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 4) {
          throw Error(name + ":" + std::to_string(i + 1) +
                      ": expected 4 fields, got " +
                      std::to_string(fields.size()));
        }
        LidarPoint pt;
        pt.t = parse_double(fields[0], name, i + 1);
        pt.p = Vec3(parse_double(fields[1], name, i + 1),
                    parse_double(fields[2], name, i + 1),
                    parse_double(fields[3], name, i + 1));
        scan.points.push_back(pt);
      }
      if (!data.scans.empty() &&
          scan.end_time <= data.scans.back().end_time) {
        throw Error(name + ": end_time not increasing across scan files");
      }
      data.scans.push_back(std::move(scan));
    }
  }
  return data;
}

DatasetMeta load_meta(const std::string& dir) {
  DatasetMeta meta;
  const std::string path = dir + "/meta.json";
  if (!fs::exists(path)) return meta;
  const json j = parse_json_file(path);
  try {
    meta.dof = j.value("dof", meta.dof);
    meta.pattern = j.value("pattern", meta.pattern);
    meta.seed = j.value("seed", meta.seed);
    meta.duration = j.value("duration", meta.duration);
    if (j.contains("rates")) {
      const json& r = j["rates"];
      meta.rates.imu = r.value("imu", meta.rates.imu);
      meta.rates.joints = r.value("joints", meta.rates.joints);
      meta.rates.forces = r.value("forces", meta.rates.forces);
      meta.rates.lidar = r.value("lidar", meta.rates.lidar);
      meta.rates.points_per_scan =
          r.value("points_per_scan", meta.rates.points_per_scan);
    }
    if (j.contains("extrinsics")) {
      const json& e = j["extrinsics"];
      if (e.contains("R")) meta.extrinsics.R = mat3_from(e["R"], "extrinsics.R");
      if (e.contains("t")) meta.extrinsics.t = vec3_from(e["t"], "extrinsics.t");
    }
  } catch (const json::exception& e) {
    throw Error("meta.json: " + std::string(e.what()));
  }
  return meta;
}

void save_tum(const std::string& path, const Trajectory& traj) {
  std::string s;
  s.reserve(traj.size() * 180);
  for (const PoseSample& ps : traj) s += tum_line(ps.t, ps.p, ps.q);
  write_file_atomic(path, s);
}

Trajectory load_tum(const std::string& path) {
  const std::string name = short_name(path);
  const std::vector<std::string> lines = split_lines(read_file(path));
  Trajectory traj;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    std::string t;
    while (ss >> t) tok.push_back(t);
    if (tok.size() != 8) {
      throw Error(name + ":" + std::to_string(i + 1) + ": expected 8 fields, got " +
                  std::to_string(tok.size()));
    }
    PoseSample ps;
    ps.t = parse_double(tok[0], name, i + 1);
    ps.p = Vec3(parse_double(tok[1], name, i + 1),
                parse_double(tok[2], name, i + 1),
                parse_double(tok[3], name, i + 1));
    ps.q = Eigen::Quaterniond(parse_double(tok[7], name, i + 1),
                              parse_double(tok[4], name, i + 1),
                              parse_double(tok[5], name, i + 1),
                              parse_double(tok[6], name, i + 1));
    if (!traj.empty() && !(ps.t > traj.back().t)) {
      throw Error(name + ":" + std::to_string(i + 1) + ": non-monotone timestamp");
    }
    traj.push_back(ps);
  }
  return traj;
}

void save_velocity_csv(const std::string& path,
                       const std::vector<VelocitySample>& stream) {
  std::string s = "t,vx,vy,vz\n";
  for (const VelocitySample& m : stream) {
    s += fmt17(m.t);
    for (int i = 0; i < 3; ++i) s += "," + fmt17(m.v[i]);
    s += '\n';
  }
  write_file_atomic(path, s);
}

std::vector<VelocitySample> load_velocity_csv(const std::string& path) {
  const CsvFile f = load_csv(path, 4);
  check_monotone(f, short_name(path));
  std::vector<VelocitySample> out;
  out.reserve(f.rows.size());
  for (const std::vector<double>& r : f.rows) {
    out.push_back({r[0], Vec3(r[1], r[2], r[3])});
  }
  return out;
}

void save_footholds_csv(const std::string& path,
                        const std::vector<TrajectorySample>& traj) {
  std::string s = "t,x,y,z,stance\n";
  for (const TrajectorySample& m : traj) {
    s += fmt17(m.t);
    for (int i = 0; i < 3; ++i) s += "," + fmt17(m.pc[i]);
    s += ',';
    s += m.stance == Foot::left ? "left"
         : m.stance == Foot::right ? "right"
                                   : "none";
    s += '\n';
  }
  write_file_atomic(path, s);
}

void save_stats_json(const std::string& path, const RunResult& result,
                     Mode mode) {
  json j;
  j["mode"] = to_string(mode);
  j["events"] = {{"propagate", result.counts.propagate},
                 {"kin_update", result.counts.kin_update},
                 {"lidar_update", result.counts.lidar_update},
                 {"scans_rejected", result.counts.scans_rejected},
                 {"scans_without_correspondences",
                  result.counts.scans_without_correspondences},
                 {"contact_resets", result.counts.contact_resets}};
  json hist = json::array();
  for (std::size_t c : result.counts.iekf_iterations) hist.push_back(c);
  j["iekf_iteration_histogram"] = hist;
  j["trajectory_samples"] = result.trajectory.size();
  j["wall_seconds"] = result.wall_seconds;
  write_file_atomic(path, j.dump(2) + "\n");
}

RunConfig load_run_config(const std::string& path, const FilterConfig& base) {
  const json j = parse_json_file(path);
  const std::string name = short_name(path);
  RunConfig cfg;
  cfg.filter = base;
  try {
    cfg.seed = j.value("seed", std::uint64_t(0));
    FilterConfig& f = cfg.filter;
    if (j.contains("mode")) f.mode = mode_from_string(j["mode"].get<std::string>());
    f.init_window = j.value("init_window", f.init_window);
    if (j.contains("noise")) {
      const json& n = j["noise"];
      NoiseConfig& c = f.noise;
      c.gyro_density = n.value("gyro_density", c.gyro_density);
      c.accel_density = n.value("accel_density", c.accel_density);
      c.gyro_bias_density = n.value("gyro_bias_density", c.gyro_bias_density);
      c.accel_bias_density = n.value("accel_bias_density", c.accel_bias_density);
      if (n.contains("contact_slip_density")) {
        c.contact_slip_density =
            vec3_from(n["contact_slip_density"], "noise.contact_slip_density");
      }
      c.encoder_pos_stddev = n.value("encoder_pos_stddev", c.encoder_pos_stddev);
      c.encoder_vel_stddev = n.value("encoder_vel_stddev", c.encoder_vel_stddev);
      c.lidar_point_stddev = n.value("lidar_point_stddev", c.lidar_point_stddev);
      c.velocity_slip_floor = n.value("velocity_slip_floor", c.velocity_slip_floor);
      c.position_noise_floor =
          n.value("position_noise_floor", c.position_noise_floor);
      c.contact_reset_stddev =
          n.value("contact_reset_stddev", c.contact_reset_stddev);
      if (n.contains("init")) {
        const json& i = n["init"];
        InitStddev& s = c.init;
        s.rot = i.value("rot", s.rot);
        s.pos = i.value("pos", s.pos);
        s.vel = i.value("vel", s.vel);
        s.gyro_bias = i.value("gyro_bias", s.gyro_bias);
        s.accel_bias = i.value("accel_bias", s.accel_bias);
        s.contact_pos = i.value("contact_pos", s.contact_pos);
        s.gravity = i.value("gravity", s.gravity);
      }
    }
    if (j.contains("contact")) {
      const json& c = j["contact"];
      f.contact.force_on = c.value("force_on", f.contact.force_on);
      f.contact.force_off = c.value("force_off", f.contact.force_off);
      f.contact.switch_hysteresis =
          c.value("switch_hysteresis", f.contact.switch_hysteresis);
    }
    if (j.contains("map")) {
      const json& m = j["map"];
      f.map.voxel_size = m.value("voxel_size", f.map.voxel_size);
      f.map.downsample_size = m.value("downsample_size", f.map.downsample_size);
      f.map.planarity_gate = m.value("planarity_gate", f.map.planarity_gate);
      f.map.association_gate =
          m.value("association_gate", f.map.association_gate);
      f.map.knn = m.value("knn", f.map.knn);
    }
    if (j.contains("iekf")) {
      const json& e = j["iekf"];
      f.iekf.max_iterations = e.value("max_iterations", f.iekf.max_iterations);
      f.iekf.tolerance = e.value("tolerance", f.iekf.tolerance);
    }
    if (j.contains("extrinsics")) {
      const json& e = j["extrinsics"];
      if (e.contains("R")) f.extrinsics.R = mat3_from(e["R"], "extrinsics.R");
      if (e.contains("t")) f.extrinsics.t = vec3_from(e["t"], "extrinsics.t");
    }
    if (j.contains("chain_left")) {
      f.chain_left = chain_from_json(j["chain_left"], "chain_left");
      f.chain_right = j.contains("chain_right")
                          ? chain_from_json(j["chain_right"], "chain_right")
                          : mirrored(f.chain_left);
    } else if (j.contains("chain_right")) {
      f.chain_right = chain_from_json(j["chain_right"], "chain_right");
    }
  } catch (const json::exception& e) {
    throw Error(name + ": " + e.what());
  }
  return cfg;
}

Trajectory to_trajectory(const std::vector<TrajectorySample>& samples) {
  Trajectory traj;
  traj.reserve(samples.size());
  for (const TrajectorySample& s : samples) {
    traj.push_back({s.t, s.p, canonical(s.R)});
  }
  return traj;
}

Trajectory to_trajectory(const GroundTruth& gt, long stride) {
  if (stride < 1) throw Error("to_trajectory: stride must be >= 1");
  Trajectory traj;
  traj.reserve(gt.size() / std::size_t(stride) + 1);
  for (std::size_t k = 0; k < gt.size(); k += std::size_t(stride)) {
    traj.push_back({gt.t[k], gt.p[k], canonical(gt.R[k])});
  }
  return traj;
}

std::vector<VelocitySample> to_velocity(
    const std::vector<TrajectorySample>& samples) {
  std::vector<VelocitySample> out;
  out.reserve(samples.size());
  for (const TrajectorySample& s : samples) out.push_back({s.t, s.v});
  return out;
}

std::vector<VelocitySample> to_velocity(const GroundTruth& gt, long stride) {
  if (stride < 1) throw Error("to_velocity: stride must be >= 1");
  std::vector<VelocitySample> out;
  out.reserve(gt.size() / std::size_t(stride) + 1);
  for (std::size_t k = 0; k < gt.size(); k += std::size_t(stride)) {
    out.push_back({gt.t[k], gt.v[k]});
  }
  return out;
}

}  // namespace liko
