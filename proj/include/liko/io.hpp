#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liko/evaluation.hpp"
#include "liko/filter.hpp"
#include "liko/simulator.hpp"

namespace liko {

// Write-temp-then-rename so readers never observe partial files.
void write_file_atomic(const std::string& path, const std::string& content);

struct DatasetMeta {
  int dof = 5;
  SensorRates rates;
  Extrinsics extrinsics{Mat3::Identity(), Vec3(0.05, 0.0, 0.3)};
  std::string pattern = "forward_backward";
  std::uint64_t seed = 0;
  double duration = 0.0;
};

// Dataset directory: imu.csv, joints_left.csv, joints_right.csv, forces.csv,
// scans/scan_000000.csv..., meta.json. Floats at 17 significant digits, so a
// write/load round trip is value-exact.
void save_dataset(const std::string& dir, const Dataset& data,
                  const DatasetMeta& meta);
Dataset load_dataset(const std::string& dir);
DatasetMeta load_meta(const std::string& dir);  // defaults if meta.json absent

// TUM trajectory text: "t tx ty tz qx qy qz qw" per line.
void save_tum(const std::string& path, const Trajectory& traj);
Trajectory load_tum(const std::string& path);

void save_velocity_csv(const std::string& path,
                       const std::vector<VelocitySample>& stream);
std::vector<VelocitySample> load_velocity_csv(const std::string& path);

void save_footholds_csv(const std::string& path,
                        const std::vector<TrajectorySample>& traj);

void save_stats_json(const std::string& path, const RunResult& result,
                     Mode mode);

struct RunConfig {
  FilterConfig filter;
  std::uint64_t seed = 0;
};
RunConfig load_run_config(const std::string& path,
                          const FilterConfig& base = FilterConfig());

// Conversions shared by the CLI, tests, and evaluation.
Trajectory to_trajectory(const std::vector<TrajectorySample>& samples);
Trajectory to_trajectory(const GroundTruth& gt, long stride = 1);
std::vector<VelocitySample> to_velocity(
    const std::vector<TrajectorySample>& samples);
std::vector<VelocitySample> to_velocity(const GroundTruth& gt,
                                        long stride = 1);

}  // namespace liko
