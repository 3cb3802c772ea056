#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "liko/kin_measurement.hpp"
#include "liko/state.hpp"

namespace liko {

struct LidarPoint {
  double t = 0.0;   // capture time
  Vec3 p = Vec3::Zero();  // sensor frame
};

struct LidarScan {
  double end_time = 0.0;
  std::vector<LidarPoint> points;
};

// imu_T_lidar.
struct Extrinsics {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

struct DeskewResult {
  bool ok = false;
  std::string reason;
  // Points moved to the scan-end IMU frame (extrinsics already applied).
  std::vector<Vec3> points;
};

// Undistort a scan by integrating the IMU backward from the scan-end state
// (biases and gravity held at their current estimates). Rejects the scan when
// the IMU stream leaves a coverage gap larger than `max_gap` inside the scan
// window.
DeskewResult deskew(const LidarScan& scan, const State& end_state,
                    const std::vector<ImuSample>& imu, const Extrinsics& ext,
                    double max_gap = 0.05);

struct MapConfig {
  double voxel_size = 0.5;
  double downsample_size = 0.25;
  double planarity_gate = 0.1;    // max point-to-plane distance of neighbours
  double association_gate = 0.5;  // max query distance to the plane
  int knn = 5;
};

struct PlaneFit {
  bool valid = false;
  Vec3 normal = Vec3::UnitZ();
  Vec3 point = Vec3::Zero();  // a point on the plane (neighbour centroid)
};

// Hash-grid point map with sub-voxel downsampling on insert and k-nearest
// plane fitting over the 3x3x3 neighbourhood of the query voxel.
class VoxelMap {
 public:
  explicit VoxelMap(const MapConfig& cfg = MapConfig());

  void insert(const std::vector<Vec3>& world_points);
  PlaneFit find_plane(const Vec3& query) const;
  std::size_t size() const { return n_points_; }

 private:
  int64_t coarse_key(const Vec3& p) const;
  int64_t fine_key(const Vec3& p) const;

  MapConfig cfg_;
  std::unordered_map<int64_t, std::vector<Vec3>> cells_;
  std::unordered_set<int64_t> occupied_fine_;
  std::size_t n_points_ = 0;
};

// Point-to-plane rows for all points with a valid correspondence, evaluated
// at x. `imu_points` are deskewed points in the scan-end IMU frame.
// `n_valid` (optional) reports how many points found a plane.
MeasurementBlock lidar_rows(const State& x, const std::vector<Vec3>& imu_points,
                            const VoxelMap& map, double point_stddev,
                            int* n_valid = nullptr);

}  // namespace liko
