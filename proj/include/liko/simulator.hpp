#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liko/contact.hpp"
#include "liko/filter.hpp"
#include "liko/kinematics.hpp"
#include "liko/lidar.hpp"
#include "liko/state.hpp"

namespace liko {

enum class GaitPattern { forward_backward, square_walk, walk_in_place_turn, up_slope };

std::string to_string(GaitPattern pattern);
GaitPattern gait_pattern_from_string(const std::string& name);

struct GaitParams {
  GaitPattern pattern = GaitPattern::forward_backward;
  double duration = 20.0;          // total dataset length, s
  double step_length = 0.25;       // m per step
  double step_duration = 0.5;      // s per step
  double double_support_ratio = 0.2;
  double base_height = 0.75;       // IMU height above the terrain, m
  double lead_in = 1.5;            // initial stand, s
  double lead_out = 1.0;           // minimum final stand, s
  double turn_per_step = M_PI / 12.0;
  double swing_height = 0.05;      // swing-foot apex, m
  double bob_amplitude = 0.01;     // vertical base bob per step, m
  double walk_distance = 2.0;      // m, forward_backward / up_slope
  double turn_angle = M_PI / 2.0;  // rad, walk_in_place_turn
  std::uint64_t seed = 0;
};

struct SensorRates {
  double imu = 1000.0;    // Hz, must divide the 1 kHz ground-truth grid
  double joints = 1000.0;
  double forces = 1000.0;
  double lidar = 10.0;    // scans per second
  int points_per_scan = 800;
};

// Bounded rectangular plane patch: anchor + u*u_axis + v*v_axis,
// |u| <= u_extent, |v| <= v_extent.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  Vec3 anchor = Vec3::Zero();
  Vec3 u_axis = Vec3::UnitX();
  Vec3 v_axis = Vec3::UnitY();
  double u_extent = 1.0;
  double v_extent = 1.0;
};

// 10 x 10 m room with 3 m walls; up_slope adds a 10 degree ramp from x = 1.
struct WorldModel {
  std::vector<Plane> planes;
  bool sloped = false;
  double slope_start = 1.0;
  double slope_grade = 0.17632698070846498;  // tan(10 deg)
  double blend_halfwidth = 0.3;

  // Ground height under (x, y); smooth blend into the slope so the base
  // trajectory stays C2.
  double terrain(double x, double y) const;
};

WorldModel world_model(const GaitParams& params);

// One contact interval of one foot. touchdown = -1 marks feet already planted
// at t = 0; liftoff past the dataset end marks feet still planted at the end.
struct Footstep {
  Foot foot = Foot::none;
  Vec3 position = Vec3::Zero();
  double touchdown = 0.0;
  double liftoff = 0.0;
};

// Dense 1 kHz trajectory, rows k = 0..n at t_k = k/1000. v is the forward
// difference of p, so Euler integration reproduces p exactly.
struct GroundTruth {
  std::vector<double> t;
  std::vector<Mat3> R;
  std::vector<Vec3> p;
  std::vector<Vec3> v;
  std::vector<Vec3> foot_left;
  std::vector<Vec3> foot_right;
  std::vector<std::uint8_t> contact_left;
  std::vector<std::uint8_t> contact_right;
  std::vector<Footstep> footsteps;
  double support_ramp = 0.1;  // force crossfade length, s

  std::size_t size() const { return t.size(); }
};

GroundTruth generate_gait(const GaitParams& params);

struct SimOptions {
  SensorRates rates;
  NoiseConfig noise;
  double init_gyro_bias = 3.4906585039886591e-3;  // 0.2 deg/s
  double init_accel_bias = 4.905e-2;              // 5 mg
  // Constant per-joint zero-position error (calibration / load deflection),
  // drawn once per stream. Unlike white encoder noise it does not average
  // out against the foothold estimate, so it biases pure leg odometry.
  double encoder_offset_stddev = 0.0;  // rad
  double force_peak = 600.0;           // N, total on the ground
  double force_noise = 10.0;           // N
  Extrinsics extrinsics{Mat3::Identity(), Vec3(0.05, 0.0, 0.3)};
};

// Stream synthesis. Each op owns one RNG stream; simulate() derives stream
// seeds from GaitParams::seed as seed+1 imu, +2 joints left, +3 joints right,
// +4 forces, +5 lidar, +6 initial biases.
std::vector<ImuSample> synthesize_imu(const GroundTruth& gt,
                                      const SimOptions& opt,
                                      std::uint64_t seed,
                                      std::uint64_t bias_seed,
                                      Vec3* gyro_bias0 = nullptr,
                                      Vec3* accel_bias0 = nullptr);

std::vector<JointSample> synthesize_joints(const GroundTruth& gt,
                                           const KinematicChain& chain,
                                           Foot foot, const SimOptions& opt,
                                           std::uint64_t seed);

std::vector<ForceSample> synthesize_forces(const GroundTruth& gt,
                                           const SimOptions& opt,
                                           std::uint64_t seed);

std::vector<LidarScan> synthesize_lidar(const GroundTruth& gt,
                                        const WorldModel& world,
                                        const SimOptions& opt,
                                        std::uint64_t seed);

struct SimResult {
  GroundTruth truth;
  WorldModel world;
  Dataset data;
  Vec3 gyro_bias0 = Vec3::Zero();
  Vec3 accel_bias0 = Vec3::Zero();
};

SimResult simulate(const GaitParams& gait, const SimOptions& opt);

}  // namespace liko
