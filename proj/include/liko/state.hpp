#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "liko/manifold.hpp"

namespace liko {

using Vec21 = Eigen::Matrix<double, 21, 1>;
using Mat21 = Eigen::Matrix<double, 21, 21>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Global error-state ordering. Every Jacobian in the project uses it.
namespace idx {
constexpr int theta = 0;   // rotation
constexpr int pos = 3;     // position
constexpr int vel = 6;     // velocity
constexpr int bg = 9;      // gyro bias
constexpr int ba = 12;     // accel bias
constexpr int pc = 15;     // contact (foothold) position
constexpr int grav = 18;   // gravity
constexpr int state_dim = 21;

// Process noise ordering: [w_gyro, w_accel, w_bg, w_ba, w_contact].
constexpr int nw = 0;
constexpr int na = 3;
constexpr int nbg = 6;
constexpr int nba = 9;
constexpr int nc = 12;
constexpr int noise_dim = 15;
}  // namespace idx

struct State {
  Mat3 R = Mat3::Identity();  // world_R_imu
  Vec3 p = Vec3::Zero();      // world position of the IMU
  Vec3 v = Vec3::Zero();      // world velocity
  Vec3 bg = Vec3::Zero();     // gyro bias
  Vec3 ba = Vec3::Zero();     // accel bias
  Vec3 pc = Vec3::Zero();     // world position of the stance foot
  Vec3 g = Vec3(0.0, 0.0, -9.81);
  double t = 0.0;
};

State boxplus(const State& x, const Vec21& delta);

// boxminus(x2, x1): the delta with boxplus(x1, delta) == x2.
Vec21 boxminus(const State& x2, const State& x1);

struct InitStddev {
  double rot = 1e-2;
  double pos = 1e-4;
  double vel = 1e-2;
  double gyro_bias = 1e-3;
  double accel_bias = 1e-2;
  double contact_pos = 1e-2;
  double gravity = 1e-2;
};

struct NoiseConfig {
  // Continuous-time white-noise densities (per sqrt(Hz)).
  double gyro_density = 2e-4;
  double accel_density = 1.5e-3;
  double gyro_bias_density = 1e-5;
  double accel_bias_density = 1e-4;
  Vec3 contact_slip_density = Vec3(0.01, 0.01, 0.01);

  // Encoder noise (per-sample standard deviations).
  double encoder_pos_stddev = 1e-4;
  double encoder_vel_stddev = 1e-2;

  // LiDAR point noise along the beam.
  double lidar_point_stddev = 0.02;

  // Kinematic measurement floors.
  double velocity_slip_floor = 0.05;    // sigma_slip, m/s
  double position_noise_floor = 0.01;   // sigma_cp0, m

  // Foothold hard-reset standard deviation.
  double contact_reset_stddev = 0.02;

  InitStddev init;
};

struct ImuSample {
  double t = 0.0;
  Vec3 w = Vec3::Zero();
  Vec3 a = Vec3::Zero();
};

struct JointSample {
  double t = 0.0;
  VecX q;
  VecX dq;
};

struct ForceSample {
  double t = 0.0;
  double fz_left = 0.0;
  double fz_right = 0.0;
};

// Static initialization over a stationary window (>= 0.5 s): roll/pitch from
// the mean specific force, gyro bias from the mean rate, gravity fixed to
// [0,0,-9.81] in the aligned world frame.
struct InitialEstimate {
  State x;
  Mat21 P;
};
InitialEstimate initial_state(const std::vector<ImuSample>& window,
                              const NoiseConfig& cfg);

Mat21 initial_covariance(const InitStddev& s);

}  // namespace liko
