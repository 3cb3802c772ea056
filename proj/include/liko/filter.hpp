#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "liko/contact.hpp"
#include "liko/iekf.hpp"
#include "liko/kinematics.hpp"
#include "liko/lidar.hpp"
#include "liko/propagation.hpp"
#include "liko/state.hpp"

namespace liko {

enum class Mode { liko, liko_ik, liko_li };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct FilterConfig {
  NoiseConfig noise;
  ContactConfig contact;
  MapConfig map;
  IekfConfig iekf;
  KinematicChain chain_left = simulator_leg();
  KinematicChain chain_right = mirrored(simulator_leg());
  Extrinsics extrinsics{Mat3::Identity(), Vec3(0.05, 0.0, 0.3)};
  Mode mode = Mode::liko;
  double init_window = 1.0;  // stationary seconds consumed for initialization
};

struct Dataset {
  std::vector<ImuSample> imu;
  std::vector<JointSample> joints_left;
  std::vector<JointSample> joints_right;
  std::vector<ForceSample> forces;
  std::vector<LidarScan> scans;
};

enum class EventKind { propagate, kin_update, lidar_update };

struct Event {
  EventKind kind;
  double t;
  std::size_t index;  // into the source stream
};

// Time-ordered event sequence. Ties resolve propagate -> kin -> lidar.
// Ablation modes drop the corresponding update events.
std::vector<Event> schedule(const Dataset& data, Mode mode, double t_start);

struct EventCounts {
  std::size_t propagate = 0;
  std::size_t kin_update = 0;
  std::size_t lidar_update = 0;
  std::size_t scans_rejected = 0;
  std::size_t scans_without_correspondences = 0;
  std::size_t contact_resets = 0;
  // iekf_iterations[k]: updates that converged after k iterations (last bin
  // collects everything at or beyond the array size).
  std::array<std::size_t, 16> iekf_iterations{};
};

struct TrajectorySample {
  double t = 0.0;
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 pc = Vec3::Zero();
  Foot stance = Foot::none;
};

using StepObserver =
    std::function<void(const State&, const Mat21&, const ContactState&)>;

struct RunResult {
  std::vector<TrajectorySample> trajectory;  // one sample per unique event time
  EventCounts counts;
  State final_state;
  Mat21 final_P = Mat21::Zero();
  double wall_seconds = 0.0;
};

RunResult run_filter(const Dataset& data, const FilterConfig& cfg,
                     const StepObserver& observer = {});

}  // namespace liko
