#pragma once

#include <vector>

#include <Eigen/Geometry>

#include "liko/state.hpp"

namespace liko {

struct PoseSample {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
};

// Time-ordered poses; ops validate strictly increasing t and unit quaternions.
using Trajectory = std::vector<PoseSample>;

struct Paired {
  PoseSample est;
  PoseSample gt;
};

// Nearest-in-time association, iterating the sparser trajectory. Pairs
// further apart than max_dt are dropped; zero surviving pairs is an error.
std::vector<Paired> associate(const Trajectory& est, const Trajectory& gt,
                              double max_dt = 0.005);

struct Alignment {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

// Least-squares rigid transform (no scale) taking the estimate onto the
// ground truth. Requires >= 3 non-collinear pairs.
Alignment umeyama_align(const std::vector<Paired>& pairs);

// RMSE of translational errors after applying the alignment to the estimate.
double ape_rmse(const std::vector<Paired>& pairs, const Alignment& alignment);

// Translational relative pose error over ground-truth sub-segments of arc
// length `delta` (segment starts strided delta/10 apart), as a percentage of
// the segment length; returns the RMSE of the percentages.
double rpe_percent(const Trajectory& est, const Trajectory& gt,
                   double delta = 1.0);

struct VelocitySample {
  double t = 0.0;
  Vec3 v = Vec3::Zero();
};

// RMSE of velocity vector errors against the reference smoothed with a
// centered `window`-sample moving average.
double velocity_rmse(const std::vector<VelocitySample>& est,
                     const std::vector<VelocitySample>& ref, int window = 20,
                     double max_dt = 0.005);

}  // namespace liko
