#pragma once

#include "liko/kinematics.hpp"
#include "liko/state.hpp"

namespace liko {

// One stacked measurement block: residual z evaluated at the linearization
// state, Jacobian H w.r.t. the 21-dim error, and noise covariance R.
struct MeasurementBlock {
  VecX z;
  MatX H;
  MatX R;
};

// Leg-odometry base velocity pseudo-measurement, evaluated at x. `w_imu` is
// the latest gyro reading; the bias is taken from x.
MeasurementBlock velocity_measurement(const State& x,
                                      const KinematicChain& chain,
                                      const VecX& q, const VecX& dq,
                                      const Vec3& w_imu,
                                      const NoiseConfig& cfg);

// Foothold position consistency measurement, evaluated at x.
MeasurementBlock position_measurement(const State& x,
                                      const KinematicChain& chain,
                                      const VecX& q, const NoiseConfig& cfg);

}  // namespace liko
