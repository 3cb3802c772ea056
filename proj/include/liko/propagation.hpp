#pragma once

#include <vector>

#include <Eigen/Core>

#include "liko/state.hpp"

namespace liko {

using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat21x15 = Eigen::Matrix<double, 21, 15>;

// Continuous-time model f(x, u, w), tangent ordering as idx::. `contact_fko`
// is the stance-foot frame orientation (identity when no stance is known);
// it only shapes how slip noise enters the foothold.
Vec21 process_model(const State& x, const ImuSample& u, const Mat3& contact_fko,
                    const Vec15& w = Vec15::Zero());

// One discrete step: x_out = x [+] dt*f(x, u, w). Exposed for the
// finite-difference checks of the Jacobians below.
State transition(const State& x, const ImuSample& u, double dt,
                 const Mat3& contact_fko, const Vec15& w = Vec15::Zero());

struct Propagated {
  State x;
  Mat21 P;
  Mat21 Fx;
  Mat21x15 Fw;
};

// Error-state covariance propagation. Steps longer than 0.1 s are split into
// equal substeps (with a warning).
Propagated propagate(const State& x, const Mat21& P, const ImuSample& u,
                     double dt, const NoiseConfig& cfg, const Mat3& contact_fko);

// Jacobians of the transition map at w = 0 for a single step.
void process_jacobians(const State& x, const ImuSample& u, double dt,
                       const Mat3& contact_fko, Mat21& Fx, Mat21x15& Fw);

// Propagate through an IMU segment, emitting the state at every unique
// timestamp in the union of IMU and joint sample times after x.t.
// Zero-order hold on the IMU between its samples.
std::vector<State> propagate_between(const State& x, const Mat21& P,
                                     const std::vector<ImuSample>& imu,
                                     const std::vector<double>& joint_times,
                                     const NoiseConfig& cfg);

// Discrete process noise for a step of length dt.
Vec15 process_noise_diagonal(const NoiseConfig& cfg, double dt);

}  // namespace liko
