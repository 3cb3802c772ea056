#pragma once

#include <vector>

#include <Eigen/Core>

#include "liko/manifold.hpp"
#include "liko/state.hpp"

namespace liko {

// One revolute joint: fixed translation from the parent frame, an optional
// fixed rotation (axis-angle), then rotation by q about `axis`.
struct Joint {
  Vec3 axis = Vec3(0.0, -1.0, 0.0);
  Vec3 offset = Vec3::Zero();
  Vec3 fixed_rotation = Vec3::Zero();
};

// Leg chain from the IMU/base frame to the foot contact point.
// T(q) = Trans(base_to_hip) * prod_j [Trans(offset_j) * Rot(fixed_j) *
// Rot(axis_j, q_j)] * Trans(foot_offset).
struct KinematicChain {
  Vec3 base_to_hip = Vec3::Zero();
  std::vector<Joint> joints;
  Vec3 foot_offset = Vec3::Zero();

  int dof() const { return static_cast<int>(joints.size()); }
};

// Foot position in the base frame.
Vec3 fk(const KinematicChain& chain, const VecX& q);

// Contact frame orientation relative to the base frame.
Mat3 fko(const KinematicChain& chain, const VecX& q);

// Geometric position Jacobian, 3 x dof.
MatX jacobian(const KinematicChain& chain, const VecX& q);

// Damped least squares IK for the foot position. Throws on non-convergence.
VecX ik_solve(const KinematicChain& chain, const Vec3& target, const VecX& seed,
              double damping = 1e-4, int max_iterations = 200,
              double tolerance = 1e-8);

// Mirror a left-side chain across the x-z plane to get the right-side chain.
KinematicChain mirrored(const KinematicChain& chain);

// 3-DOF pitch-only sagittal leg (hip, knee, ankle; 0.4 m thigh and shank).
KinematicChain sagittal_leg();

// 5-DOF leg used by the simulator (hip yaw/roll/pitch, knee, ankle pitch),
// left side; the right side is mirrored().
KinematicChain simulator_leg();

}  // namespace liko
