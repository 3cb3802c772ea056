#include "liko/kinematics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace liko {

namespace {

void check_dims(const KinematicChain& chain, const VecX& q, const char* who) {
  if (q.size() != chain.dof()) {
    throw Error(std::string(who) + ": q has " + std::to_string(q.size())
                + " entries, chain has " + std::to_string(chain.dof())
                + " joints");
  }
}

}  // namespace

Vec3 fk(const KinematicChain& chain, const VecX& q) {
  check_dims(chain, q, "fk");
  Mat3 R = Mat3::Identity();
  Vec3 p = chain.base_to_hip;
  for (int j = 0; j < chain.dof(); ++j) {
    const Joint& joint = chain.joints[j];
    p += R * joint.offset;
    R = R * exp_so3(joint.fixed_rotation) * exp_so3(joint.axis * q[j]);
  }
  return p + R * chain.foot_offset;
}

Mat3 fko(const KinematicChain& chain, const VecX& q) {
  check_dims(chain, q, "fko");
  Mat3 R = Mat3::Identity();
  for (int j = 0; j < chain.dof(); ++j) {
    const Joint& joint = chain.joints[j];
    R = R * exp_so3(joint.fixed_rotation) * exp_so3(joint.axis * q[j]);
  }
  return R;
}

MatX jacobian(const KinematicChain& chain, const VecX& q) {
  check_dims(chain, q, "jacobian");
  const int m = chain.dof();
  std::vector<Vec3> origin(m);
  std::vector<Vec3> axis_base(m);

  Mat3 R = Mat3::Identity();
  Vec3 p = chain.base_to_hip;
  for (int j = 0; j < m; ++j) {
    const Joint& joint = chain.joints[j];
    p += R * joint.offset;
    R = R * exp_so3(joint.fixed_rotation);
    origin[j] = p;
    axis_base[j] = R * joint.axis;
    R = R * exp_so3(joint.axis * q[j]);
  }
  const Vec3 foot = p + R * chain.foot_offset;

  MatX J(3, m);
  for (int j = 0; j < m; ++j) {
    J.col(j) = axis_base[j].cross(foot - origin[j]);
  }
  return J;
}

VecX ik_solve(const KinematicChain& chain, const Vec3& target, const VecX& seed,
              double damping, int max_iterations, double tolerance) {
  check_dims(chain, seed, "ik_solve");
  const int m = chain.dof();
  VecX q = seed;
  double rn = (target - fk(chain, q)).norm();
  for (int it = 0; it < max_iterations; ++it) {
    const Vec3 r = target - fk(chain, q);
    rn = r.norm();
    if (rn < tolerance) return q;
    const MatX J = jacobian(chain, q);
    const MatX A = J.transpose() * J + damping * MatX::Identity(m, m);
    q += A.ldlt().solve(J.transpose() * r);
  }
  rn = (target - fk(chain, q)).norm();
  if (rn < tolerance) return q;
  throw Error("ik_solve: no convergence after " + std::to_string(max_iterations)
              + " iterations, residual " + std::to_string(rn) + " m");
}

KinematicChain mirrored(const KinematicChain& chain) {
  auto flip_point = [](const Vec3& v) { return Vec3(v.x(), -v.y(), v.z()); };
  auto flip_axis = [](const Vec3& v) { return Vec3(-v.x(), v.y(), -v.z()); };

  KinematicChain out;
  out.base_to_hip = flip_point(chain.base_to_hip);
  out.foot_offset = flip_point(chain.foot_offset);
  out.joints.reserve(chain.joints.size());
  for (const Joint& j : chain.joints) {
    Joint mj;
    mj.axis = flip_axis(j.axis);
    mj.offset = flip_point(j.offset);
    mj.fixed_rotation = flip_axis(j.fixed_rotation);
    out.joints.push_back(mj);
  }
  return out;
}

KinematicChain sagittal_leg() {
  KinematicChain c;
  c.base_to_hip = Vec3::Zero();
  Joint hip, knee, ankle;
  hip.axis = Vec3(0.0, -1.0, 0.0);
  hip.offset = Vec3::Zero();
  knee.axis = Vec3(0.0, -1.0, 0.0);
  knee.offset = Vec3(0.0, 0.0, -0.4);
  ankle.axis = Vec3(0.0, -1.0, 0.0);
  ankle.offset = Vec3(0.0, 0.0, -0.4);
  c.joints = {hip, knee, ankle};
  c.foot_offset = Vec3::Zero();
  return c;
}

KinematicChain simulator_leg() {
  KinematicChain c;
  c.base_to_hip = Vec3(0.0, 0.1, -0.05);
  Joint hip_yaw, hip_roll, hip_pitch, knee, ankle;
  hip_yaw.axis = Vec3(0.0, 0.0, 1.0);
  hip_roll.axis = Vec3(1.0, 0.0, 0.0);
  hip_pitch.axis = Vec3(0.0, -1.0, 0.0);
  knee.axis = Vec3(0.0, -1.0, 0.0);
  knee.offset = Vec3(0.0, 0.0, -0.4);
  ankle.axis = Vec3(0.0, -1.0, 0.0);
  ankle.offset = Vec3(0.0, 0.0, -0.4);
  c.joints = {hip_yaw, hip_roll, hip_pitch, knee, ankle};
  c.foot_offset = Vec3(0.0, 0.0, -0.05);
  return c;
}

}  // namespace liko
