#include "liko/state.hpp"

#include <cmath>

namespace liko {

State boxplus(const State& x, const Vec21& delta) {
  State out = x;
  out.R = x.R * exp_so3(delta.segment<3>(idx::theta));
  out.p = x.p + delta.segment<3>(idx::pos);
  out.v = x.v + delta.segment<3>(idx::vel);
  out.bg = x.bg + delta.segment<3>(idx::bg);
  out.ba = x.ba + delta.segment<3>(idx::ba);
  out.pc = x.pc + delta.segment<3>(idx::pc);
  out.g = x.g + delta.segment<3>(idx::grav);
  return out;
}

Vec21 boxminus(const State& x2, const State& x1) {
  Vec21 d;
  d.segment<3>(idx::theta) = log_so3(x1.R.transpose() * x2.R);
  d.segment<3>(idx::pos) = x2.p - x1.p;
  d.segment<3>(idx::vel) = x2.v - x1.v;
  d.segment<3>(idx::bg) = x2.bg - x1.bg;
  d.segment<3>(idx::ba) = x2.ba - x1.ba;
  d.segment<3>(idx::pc) = x2.pc - x1.pc;
  d.segment<3>(idx::grav) = x2.g - x1.g;
  return d;
}

Mat21 initial_covariance(const InitStddev& s) {
  Vec21 d;
  d.segment<3>(idx::theta).setConstant(s.rot * s.rot);
  d.segment<3>(idx::pos).setConstant(s.pos * s.pos);
  d.segment<3>(idx::vel).setConstant(s.vel * s.vel);
  d.segment<3>(idx::bg).setConstant(s.gyro_bias * s.gyro_bias);
  d.segment<3>(idx::ba).setConstant(s.accel_bias * s.accel_bias);
  d.segment<3>(idx::pc).setConstant(s.contact_pos * s.contact_pos);
  d.segment<3>(idx::grav).setConstant(s.gravity * s.gravity);
  return d.asDiagonal();
}

InitialEstimate initial_state(const std::vector<ImuSample>& window,
                              const NoiseConfig& cfg) {
  if (window.size() < 2 || window.back().t - window.front().t < 0.5) {
    throw Error("initial_state: insufficient initialization window ("
                + std::to_string(window.size()) + " samples, "
                + std::to_string(window.empty()
                                     ? 0.0
                                     : window.back().t - window.front().t)
                + " s; need >= 0.5 s)");
  }

  Vec3 mean_w = Vec3::Zero();
  Vec3 mean_a = Vec3::Zero();
  for (const auto& s : window) {
    mean_w += s.w;
    mean_a += s.a;
  }
  mean_w /= static_cast<double>(window.size());
  mean_a /= static_cast<double>(window.size());

  const double an = mean_a.norm();
  if (an < 1e-6) {
    throw Error("initial_state: mean specific force is zero; not stationary");
  }

  // Minimal rotation taking the measured gravity direction to world +z,
  // leaving yaw at zero.
  const Vec3 a_dir = mean_a / an;
  const Vec3 z(0.0, 0.0, 1.0);
  Mat3 R0;
  const Vec3 axis = a_dir.cross(z);
  const double sn = axis.norm();
  const double cs = a_dir.dot(z);
  if (sn < 1e-12) {
    R0 = cs > 0.0 ? Mat3::Identity() : exp_so3(Vec3(M_PI, 0.0, 0.0));
  } else {
    R0 = exp_so3(axis / sn * std::atan2(sn, cs));
  }

  State x;
  x.R = R0;
  x.p.setZero();
  x.v.setZero();
  x.bg = mean_w;
  x.ba.setZero();
  x.pc = x.p;
  x.g = Vec3(0.0, 0.0, -9.81);
  x.t = window.back().t;

  return {x, initial_covariance(cfg.init)};
}

}  // namespace liko
