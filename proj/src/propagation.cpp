#include "liko/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace liko {

namespace {
constexpr double kMaxStep = 0.1;
}

Vec21 process_model(const State& x, const ImuSample& u, const Mat3& contact_fko,
                    const Vec15& w) {
  Vec21 f = Vec21::Zero();
  f.segment<3>(idx::theta) = u.w - x.bg - w.segment<3>(idx::nw);
  f.segment<3>(idx::pos) = x.v;
  f.segment<3>(idx::vel) = x.R * (u.a - x.ba - w.segment<3>(idx::na)) + x.g;
  f.segment<3>(idx::bg) = w.segment<3>(idx::nbg);
  f.segment<3>(idx::ba) = w.segment<3>(idx::nba);
  f.segment<3>(idx::pc) = x.R * contact_fko * w.segment<3>(idx::nc);
  return f;
}

State transition(const State& x, const ImuSample& u, double dt,
                 const Mat3& contact_fko, const Vec15& w) {
  State out = boxplus(x, dt * process_model(x, u, contact_fko, w));
  out.t = x.t + dt;
  return out;
}

void process_jacobians(const State& x, const ImuSample& u, double dt,
                       const Mat3& contact_fko, Mat21& Fx, Mat21x15& Fw) {
  const Vec3 wb = u.w - x.bg;
  const Vec3 ab = u.a - x.ba;
  const Mat3 Jr = a_matrix(dt * wb).transpose();

  Fx.setIdentity();
  Fx.block<3, 3>(idx::theta, idx::theta) = exp_so3(-dt * wb);
  Fx.block<3, 3>(idx::theta, idx::bg) = -dt * Jr;
  Fx.block<3, 3>(idx::pos, idx::vel) = dt * Mat3::Identity();
  Fx.block<3, 3>(idx::vel, idx::theta) = -dt * x.R * skew(ab);
  Fx.block<3, 3>(idx::vel, idx::ba) = -dt * x.R;
  Fx.block<3, 3>(idx::vel, idx::grav) = dt * Mat3::Identity();

  Fw.setZero();
  Fw.block<3, 3>(idx::theta, idx::nw) = -dt * Jr;
  Fw.block<3, 3>(idx::vel, idx::na) = -dt * x.R;
  Fw.block<3, 3>(idx::bg, idx::nbg) = dt * Mat3::Identity();
  Fw.block<3, 3>(idx::ba, idx::nba) = dt * Mat3::Identity();
  Fw.block<3, 3>(idx::pc, idx::nc) = dt * x.R * contact_fko;
}

Vec15 process_noise_diagonal(const NoiseConfig& cfg, double dt) {
  Vec15 q;
  q.segment<3>(idx::nw).setConstant(cfg.gyro_density * cfg.gyro_density);
  q.segment<3>(idx::na).setConstant(cfg.accel_density * cfg.accel_density);
  q.segment<3>(idx::nbg).setConstant(cfg.gyro_bias_density
                                     * cfg.gyro_bias_density);
  q.segment<3>(idx::nba).setConstant(cfg.accel_bias_density
                                     * cfg.accel_bias_density);
  q.segment<3>(idx::nc) = cfg.contact_slip_density.cwiseProduct(
      cfg.contact_slip_density);
  return q / dt;
}

Propagated propagate(const State& x, const Mat21& P, const ImuSample& u,
                     double dt, const NoiseConfig& cfg,
                     const Mat3& contact_fko) {
  if (!(dt > 0.0)) {
    throw Error("propagate: non-positive dt " + std::to_string(dt));
  }
  int substeps = 1;
  if (dt > kMaxStep) {
    substeps = static_cast<int>(std::ceil(dt / kMaxStep));
    std::fprintf(stderr,
                 "liko: propagate step %.6f s exceeds %.1f s cap, splitting "
                 "into %d substeps\n",
                 dt, kMaxStep, substeps);
  }
  const double h = dt / substeps;

  Propagated out;
  out.x = x;
  out.P = P;
  out.Fx.setIdentity();
  out.Fw.setZero();
  for (int i = 0; i < substeps; ++i) {
    Mat21 Fx;
    Mat21x15 Fw;
    process_jacobians(out.x, u, h, contact_fko, Fx, Fw);
    const Vec15 qd = process_noise_diagonal(cfg, h);
    out.x = transition(out.x, u, h, contact_fko);
    out.P = Fx * out.P * Fx.transpose()
            + Fw * qd.asDiagonal() * Fw.transpose();
    out.P = 0.5 * (out.P + out.P.transpose());
    out.Fx = Fx * out.Fx;
    out.Fw = Fw;  // last substep's map; exact when substeps == 1
  }
  return out;
}

std::vector<State> propagate_between(const State& x, const Mat21& P,
                                     const std::vector<ImuSample>& imu,
                                     const std::vector<double>& joint_times,
                                     const NoiseConfig& cfg) {
  for (size_t i = 1; i < imu.size(); ++i) {
    if (imu[i].t < imu[i - 1].t) {
      throw Error("propagate_between: imu stream out of order at t="
                  + std::to_string(imu[i].t));
    }
  }
  std::vector<double> times;
  times.reserve(imu.size() + joint_times.size());
  for (const auto& s : imu) {
    if (s.t > x.t) times.push_back(s.t);
  }
  for (double t : joint_times) {
    if (t > x.t) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return b - a < 1e-9; }),
              times.end());

  std::vector<State> out;
  out.reserve(times.size());
  State cur = x;
  Mat21 cov = P;
  size_t imu_i = 0;
  ImuSample held;
  held.t = x.t;
  held.w.setZero();
  held.a = -x.R.transpose() * x.g;  // hover default until first sample
  if (!imu.empty()) {
    while (imu_i < imu.size() && imu[imu_i].t <= x.t) {
      held = imu[imu_i];
      ++imu_i;
    }
    if (imu_i == 0) held = imu[0];
  }
  for (double t : times) {
    while (imu_i < imu.size() && imu[imu_i].t <= cur.t) {
      held = imu[imu_i];
      ++imu_i;
    }
    const double dt = t - cur.t;
    if (dt > 0.0) {
      Propagated step = propagate(cur, cov, held, dt, cfg, Mat3::Identity());
      cur = step.x;
      cov = step.P;
    }
    out.push_back(cur);
  }
  return out;
}

}  // namespace liko
