#include "liko/kin_measurement.hpp"

namespace liko {

namespace {

// Leg-odometry velocity in the base frame, negated into the world later:
// m(q, dq) = J(q) dq + (w - bg) x fk(q).
Vec3 leg_rate(const KinematicChain& chain, const VecX& q, const VecX& dq,
              const Vec3& w_unbiased) {
  return Vec3(jacobian(chain, q) * dq) + w_unbiased.cross(fk(chain, q));
}

}  // namespace

MeasurementBlock velocity_measurement(const State& x,
                                      const KinematicChain& chain,
                                      const VecX& q, const VecX& dq,
                                      const Vec3& w_imu,
                                      const NoiseConfig& cfg) {
  const Vec3 wb = w_imu - x.bg;
  const Vec3 foot = fk(chain, q);
  const MatX J = jacobian(chain, q);
  const Vec3 m = Vec3(J * dq) + wb.cross(foot);

  MeasurementBlock out;
  out.z = x.v + x.R * m;
  out.H = MatX::Zero(3, idx::state_dim);
  out.H.block<3, 3>(0, idx::theta) = -x.R * skew(m);
  out.H.block<3, 3>(0, idx::vel) = Mat3::Identity();
  out.H.block<3, 3>(0, idx::bg) = x.R * skew(foot);

  // Noise through the encoder channels plus the slip floor. The q channel is
  // linearized by central differences of q -> -R*m(q, dq).
  const int mdof = chain.dof();
  MatX dvdq(3, mdof);
  const double h = 1e-6;
  for (int i = 0; i < mdof; ++i) {
    VecX qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    dvdq.col(i) =
        -x.R * (leg_rate(chain, qp, dq, wb) - leg_rate(chain, qm, dq, wb))
        / (2.0 * h);
  }
  const Mat3 from_dq = x.R * (cfg.encoder_vel_stddev * cfg.encoder_vel_stddev)
                       * J * J.transpose() * x.R.transpose();
  const Mat3 from_q = (cfg.encoder_pos_stddev * cfg.encoder_pos_stddev)
                      * dvdq * dvdq.transpose();
  out.R = from_dq + from_q
          + cfg.velocity_slip_floor * cfg.velocity_slip_floor
                * Mat3::Identity();
  return out;
}

MeasurementBlock position_measurement(const State& x,
                                      const KinematicChain& chain,
                                      const VecX& q, const NoiseConfig& cfg) {
  const Vec3 foot = fk(chain, q);
  const MatX J = jacobian(chain, q);

  MeasurementBlock out;
  out.z = x.pc - x.p - x.R * foot;
  out.H = MatX::Zero(3, idx::state_dim);
  out.H.block<3, 3>(0, idx::theta) = x.R * skew(foot);
  out.H.block<3, 3>(0, idx::pos) = -Mat3::Identity();
  out.H.block<3, 3>(0, idx::pc) = Mat3::Identity();

  out.R = (cfg.encoder_pos_stddev * cfg.encoder_pos_stddev) * x.R * J
              * J.transpose() * x.R.transpose()
          + cfg.position_noise_floor * cfg.position_noise_floor
                * Mat3::Identity();
  return out;
}

}  // namespace liko
