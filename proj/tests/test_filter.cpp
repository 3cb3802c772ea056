#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "liko/evaluation.hpp"
#include "liko/filter.hpp"
#include "liko/io.hpp"
#include "liko/simulator.hpp"

using namespace liko;

namespace {

ImuSample imu_at(double t, const Vec3& w = Vec3::Zero(),
                 const Vec3& a = Vec3(0, 0, 9.81)) {
  ImuSample s;
  s.t = t;
  s.w = w;
  s.a = a;
  return s;
}

JointSample joints_at(double t) {
  JointSample s;
  s.t = t;
  s.q = VecX::Zero(5);
  s.dq = VecX::Zero(5);
  return s;
}

LidarScan scan_at(double end) {
  LidarScan s;
  s.end_time = end;
  LidarPoint pt;
  pt.t = end;
  pt.p = Vec3(1, 0, 0);
  s.points.push_back(pt);
  return s;
}

Dataset tiny_dataset() {
  Dataset d;
  for (int i = 1; i <= 10; ++i) d.imu.push_back(imu_at(0.001 * i));
  for (int i = 1; i <= 5; ++i) {
    d.joints_left.push_back(joints_at(0.002 * i));
    d.joints_right.push_back(joints_at(0.002 * i));
  }
  d.scans.push_back(scan_at(0.005));
  d.scans.push_back(scan_at(0.010));
  return d;
}

SimOptions quiet_options() {
  SimOptions opt;
  opt.noise.gyro_density = 0.0;
  opt.noise.accel_density = 0.0;
  opt.noise.gyro_bias_density = 0.0;
  opt.noise.accel_bias_density = 0.0;
  opt.noise.encoder_pos_stddev = 0.0;
  opt.noise.encoder_vel_stddev = 0.0;
  opt.noise.lidar_point_stddev = 0.0;
  opt.init_gyro_bias = 0.0;
  opt.init_accel_bias = 0.0;
  opt.force_noise = 0.0;
  return opt;
}

}  // namespace

TEST_CASE("mode names round trip") {
  for (Mode m : {Mode::liko, Mode::liko_ik, Mode::liko_li}) {
    CHECK(mode_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_WITH_AS(mode_from_string("bogus"),
                       doctest::Contains("unknown mode"), Error);
}

TEST_CASE("schedule ordering and ablations") {
  const Dataset d = tiny_dataset();

  SUBCASE("full mode interleaves all streams") {
    const auto ev = schedule(d, Mode::liko, 0.0);
    CHECK(ev.size() == 10 + 5 + 2);
    for (std::size_t i = 1; i < ev.size(); ++i) {
      CHECK(ev[i].t >= ev[i - 1].t - 1e-12);
      if (std::abs(ev[i].t - ev[i - 1].t) <= 1e-9) {
        // Ties resolve propagate, then kin, then lidar.
        CHECK(int(ev[i].kind) > int(ev[i - 1].kind));
      }
    }
    // The triple tie at t = 0.010.
    const auto& last3 = ev;
    const std::size_t n = ev.size();
    CHECK(last3[n - 3].kind == EventKind::propagate);
    CHECK(last3[n - 2].kind == EventKind::kin_update);
    CHECK(last3[n - 1].kind == EventKind::lidar_update);
  }

  SUBCASE("liko_li drops kinematic updates") {
    const auto ev = schedule(d, Mode::liko_li, 0.0);
    CHECK(ev.size() == 10 + 2);
    for (const Event& e : ev) CHECK(e.kind != EventKind::kin_update);
  }

  SUBCASE("liko_ik drops lidar updates") {
    const auto ev = schedule(d, Mode::liko_ik, 0.0);
    CHECK(ev.size() == 10 + 5);
    for (const Event& e : ev) CHECK(e.kind != EventKind::lidar_update);
  }

  SUBCASE("events at or before t_start are skipped") {
    const auto ev = schedule(d, Mode::liko, 0.005);
    for (const Event& e : ev) CHECK(e.t > 0.005);
    CHECK(ev.size() == 5 + 3 + 1);
  }

  SUBCASE("lidar modes require scans") {
    Dataset no_scans = d;
    no_scans.scans.clear();
    CHECK_THROWS_WITH_AS(schedule(no_scans, Mode::liko, 0.0),
                         doctest::Contains("LiDAR required for mode liko"),
                         Error);
    CHECK_NOTHROW(schedule(no_scans, Mode::liko_ik, 0.0));
  }

  SUBCASE("out-of-order streams are rejected by name") {
    Dataset bad = d;
    std::swap(bad.imu[3], bad.imu[4]);
    CHECK_THROWS_WITH_AS(schedule(bad, Mode::liko, 0.0),
                         doctest::Contains("imu stream not strictly increasing"),
                         Error);

    Dataset bad_joints = d;
    bad_joints.joints_right.pop_back();
    CHECK_THROWS_WITH_AS(schedule(bad_joints, Mode::liko, 0.0),
                         doctest::Contains("joint streams differ in length"),
                         Error);
  }
}

TEST_CASE("IMU-only dead reckoning stays put when stationary") {
  Dataset d;
  for (int i = 0; i <= 2000; ++i) d.imu.push_back(imu_at(0.001 * i));
  FilterConfig cfg;
  cfg.mode = Mode::liko_ik;  // no scans in this dataset

  const RunResult r = run_filter(d, cfg);
  CHECK(r.trajectory.size() == 1000);
  CHECK(r.counts.propagate == 1000);
  CHECK(r.counts.kin_update == 0);
  CHECK(r.counts.lidar_update == 0);
  CHECK(r.final_state.p.norm() < 1e-12);
  CHECK(r.final_state.v.norm() < 1e-12);
  CHECK((r.final_state.R - Mat3::Identity()).norm() < 1e-12);
  CHECK((r.final_P - r.final_P.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat21> eig(r.final_P);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("zero-noise walk tracks the ground truth") {
  GaitParams gait;
  gait.pattern = GaitPattern::forward_backward;
  gait.duration = 14.0;
  gait.walk_distance = 2.0;
  gait.seed = 7;
  const SimResult sim = simulate(gait, quiet_options());

  FilterConfig cfg;
  // Noiseless points: tighten the plane-fit spread gate accordingly, or
  // wall/floor junction fits (spread below the 0.1 default) bias the
  // registration by a few millimetres.
  cfg.map.planarity_gate = 0.01;
  const RunResult r = run_filter(sim.data, cfg);

  // Exactly 1 kHz output after the 1 s initialization window.
  CHECK(r.trajectory.size() == 13000);
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
    CHECK(std::abs(r.trajectory[i].t - r.trajectory[i - 1].t - 1e-3) < 1e-9);
  }

  // Discretization floor only.
  const auto pairs =
      associate(to_trajectory(r.trajectory), to_trajectory(sim.truth));
  const double ape = ape_rmse(pairs, umeyama_align(pairs));
  CHECK(ape < 1e-3);

  const double vrmse =
      velocity_rmse(to_velocity(r.trajectory), to_velocity(sim.truth));
  CHECK(vrmse < 5e-3);

  CHECK(r.counts.contact_resets > 10);
  CHECK(r.counts.lidar_update > 100);
  CHECK(r.counts.kin_update > 10000);
  CHECK(r.counts.scans_rejected == 0);

  SUBCASE("ablations run on the same data and drop their stream") {
    FilterConfig li = cfg;
    li.mode = Mode::liko_li;
    const RunResult rli = run_filter(sim.data, li);
    CHECK(rli.counts.kin_update == 0);
    CHECK(rli.counts.contact_resets == 0);  // never sees joint data
    CHECK(rli.counts.lidar_update == r.counts.lidar_update);

    FilterConfig ik = cfg;
    ik.mode = Mode::liko_ik;
    const RunResult rik = run_filter(sim.data, ik);
    CHECK(rik.counts.lidar_update == 0);
    CHECK(rik.counts.scans_rejected == 0);
    CHECK(rik.counts.kin_update == r.counts.kin_update);
  }

  SUBCASE("repeat runs are bit-identical") {
    const RunResult r2 = run_filter(sim.data, cfg);
    REQUIRE(r2.trajectory.size() == r.trajectory.size());
    for (std::size_t i = 0; i < r.trajectory.size(); i += 131) {
      CHECK((r2.trajectory[i].p - r.trajectory[i].p).norm() == 0.0);
      CHECK((r2.trajectory[i].v - r.trajectory[i].v).norm() == 0.0);
      CHECK((r2.trajectory[i].R - r.trajectory[i].R).norm() == 0.0);
    }
    CHECK(boxminus(r2.final_state, r.final_state).norm() == 0.0);
    CHECK(r2.counts.kin_update == r.counts.kin_update);
    CHECK(r2.counts.contact_resets == r.counts.contact_resets);
  }
}

TEST_CASE("observer sees every recorded step with a symmetric covariance") {
  Dataset d;
  for (int i = 0; i <= 1500; ++i) d.imu.push_back(imu_at(0.001 * i));
  FilterConfig cfg;
  cfg.mode = Mode::liko_ik;

  std::size_t calls = 0;
  double worst_asym = 0.0;
  const RunResult r = run_filter(
      d, cfg, [&](const State&, const Mat21& P, const ContactState&) {
        ++calls;
        worst_asym =
            std::max(worst_asym, (P - P.transpose()).cwiseAbs().maxCoeff());
      });
  CHECK(calls == r.trajectory.size());
  CHECK(worst_asym < 1e-12);
}

TEST_CASE("empty IMU stream is rejected") {
  Dataset d;
  FilterConfig cfg;
  cfg.mode = Mode::liko_ik;
  CHECK_THROWS_WITH_AS(run_filter(d, cfg), doctest::Contains("empty IMU"),
                       Error);
}
