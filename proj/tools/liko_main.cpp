#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liko/iekf.hpp"
#include "liko/io.hpp"
#include "liko/propagation.hpp"

namespace {

using namespace liko;

// ---------------------------------------------------------------------------
// Finite-difference oracle sweep (the `check-jacobians` subcommand). The
// differencing here is intentionally self-contained so it can disagree with
// the library if the analytic Jacobians are wrong.

struct Rng {
  std::mt19937_64 g;
  std::normal_distribution<double> N{0.0, 1.0};
  std::uniform_real_distribution<double> U{0.0, 1.0};

  explicit Rng(std::uint64_t seed) : g(seed) {}
  double n() { return N(g); }
  double u() { return U(g); }
  Vec3 n3() { return Vec3(n(), n(), n()); }
  VecX nx(int m) {
    VecX v(m);
    for (int i = 0; i < m; ++i) v[i] = n();
    return v;
  }
};

State random_state(Rng& r) {
  State x;
  x.R = exp_so3(r.n3());
  x.p = r.n3();
  x.v = r.n3();
  x.bg = 0.05 * r.n3();
  x.ba = 0.1 * r.n3();
  x.pc = x.p + 0.5 * r.n3();
  x.g = Vec3(0.0, 0.0, -9.81) + 0.1 * r.n3();
  return x;
}

MatX fd_wrt_state(const std::function<VecX(const State&)>& h, const State& x,
                  double eps = 1e-6) {
  const VecX h0 = h(x);
  MatX J(h0.size(), idx::state_dim);
  for (int j = 0; j < idx::state_dim; ++j) {
    Vec21 d = Vec21::Zero();
    d(j) = eps;
    const VecX hp = h(boxplus(x, d));
    d(j) = -eps;
    const VecX hm = h(boxplus(x, d));
    J.col(j) = (hp - hm) / (2.0 * eps);
  }
  return J;
}

double max_rel(const MatX& analytic, const MatX& fd) {
  const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

double check_process(Rng& r, int configs, bool wrt_noise) {
  double worst = 0.0;
  for (int i = 0; i < configs; ++i) {
    const State x = random_state(r);
    ImuSample u;
    u.t = x.t;
    u.w = r.n3();
    u.a = 3.0 * r.n3() + Vec3(0.0, 0.0, 9.81);
    const double dt = 0.002 + 0.018 * r.u();
    const Mat3 fko_frame = exp_so3(r.n3());
    Mat21 Fx;
    Mat21x15 Fw;
    process_jacobians(x, u, dt, fko_frame, Fx, Fw);
    const State xn = transition(x, u, dt, fko_frame);
    if (!wrt_noise) {
      auto h = [&](const State& s) -> VecX {
        return boxminus(transition(s, u, dt, fko_frame), xn);
      };
      worst = std::max(worst, max_rel(Fx, fd_wrt_state(h, x)));
    } else {
      const double eps = 1e-6;
      MatX fd(idx::state_dim, idx::noise_dim);
      for (int j = 0; j < idx::noise_dim; ++j) {
        Vec15 w = Vec15::Zero();
        w(j) = eps;
        const Vec21 hp = boxminus(transition(x, u, dt, fko_frame, w), xn);
        w(j) = -eps;
        const Vec21 hm = boxminus(transition(x, u, dt, fko_frame, w), xn);
        fd.col(j) = (hp - hm) / (2.0 * eps);
      }
      worst = std::max(worst, max_rel(Fw, fd));
    }
  }
  return worst;
}

double check_kinematic(Rng& r, int configs, bool velocity) {
  const KinematicChain chain = simulator_leg();
  double worst = 0.0;
  for (int i = 0; i < configs; ++i) {
    const State x = random_state(r);
    const VecX q = 0.5 * r.nx(chain.dof());
    const VecX dq = r.nx(chain.dof());
    const Vec3 w_imu = r.n3();
    NoiseConfig cfg;
    const MeasurementBlock block =
        velocity ? velocity_measurement(x, chain, q, dq, w_imu, cfg)
                 : position_measurement(x, chain, q, cfg);
    auto h = [&](const State& s) -> VecX {
      return velocity ? velocity_measurement(s, chain, q, dq, w_imu, cfg).z
                      : position_measurement(s, chain, q, cfg).z;
    };
    worst = std::max(worst, max_rel(block.H, fd_wrt_state(h, x)));
  }
  return worst;
}

double check_lidar(Rng& r, int configs) {
  VoxelMap map;
  std::vector<Vec3> grid;
  for (int gx = -6; gx <= 6; ++gx) {
    for (int gy = -6; gy <= 6; ++gy) {
      grid.push_back(Vec3(0.2 * gx, 0.2 * gy, 0.0));
    }
  }
  map.insert(grid);

  double worst = 0.0;
  for (int i = 0; i < configs; ++i) {
    State x;
    x.R = exp_so3(0.2 * r.n3());
    x.p = Vec3(0.0, 0.0, 0.5) + 0.2 * r.n3();
    std::vector<Vec3> pts;
    for (int k = 0; k < 5; ++k) {
      const Vec3 world(r.u() - 0.5, r.u() - 0.5, 0.02 * r.n());
      pts.push_back(x.R.transpose() * (world - x.p));
    }
    int n_valid = 0;
    const MeasurementBlock block = lidar_rows(x, pts, map, 0.02, &n_valid);
    if (n_valid == 0) continue;
    auto h = [&](const State& s) -> VecX { return lidar_rows(s, pts, map, 0.02).z; };
    worst = std::max(worst, max_rel(block.H, fd_wrt_state(h, x)));
  }
  return worst;
}

double check_boxminus_jacobian(Rng& r, int configs) {
  double worst = 0.0;
  for (int i = 0; i < configs; ++i) {
    const State xp = random_state(r);
    Vec21 d;
    for (int j = 0; j < 21; ++j) d(j) = r.n();
    d.segment<3>(idx::theta) *= 0.5;
    const State xj = boxplus(xp, d);
    const Mat21 J = boxminus_jacobian(xj, xp);
    auto h = [&](const State& s) -> VecX { return boxminus(s, xp); };
    worst = std::max(worst, max_rel(J, fd_wrt_state(h, xj)));
  }
  return worst;
}

double check_fk_jacobian(Rng& r, int configs) {
  const KinematicChain chains[2] = {simulator_leg(), sagittal_leg()};
  double worst = 0.0;
  const double eps = 1e-6;
  for (int i = 0; i < configs; ++i) {
    const KinematicChain& chain = chains[i % 2];
    VecX q = r.nx(chain.dof());
    const MatX J = jacobian(chain, q);
    MatX fd(3, chain.dof());
    for (int j = 0; j < chain.dof(); ++j) {
      VecX qp = q, qm = q;
      qp[j] += eps;
      qm[j] -= eps;
      fd.col(j) = (fk(chain, qp) - fk(chain, qm)) / (2.0 * eps);
    }
    worst = std::max(worst, max_rel(J, fd));
  }
  return worst;
}

double check_a_matrix(Rng& r, int configs) {
  double worst = 0.0;
  const double eps = 1e-7;
  for (int i = 0; i < configs; ++i) {
    Vec3 u = Vec3::Zero();
    if (i > 0) {
      // Keep ‖u‖ well inside (0, π) so the differenced log stays on the
      // principal branch.
      u = r.n3().normalized() * (0.05 + 2.9 * r.u());
    }
    MatX fd(3, 3);
    for (int j = 0; j < 3; ++j) {
      Vec3 e = Vec3::Zero();
      e(j) = eps;
      const Vec3 gp = log_so3(exp_so3(u) * exp_so3(e));
      const Vec3 gm = log_so3(exp_so3(u) * exp_so3(-e));
      fd.col(j) = (gp - gm) / (2.0 * eps);
    }
    // The numerical map is the inverse right Jacobian, i.e. the transpose of
    // the inverse left Jacobian the library exposes.
    const MatX analytic = a_matrix_inverse(u).transpose();
    worst = std::max(worst, max_rel(analytic, fd));
  }
  return worst;
}

int run_jacobian_checks(std::uint64_t seed, int configs) {
  struct Row {
    const char* name;
    double err;
  };
  Rng r(seed);
  const Row rows[] = {
      {"F_x", check_process(r, configs, false)},
      {"F_w", check_process(r, configs, true)},
      {"H_contact_velocity", check_kinematic(r, configs, true)},
      {"H_contact_position", check_kinematic(r, configs, false)},
      {"H_lidar", check_lidar(r, configs)},
      {"boxminus_jacobian", check_boxminus_jacobian(r, configs)},
      {"fk_jacobian", check_fk_jacobian(r, configs)},
      {"a_matrix_inverse", check_a_matrix(r, configs)},
  };
  const double tol = 1e-5;
  bool ok = true;
  for (const Row& row : rows) {
    const bool pass = row.err < tol;
    ok = ok && pass;
    std::printf("%-22s max_rel_err=%.3e  n=%d  %s\n", row.name, row.err,
                configs, pass ? "OK" : "FAIL");
  }
  std::printf("check-jacobians: %s (tolerance %.0e)\n",
              ok ? "all oracles passed" : "FAILURE", tol);
  return ok ? 0 : 3;
}

// ---------------------------------------------------------------------------

int run_sim(const GaitParams& gait, const SimOptions& opt,
            const std::string& out) {
  const SimResult sim = simulate(gait, opt);
  DatasetMeta meta;
  meta.dof = simulator_leg().dof();
  meta.rates = opt.rates;
  meta.extrinsics = opt.extrinsics;
  meta.pattern = to_string(gait.pattern);
  meta.seed = gait.seed;
  meta.duration = gait.duration;
  save_dataset(out, sim.data, meta);
  save_tum(out + "/groundtruth.tum", to_trajectory(sim.truth));
  save_velocity_csv(out + "/groundtruth_velocity.csv", to_velocity(sim.truth));
  std::printf("wrote %s: %zu imu, %zu joint, %zu force samples, %zu scans\n",
              out.c_str(), sim.data.imu.size(), sim.data.joints_left.size(),
              sim.data.forces.size(), sim.data.scans.size());
  return 0;
}

int run_run(const std::string& dataset_dir, const std::string& config_path,
            const std::string& mode_override, const std::string& out) {
  const Dataset data = load_dataset(dataset_dir);
  const DatasetMeta meta = load_meta(dataset_dir);
  FilterConfig base;
  base.extrinsics = meta.extrinsics;
  RunConfig cfg;
  cfg.filter = base;
  if (!config_path.empty()) cfg = load_run_config(config_path, base);
  if (!mode_override.empty()) {
    cfg.filter.mode = mode_from_string(mode_override);
  }
  const RunResult res = run_filter(data, cfg.filter);
  save_tum(out + "/trajectory.tum", to_trajectory(res.trajectory));
  save_velocity_csv(out + "/velocity.csv", to_velocity(res.trajectory));
  save_footholds_csv(out + "/footholds.csv", res.trajectory);
  save_stats_json(out + "/stats.json", res, cfg.filter.mode);
  std::printf(
      "mode=%s samples=%zu propagate=%zu kin=%zu lidar=%zu rejected=%zu "
      "no_corr=%zu resets=%zu wall=%.2fs\n",
      to_string(cfg.filter.mode).c_str(), res.trajectory.size(),
      res.counts.propagate, res.counts.kin_update, res.counts.lidar_update,
      res.counts.scans_rejected, res.counts.scans_without_correspondences,
      res.counts.contact_resets, res.wall_seconds);
  std::printf("wrote %s/{trajectory.tum,velocity.csv,footholds.csv,stats.json}\n",
              out.c_str());
  return 0;
}

int run_eval(const std::string& est_path, const std::string& gt_path,
             double rpe_delta, double max_dt, const std::string& est_vel,
             const std::string& gt_vel, int vel_window) {
  const Trajectory est = load_tum(est_path);
  const Trajectory gt = load_tum(gt_path);
  const std::vector<Paired> pairs = associate(est, gt, max_dt);
  const Alignment align = umeyama_align(pairs);
  const double ape = ape_rmse(pairs, align);

  double rpe = std::nan("");
  try {
    rpe = rpe_percent(est, gt, rpe_delta);
  } catch (const Error& e) {
    std::fprintf(stderr, "warning: RPE unavailable: %s\n", e.what());
  }

  std::printf("APE RMSE: %.6f m over %zu pairs\n", ape, pairs.size());
  if (std::isfinite(rpe)) {
    std::printf("RPE: %.6f %% per %.2f m\n", rpe, rpe_delta);
  }
  std::printf("ape_rmse_m=%.6f\n", ape);
  std::printf("rpe_percent=%.6f\n", rpe);

  if (!est_vel.empty() && !gt_vel.empty()) {
    const std::vector<VelocitySample> ev = load_velocity_csv(est_vel);
    const std::vector<VelocitySample> gv = load_velocity_csv(gt_vel);
    const double vrmse = velocity_rmse(ev, gv, vel_window, max_dt);
    std::printf("Velocity RMSE: %.6f m/s\n", vrmse);
    std::printf("velocity_rmse_mps=%.6f\n", vrmse);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LIKO: LiDAR-inertial-kinematic state estimation for bipeds"};
  app.require_subcommand(1);

  // sim
  CLI::App* sim = app.add_subcommand("sim", "synthesize a locomotion dataset");
  std::string sim_pattern = "forward_backward", sim_out;
  GaitParams gait;
  SimOptions sopt;
  bool zero_noise = false;
  sim->add_option("--pattern", sim_pattern,
                  "forward_backward|square_walk|walk_in_place_turn|up_slope");
  sim->add_option("--duration", gait.duration, "dataset length, s");
  sim->add_option("--seed", gait.seed, "RNG seed");
  sim->add_option("--out", sim_out, "output dataset directory")->required();
  sim->add_option("--step-length", gait.step_length, "m");
  sim->add_option("--step-duration", gait.step_duration, "s");
  sim->add_option("--double-support", gait.double_support_ratio, "ratio");
  sim->add_option("--base-height", gait.base_height, "m");
  sim->add_option("--lead-in", gait.lead_in, "initial stand, s");
  sim->add_option("--lead-out", gait.lead_out, "minimum final stand, s");
  sim->add_option("--walk-distance", gait.walk_distance, "m");
  sim->add_option("--turn-angle", gait.turn_angle, "rad");
  sim->add_option("--swing-height", gait.swing_height, "m");
  sim->add_option("--imu-rate", sopt.rates.imu, "Hz");
  sim->add_option("--joint-rate", sopt.rates.joints, "Hz");
  sim->add_option("--force-rate", sopt.rates.forces, "Hz");
  sim->add_option("--lidar-rate", sopt.rates.lidar, "Hz");
  sim->add_option("--points-per-scan", sopt.rates.points_per_scan, "count");
  sim->add_flag("--zero-noise", zero_noise,
                "noise-free streams and zero initial biases");

  // run
  CLI::App* run = app.add_subcommand("run", "run the filter on a dataset");
  std::string run_dataset, run_config, run_mode, run_out;
  run->add_option("--dataset", run_dataset, "dataset directory")->required();
  run->add_option("--config", run_config, "JSON config file");
  run->add_option("--mode", run_mode, "liko|liko_ik|liko_li (overrides config)");
  run->add_option("--out", run_out, "output directory")->required();

  // eval
  CLI::App* eval = app.add_subcommand("eval", "trajectory accuracy metrics");
  std::string eval_est, eval_gt, eval_est_vel, eval_gt_vel;
  double rpe_delta = 1.0, eval_max_dt = 0.005;
  int vel_window = 20;
  eval->add_option("--est", eval_est, "estimated trajectory (TUM)")->required();
  eval->add_option("--gt", eval_gt, "ground-truth trajectory (TUM)")->required();
  eval->add_option("--rpe-delta", rpe_delta, "segment arc length, m");
  eval->add_option("--max-dt", eval_max_dt, "association tolerance, s");
  eval->add_option("--est-vel", eval_est_vel, "estimated velocity CSV");
  eval->add_option("--gt-vel", eval_gt_vel, "ground-truth velocity CSV");
  eval->add_option("--vel-window", vel_window, "smoothing window, samples");

  // check-jacobians
  CLI::App* check =
      app.add_subcommand("check-jacobians", "finite-difference oracle sweep");
  std::uint64_t check_seed = 42;
  int check_configs = 100;
  check->add_option("--seed", check_seed, "RNG seed");
  check->add_option("--configs", check_configs, "configurations per family");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      gait.pattern = gait_pattern_from_string(sim_pattern);
      if (zero_noise) {
        sopt.noise.gyro_density = 0.0;
        sopt.noise.accel_density = 0.0;
        sopt.noise.gyro_bias_density = 0.0;
        sopt.noise.accel_bias_density = 0.0;
        sopt.noise.encoder_pos_stddev = 0.0;
        sopt.noise.encoder_vel_stddev = 0.0;
        sopt.noise.lidar_point_stddev = 0.0;
        sopt.init_gyro_bias = 0.0;
        sopt.init_accel_bias = 0.0;
        sopt.force_noise = 0.0;
      }
      return run_sim(gait, sopt, sim_out);
    }
    if (run->parsed()) {
      return run_run(run_dataset, run_config, run_mode, run_out);
    }
    if (eval->parsed()) {
      return run_eval(eval_est, eval_gt, rpe_delta, eval_max_dt, eval_est_vel,
                      eval_gt_vel, vel_window);
    }
    if (check->parsed()) {
      return run_jacobian_checks(check_seed, check_configs);
    }
  } catch (const liko::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
