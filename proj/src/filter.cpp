#include "liko/filter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "liko/kin_measurement.hpp"

namespace liko {

namespace {

constexpr double kTimeEps = 1e-9;

template <typename Sample>
void check_ordered(const std::vector<Sample>& stream, const char* name) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (!(stream[i].t > stream[i - 1].t)) {
      throw Error(std::string("schedule: ") + name +
                  " stream not strictly increasing at t=" +
                  std::to_string(stream[i].t));
    }
  }
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::liko:
      return "liko";
    case Mode::liko_ik:
      return "liko_ik";
    case Mode::liko_li:
      return "liko_li";
  }
  return "liko";
}

Mode mode_from_string(const std::string& name) {
  if (name == "liko") return Mode::liko;
  if (name == "liko_ik") return Mode::liko_ik;
  if (name == "liko_li") return Mode::liko_li;
  throw Error("unknown mode '" + name + "' (expected liko, liko_ik, liko_li)");
}

std::vector<Event> schedule(const Dataset& data, Mode mode, double t_start) {
  check_ordered(data.imu, "imu");
  check_ordered(data.joints_left, "joints_left");
  check_ordered(data.joints_right, "joints_right");
  check_ordered(data.forces, "forces");
  for (std::size_t i = 1; i < data.scans.size(); ++i) {
    if (!(data.scans[i].end_time > data.scans[i - 1].end_time)) {
      throw Error("schedule: scans not strictly increasing at end_time=" +
                  std::to_string(data.scans[i].end_time));
    }
  }
  if (data.joints_left.size() != data.joints_right.size()) {
    throw Error("schedule: left/right joint streams differ in length");
  }
  for (std::size_t i = 0; i < data.joints_left.size(); ++i) {
    if (std::abs(data.joints_left[i].t - data.joints_right[i].t) > kTimeEps) {
      throw Error("schedule: left/right joint timestamps disagree at index " +
                  std::to_string(i));
    }
  }
  if (mode != Mode::liko_ik && data.scans.empty()) {
    throw Error("LiDAR required for mode " + to_string(mode));
  }

  const bool use_kin = mode != Mode::liko_li;
  const bool use_lidar = mode != Mode::liko_ik;

  std::vector<Event> events;
  events.reserve(data.imu.size() + data.joints_left.size() +
                 data.scans.size());
  for (std::size_t i = 0; i < data.imu.size(); ++i) {
    if (data.imu[i].t > t_start) {
      events.push_back({EventKind::propagate, data.imu[i].t, i});
    }
  }
  if (use_kin) {
    for (std::size_t i = 0; i < data.joints_left.size(); ++i) {
      if (data.joints_left[i].t > t_start) {
        events.push_back({EventKind::kin_update, data.joints_left[i].t, i});
      }
    }
  }
  if (use_lidar) {
    for (std::size_t i = 0; i < data.scans.size(); ++i) {
      if (data.scans[i].end_time > t_start) {
        events.push_back({EventKind::lidar_update, data.scans[i].end_time, i});
      }
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) {
                     if (std::abs(a.t - b.t) > kTimeEps) return a.t < b.t;
                     return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                   });
  return events;
}

namespace {

struct Runner {
  const Dataset& data;
  const FilterConfig& cfg;
  const StepObserver& observer;

  State x;
  Mat21 P = Mat21::Zero();
  ContactState contact;
  VoxelMap map;
  EventCounts counts;
  std::vector<TrajectorySample> trajectory;

  ImuSample held{};             // zero-order-hold IMU input
  std::size_t force_i = 0;      // next force sample to consume
  std::ptrdiff_t joint_i = -1;  // latest joint sample seen

  Runner(const Dataset& d, const FilterConfig& c, const StepObserver& obs)
      : data(d), cfg(c), observer(obs), map(c.map) {}

  const KinematicChain& chain(Foot foot) const {
    return foot == Foot::right ? cfg.chain_right : cfg.chain_left;
  }

  bool stance_config(Foot foot, VecX* q, VecX* dq) const {
    if (foot == Foot::none || joint_i < 0) return false;
    const JointSample& s = foot == Foot::right
                               ? data.joints_right[std::size_t(joint_i)]
                               : data.joints_left[std::size_t(joint_i)];
    if (q) *q = s.q;
    if (dq) *dq = s.dq;
    return true;
  }

  Mat3 stance_fko() const {
    VecX q;
    if (!stance_config(contact.stance, &q, nullptr)) return Mat3::Identity();
    return fko(chain(contact.stance), q);
  }

  void advance_to(double t) {
    if (t <= x.t + kTimeEps) return;
    Propagated out = propagate(x, P, held, t - x.t, cfg.noise, stance_fko());
    x = out.x;
    P = out.P;
    ++counts.propagate;
  }

  void consume_forces(double t) {
    while (force_i < data.forces.size() &&
           data.forces[force_i].t <= t + kTimeEps) {
      const ForceSample& f = data.forces[force_i];
      if (update_contact(contact, f, cfg.contact)) {
        VecX q;
        if (stance_config(contact.stance, &q, nullptr)) {
          reset_contact(x, P, chain(contact.stance), q,
                        cfg.noise.contact_reset_stddev);
          ++counts.contact_resets;
        }
      }
      ++force_i;
    }
  }

  void record(double t) {
    TrajectorySample s;
    s.t = t;
    s.R = x.R;
    s.p = x.p;
    s.v = x.v;
    s.pc = x.pc;
    s.stance = contact.stance;
    trajectory.push_back(s);
    if (observer) observer(x, P, contact);
  }

  // Handles all events sharing one timestamp: propagate, then contact
  // bookkeeping, then a single iterated update over every measurement due.
  void process_group(const std::vector<Event>& events, std::size_t lo,
                     std::size_t hi) {
    const double t = events[lo].t;

    bool has_kin = false;
    std::ptrdiff_t scan_idx = -1;
    for (std::size_t i = lo; i < hi; ++i) {
      switch (events[i].kind) {
        case EventKind::propagate:
          advance_to(t);
          held = data.imu[events[i].index];
          break;
        case EventKind::kin_update:
          joint_i = std::ptrdiff_t(events[i].index);
          has_kin = true;
          break;
        case EventKind::lidar_update:
          scan_idx = std::ptrdiff_t(events[i].index);
          break;
      }
    }
    advance_to(t);
    consume_forces(t);

    std::vector<Vec3> scan_points;
    if (scan_idx >= 0) {
      const LidarScan& scan = data.scans[std::size_t(scan_idx)];
      DeskewResult dsk = deskew(scan, x, data.imu, cfg.extrinsics);
      if (!dsk.ok) {
        ++counts.scans_rejected;
        scan_idx = -1;
      } else {
        scan_points = std::move(dsk.points);
      }
    }

    VecX q, dq;
    const bool kin_ready =
        has_kin && stance_config(contact.stance, &q, &dq);
    const Foot stance = contact.stance;
    const bool has_lidar = scan_idx >= 0;

    bool lidar_starved = false;
    if (kin_ready || has_lidar) {
      auto provider = [&](const State& s) {
        std::vector<MeasurementBlock> blocks;
        if (kin_ready) {
          blocks.push_back(
              velocity_measurement(s, chain(stance), q, dq, held.w, cfg.noise));
          blocks.push_back(position_measurement(s, chain(stance), q, cfg.noise));
        }
        if (has_lidar) {
          int n_valid = 0;
          MeasurementBlock rows = lidar_rows(s, scan_points, map,
                                             cfg.noise.lidar_point_stddev,
                                             &n_valid);
          if (n_valid == 0) lidar_starved = true;
          if (n_valid > 0) blocks.push_back(std::move(rows));
        }
        return blocks;
      };
      UpdateResult res = iterated_update(x, P, provider, cfg.iekf);
      x = res.x;
      P = res.P;
      ++counts.iekf_iterations[std::min<std::size_t>(
          std::size_t(res.iterations), counts.iekf_iterations.size() - 1)];
      if (kin_ready) ++counts.kin_update;
      if (has_lidar) {
        ++counts.lidar_update;
        if (lidar_starved) ++counts.scans_without_correspondences;
      }
    }

    if (has_lidar) {
      // Insert with the posterior pose; on a starved scan this bootstraps
      // the map so later scans have geometry to match against.
      std::vector<Vec3> world(scan_points.size());
      for (std::size_t i = 0; i < scan_points.size(); ++i) {
        world[i] = x.R * scan_points[i] + x.p;
      }
      map.insert(world);
    }

    record(t);
  }
};

}  // namespace

RunResult run_filter(const Dataset& data, const FilterConfig& cfg,
                     const StepObserver& observer) {
  const auto t_wall0 = std::chrono::steady_clock::now();
  if (data.imu.empty()) throw Error("run_filter: empty IMU stream");

  const double init_end = data.imu.front().t + cfg.init_window;
  std::vector<ImuSample> window;
  for (const ImuSample& s : data.imu) {
    if (s.t <= init_end + kTimeEps) window.push_back(s);
  }
  InitialEstimate init = initial_state(window, cfg.noise);

  Runner run(data, cfg, observer);
  run.x = init.x;
  run.P = init.P;
  run.held = window.back();
  while (run.force_i < data.forces.size() &&
         data.forces[run.force_i].t <= run.x.t + kTimeEps) {
    ++run.force_i;  // pre-init forces are not usable without joint data
  }

  const std::vector<Event> events = schedule(data, cfg.mode, run.x.t);
  std::size_t lo = 0;
  while (lo < events.size()) {
    std::size_t hi = lo + 1;
    while (hi < events.size() &&
           std::abs(events[hi].t - events[lo].t) <= kTimeEps) {
      ++hi;
    }
    run.process_group(events, lo, hi);
    lo = hi;
  }

  RunResult result;
  result.trajectory = std::move(run.trajectory);
  result.counts = run.counts;
  result.final_state = run.x;
  result.final_P = run.P;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_wall0)
          .count();
  return result;
}

}  // namespace liko
