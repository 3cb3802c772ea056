#include "liko/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace liko {

namespace {

const Vec3 kGravity(0.0, 0.0, -9.81);
constexpr double kGridDt = 1e-3;   // ground-truth grid
constexpr double kLateral = 0.1;   // hip y offset of the simulator leg
constexpr double kFootDrop = 0.05; // hip z offset below the base

double smooth5(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

Mat3 yaw_rotation(double yaw) {
  Mat3 R = Mat3::Identity();
  const double c = std::cos(yaw), s = std::sin(yaw);
  R(0, 0) = c;
  R(0, 1) = -s;
  R(1, 0) = s;
  R(1, 1) = c;
  return R;
}

Vec3 normal3(std::mt19937_64& rng, std::normal_distribution<double>& n) {
  const double a = n(rng), b = n(rng), c = n(rng);
  return Vec3(a, b, c);
}

Vec3 random_unit(std::mt19937_64& rng, std::normal_distribution<double>& n) {
  Vec3 v;
  do {
    v = normal3(rng, n);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

// Sampling stride for a stream of `rate` Hz against the 1 kHz grid.
long stream_stride(double rate, const char* name) {
  const double grid_rate = 1.0 / kGridDt;
  if (rate <= 0.0 || rate > grid_rate + 1e-9) {
    throw Error(std::string(name) + " rate must be in (0, 1000] Hz");
  }
  const double ratio = grid_rate / rate;
  const long stride = std::lround(ratio);
  if (stride < 1 || std::abs(ratio - double(stride)) > 1e-6) {
    throw Error(std::string(name) + " rate must divide the 1 kHz grid");
  }
  return stride;
}

struct BaseSeg {
  double t0, t1;
  Eigen::Vector2d xy0, xy1;
  double yaw0, yaw1;
  bool step;  // stepping segments carry the vertical bob
};

struct Swing {
  double sw0, sw1;
  Foot foot;
  Vec3 from, to;
};

struct GaitBuilder {
  const GaitParams& P;
  const WorldModel& W;

  std::vector<BaseSeg> segs;
  std::vector<Swing> swings;
  double t = 0.0;
  Eigen::Vector2d xy{0.0, 0.0};
  double yaw = 0.0;
  Vec3 foot_cur[2];  // left, right
  Vec3 foot0[2];
  Foot next_swing = Foot::left;

  GaitBuilder(const GaitParams& p, const WorldModel& w) : P(p), W(w) {
    foot_cur[0] = foothold_at(xy, yaw, Foot::left);
    foot_cur[1] = foothold_at(xy, yaw, Foot::right);
    foot0[0] = foot_cur[0];
    foot0[1] = foot_cur[1];
  }

  Vec3 foothold_at(const Eigen::Vector2d& base, double heading,
                   Foot foot) const {
    const double lat = foot == Foot::left ? kLateral : -kLateral;
    const double x = base.x() - std::sin(heading) * lat;
    const double y = base.y() + std::cos(heading) * lat;
    return Vec3(x, y, W.terrain(x, y));
  }

  void stand(double dur) {
    if (dur <= 1e-12) return;
    segs.push_back({t, t + dur, xy, xy, yaw, yaw, false});
    t += dur;
  }

  void step_to(const Eigen::Vector2d& xy1, double yaw1) {
    const double T = P.step_duration;
    const double margin = P.double_support_ratio * T / 2.0;
    const Foot f = next_swing;
    const int fi = f == Foot::left ? 0 : 1;
    segs.push_back({t, t + T, xy, xy1, yaw, yaw1, true});
    Swing sw;
    sw.sw0 = t + margin;
    sw.sw1 = t + T - margin;
    sw.foot = f;
    sw.from = foot_cur[fi];
    sw.to = foothold_at(xy1, yaw1, f);
    swings.push_back(sw);
    foot_cur[fi] = sw.to;
    xy = xy1;
    yaw = yaw1;
    t += T;
    next_swing = f == Foot::left ? Foot::right : Foot::left;
  }

  void walk(double dist) {
    if (std::abs(dist) < 1e-12) return;
    const int n =
        std::max(1, int(std::ceil(std::abs(dist) / P.step_length - 1e-9)));
    const double quota = dist / n;
    const Eigen::Vector2d dir(std::cos(yaw), std::sin(yaw));
    for (int k = 0; k < n; ++k) step_to(xy + quota * dir, yaw);
    step_to(xy, yaw);  // bring the trailing foot under its hip
  }

  void turn(double angle) {
    if (std::abs(angle) < 1e-12) return;
    const int n =
        std::max(1, int(std::ceil(std::abs(angle) / P.turn_per_step - 1e-9)));
    const double quota = angle / n;
    for (int k = 0; k < n; ++k) step_to(xy, yaw + quota);
    step_to(xy, yaw);
  }
};

void validate(const GaitParams& P) {
  if (P.duration <= 0.0) throw Error("gait duration must be positive");
  if (P.step_duration <= 0.0) throw Error("step duration must be positive");
  if (P.step_length <= 0.0) throw Error("step length must be positive");
  if (P.double_support_ratio < 0.0 || P.double_support_ratio >= 1.0) {
    throw Error("double support ratio must be in [0, 1)");
  }
  if (P.lead_in < 0.0 || P.lead_out < 0.0) {
    throw Error("lead_in/lead_out must be non-negative");
  }
  if (P.turn_per_step <= 0.0) throw Error("turn_per_step must be positive");
  const double reach =
      std::hypot(P.base_height - kFootDrop, 1.35 * P.step_length);
  if (reach > 0.82) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "infeasible step length for leg geometry "
                  "(required reach %.3f m > 0.82 m)",
                  reach);
    throw Error(buf);
  }
}

Vec3 swing_arc(const Swing& s, double u, double apex) {
  const double e = smooth5(u);
  Vec3 p = s.from + e * (s.to - s.from);
  p.z() = s.from.z() + e * (s.to.z() - s.from.z()) + apex * std::sin(M_PI * e);
  return p;
}

// Interpolate the dense trajectory with the same conventions the grid was
// built from (piecewise-constant ground-truth rate and velocity).
void pose_at(const GroundTruth& gt, double t, Mat3& R, Vec3& p) {
  const double dt = gt.t[1] - gt.t[0];
  const double x = (t - gt.t.front()) / dt;
  const long last = long(gt.size()) - 2;
  const long k = std::clamp(long(std::floor(x)), 0L, last);
  const double s = std::clamp(x - double(k), 0.0, 1.0);
  R = gt.R[std::size_t(k)] *
      exp_so3(s * log_so3(gt.R[std::size_t(k)].transpose() *
                          gt.R[std::size_t(k) + 1]));
  p = gt.p[std::size_t(k)] +
      s * (gt.p[std::size_t(k) + 1] - gt.p[std::size_t(k)]);
}

// Trapezoidal stance weight: 0 in swing, 1 deep in stance, quintic ramps of
// length `ramp` just inside each contact interval.
double stance_weight(const std::vector<Footstep>& intervals, double t,
                     double ramp) {
  auto it = std::upper_bound(
      intervals.begin(), intervals.end(), t,
      [](double tt, const Footstep& f) { return tt < f.touchdown; });
  if (it == intervals.begin()) return 0.0;
  const Footstep& f = *(it - 1);
  if (ramp <= 0.0) return t <= f.liftoff ? 1.0 : 0.0;
  const double r = std::min(
      {(t - f.touchdown) / ramp, (f.liftoff - t) / ramp, 1.0});
  return r <= 0.0 ? 0.0 : smooth5(r);
}

}  // namespace

std::string to_string(GaitPattern pattern) {
  switch (pattern) {
    case GaitPattern::forward_backward:
      return "forward_backward";
    case GaitPattern::square_walk:
      return "square_walk";
    case GaitPattern::walk_in_place_turn:
      return "walk_in_place_turn";
    case GaitPattern::up_slope:
      return "up_slope";
  }
  return "forward_backward";
}

GaitPattern gait_pattern_from_string(const std::string& name) {
  if (name == "forward_backward") return GaitPattern::forward_backward;
  if (name == "square_walk") return GaitPattern::square_walk;
  if (name == "walk_in_place_turn") return GaitPattern::walk_in_place_turn;
  if (name == "up_slope") return GaitPattern::up_slope;
  throw Error("unknown gait pattern '" + name + "'");
}

double WorldModel::terrain(double x, double /*y*/) const {
  if (!sloped) return 0.0;
  const double w = blend_halfwidth;
  if (x <= slope_start - w) return 0.0;
  const double ramp = slope_grade * (x - slope_start);
  if (x >= slope_start + w) return ramp;
  return ramp * smooth5((x - (slope_start - w)) / (2.0 * w));
}

WorldModel world_model(const GaitParams& params) {
  WorldModel w;
  w.sloped = params.pattern == GaitPattern::up_slope;
  const double half = 5.0, height = 3.0;

  Plane p;
  if (!w.sloped) {
    p.normal = Vec3::UnitZ();
    p.anchor = Vec3::Zero();
    p.u_axis = Vec3::UnitX();
    p.v_axis = Vec3::UnitY();
    p.u_extent = half;
    p.v_extent = half;
    w.planes.push_back(p);
  } else {
    // Floor up to the slope start, then the 10 degree ramp. The patches meet
    // at x = slope_start; the walking terrain blends smoothly between them.
    p.normal = Vec3::UnitZ();
    p.anchor = Vec3((w.slope_start - half) / 2.0, 0.0, 0.0);
    p.u_axis = Vec3::UnitX();
    p.v_axis = Vec3::UnitY();
    p.u_extent = (w.slope_start + half) / 2.0;
    p.v_extent = half;
    w.planes.push_back(p);

    const double theta = std::atan(w.slope_grade);
    const double run = half - w.slope_start;
    Plane s;
    s.normal = Vec3(-std::sin(theta), 0.0, std::cos(theta));
    s.u_axis = Vec3(std::cos(theta), 0.0, std::sin(theta));
    s.v_axis = Vec3::UnitY();
    s.u_extent = run / std::cos(theta) / 2.0;
    s.v_extent = half;
    s.anchor = Vec3(w.slope_start + run / 2.0, 0.0,
                    w.slope_grade * run / 2.0);
    w.planes.push_back(s);
  }

  const Vec3 wall_u = Vec3::UnitZ();
  struct WallSpec {
    Vec3 anchor, normal, v;
  };
  const WallSpec walls[4] = {
      {Vec3(half, 0, height / 2), Vec3(-1, 0, 0), Vec3(0, 1, 0)},
      {Vec3(-half, 0, height / 2), Vec3(1, 0, 0), Vec3(0, 1, 0)},
      {Vec3(0, half, height / 2), Vec3(0, -1, 0), Vec3(1, 0, 0)},
      {Vec3(0, -half, height / 2), Vec3(0, 1, 0), Vec3(1, 0, 0)},
  };
  for (const WallSpec& spec : walls) {
    Plane wall;
    wall.normal = spec.normal;
    wall.anchor = spec.anchor;
    wall.u_axis = wall_u;
    wall.v_axis = spec.v;
    wall.u_extent = height / 2.0;
    wall.v_extent = half;
    w.planes.push_back(wall);
  }
  return w;
}

GroundTruth generate_gait(const GaitParams& params) {
  validate(params);
  const WorldModel world = world_model(params);
  GaitBuilder b(params, world);

  b.stand(params.lead_in);
  switch (params.pattern) {
    case GaitPattern::forward_backward:
      b.walk(params.walk_distance);
      b.stand(1.0);
      b.walk(-params.walk_distance);
      break;
    case GaitPattern::square_walk:
      b.walk(1.5);
      for (int side = 0; side < 4; ++side) {
        b.turn(M_PI / 2.0);
        b.walk(side < 3 ? 3.0 : 1.5);
      }
      break;
    case GaitPattern::walk_in_place_turn:
      b.turn(params.turn_angle);
      break;
    case GaitPattern::up_slope:
      b.walk(params.walk_distance);
      break;
  }
  const double rest = params.duration - b.t;
  if (rest < params.lead_out - 1e-9) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "duration %.3f s too short for pattern; needs at least %.3f s",
                  params.duration, b.t + params.lead_out);
    throw Error(buf);
  }
  b.stand(rest);

  GroundTruth gt;
  gt.support_ramp = params.double_support_ratio * params.step_duration;
  const long n = std::lround(params.duration / kGridDt);
  gt.t.resize(std::size_t(n) + 1);
  gt.R.resize(gt.t.size());
  gt.p.resize(gt.t.size());
  gt.v.resize(gt.t.size());
  gt.foot_left.resize(gt.t.size());
  gt.foot_right.resize(gt.t.size());
  gt.contact_left.resize(gt.t.size());
  gt.contact_right.resize(gt.t.size());

  std::vector<Swing> swings_of[2];
  for (const Swing& s : b.swings) {
    swings_of[s.foot == Foot::left ? 0 : 1].push_back(s);
  }

  std::size_t seg_i = 0;
  std::size_t swing_ptr[2] = {0, 0};
  Vec3 hold[2] = {b.foot0[0], b.foot0[1]};
  for (long k = 0; k <= n; ++k) {
    const double t = double(k) * kGridDt;
    gt.t[std::size_t(k)] = t;

    while (seg_i + 1 < b.segs.size() && t >= b.segs[seg_i].t1) ++seg_i;
    const BaseSeg& seg = b.segs[seg_i];
    const double span = seg.t1 - seg.t0;
    const double u = span > 0.0 ? std::clamp((t - seg.t0) / span, 0.0, 1.0) : 1.0;
    const double e = smooth5(u);
    const Eigen::Vector2d xy = seg.xy0 + e * (seg.xy1 - seg.xy0);
    const double yaw = seg.yaw0 + e * (seg.yaw1 - seg.yaw0);
    double bob = 0.0;
    if (seg.step) {
      const double f = u * (1.0 - u);
      bob = -params.bob_amplitude * 64.0 * f * f * f;
    }
    gt.R[std::size_t(k)] = yaw_rotation(yaw);
    gt.p[std::size_t(k)] = Vec3(
        xy.x(), xy.y(),
        world.terrain(xy.x(), xy.y()) + params.base_height + bob);

    for (int fi = 0; fi < 2; ++fi) {
      const std::vector<Swing>& list = swings_of[fi];
      std::size_t& ptr = swing_ptr[fi];
      while (ptr < list.size() && t >= list[ptr].sw1) {
        hold[fi] = list[ptr].to;
        ++ptr;
      }
      bool in_swing = false;
      Vec3 fp = hold[fi];
      if (ptr < list.size() && t > list[ptr].sw0 && t < list[ptr].sw1) {
        in_swing = true;
        const Swing& s = list[ptr];
        fp = swing_arc(s, (t - s.sw0) / (s.sw1 - s.sw0), params.swing_height);
      }
      if (fi == 0) {
        gt.foot_left[std::size_t(k)] = fp;
        gt.contact_left[std::size_t(k)] = in_swing ? 0 : 1;
      } else {
        gt.foot_right[std::size_t(k)] = fp;
        gt.contact_right[std::size_t(k)] = in_swing ? 0 : 1;
      }
    }
  }
  for (long k = 0; k < n; ++k) {
    gt.v[std::size_t(k)] =
        (gt.p[std::size_t(k) + 1] - gt.p[std::size_t(k)]) / kGridDt;
  }
  gt.v[std::size_t(n)] = n > 0 ? gt.v[std::size_t(n) - 1] : Vec3::Zero();

  const double open_end = params.duration + 1.0;
  for (int fi = 0; fi < 2; ++fi) {
    const Foot foot = fi == 0 ? Foot::left : Foot::right;
    const std::vector<Swing>& list = swings_of[fi];
    Footstep fs;
    fs.foot = foot;
    fs.position = b.foot0[fi];
    fs.touchdown = -1.0;
    fs.liftoff = list.empty() ? open_end : list.front().sw0;
    gt.footsteps.push_back(fs);
    for (std::size_t i = 0; i < list.size(); ++i) {
      Footstep next;
      next.foot = foot;
      next.position = list[i].to;
      next.touchdown = list[i].sw1;
      next.liftoff = i + 1 < list.size() ? list[i + 1].sw0 : open_end;
      gt.footsteps.push_back(next);
    }
  }
  std::stable_sort(gt.footsteps.begin(), gt.footsteps.end(),
                   [](const Footstep& a, const Footstep& b) {
                     return a.touchdown < b.touchdown;
                   });
  return gt;
}

std::vector<ImuSample> synthesize_imu(const GroundTruth& gt,
                                      const SimOptions& opt,
                                      std::uint64_t seed,
                                      std::uint64_t bias_seed, Vec3* gyro_bias0,
                                      Vec3* accel_bias0) {
  if (gt.size() < 2) throw Error("synthesize_imu: ground truth too short");
  const long stride = stream_stride(opt.rates.imu, "imu");
  const double dt = stride * kGridDt;
  const long n = long(gt.size()) - 1;

  std::mt19937_64 rng(seed), brng(bias_seed);
  std::normal_distribution<double> N(0.0, 1.0), BN(0.0, 1.0);
  Vec3 bg = opt.init_gyro_bias * random_unit(brng, BN);
  Vec3 ba = opt.init_accel_bias * random_unit(brng, BN);
  if (gyro_bias0) *gyro_bias0 = bg;
  if (accel_bias0) *accel_bias0 = ba;

  const double sw = opt.noise.gyro_density / std::sqrt(dt);
  const double sa = opt.noise.accel_density / std::sqrt(dt);
  const double swalk_g = opt.noise.gyro_bias_density * std::sqrt(dt);
  const double swalk_a = opt.noise.accel_bias_density * std::sqrt(dt);

  std::vector<ImuSample> out;
  out.reserve(std::size_t(n / stride) + 1);
  for (long k = 0; k + stride <= n; k += stride) {
    const std::size_t i = std::size_t(k), j = std::size_t(k + stride);
    ImuSample s;
    s.t = gt.t[i];
    const Vec3 w_true = log_so3(gt.R[i].transpose() * gt.R[j]) / dt;
    const Vec3 a_true = gt.R[i].transpose() * ((gt.v[j] - gt.v[i]) / dt - kGravity);
    s.w = w_true + bg + sw * normal3(rng, N);
    s.a = a_true + ba + sa * normal3(rng, N);
    bg += swalk_g * normal3(rng, N);
    ba += swalk_a * normal3(rng, N);
    out.push_back(s);
  }
  return out;
}

std::vector<JointSample> synthesize_joints(const GroundTruth& gt,
                                           const KinematicChain& chain,
                                           Foot foot, const SimOptions& opt,
                                           std::uint64_t seed) {
  if (gt.size() < 2) throw Error("synthesize_joints: ground truth too short");
  if (foot == Foot::none) throw Error("synthesize_joints: foot must be set");
  const long stride = stream_stride(opt.rates.joints, "joints");
  const double dt = stride * kGridDt;
  const long n = long(gt.size()) - 1;
  const std::vector<Vec3>& foot_pos =
      foot == Foot::left ? gt.foot_left : gt.foot_right;

  const int dof = chain.dof();
  VecX q_seed = VecX::Zero(dof);
  if (dof == 5) {
    q_seed << 0.0, 0.0, 0.3, -0.6, 0.3;
  } else if (dof == 3) {
    q_seed << 0.3, -0.6, 0.3;
  }

  std::vector<VecX> q;
  q.reserve(std::size_t(n / stride) + 2);
  for (long k = 0; k <= n; k += stride) {
    const std::size_t i = std::size_t(k);
    const Vec3 target = gt.R[i].transpose() * (foot_pos[i] - gt.p[i]);
    try {
      q_seed = ik_solve(chain, target, q_seed);
    } catch (const Error& e) {
      char buf[192];
      std::snprintf(buf, sizeof(buf),
                    "synthesize_joints: IK failed at t=%.3f, target=[%.4f "
                    "%.4f %.4f]: ",
                    gt.t[i], target.x(), target.y(), target.z());
      throw Error(buf + std::string(e.what()));
    }
    q.push_back(q_seed);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  // Constant zero-position error per joint; differencing cancels it in dq.
  VecX offset(dof);
  for (int d = 0; d < dof; ++d) {
    offset[d] = opt.encoder_offset_stddev * N(rng);
  }
  std::vector<JointSample> out;
  out.reserve(q.size());
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    JointSample s;
    s.t = gt.t[std::size_t(long(i) * stride)];
    s.q = q[i] + offset;
    s.dq = (q[i + 1] - q[i]) / dt;
    for (int d = 0; d < dof; ++d) {
      s.q[d] += opt.noise.encoder_pos_stddev * N(rng);
    }
    for (int d = 0; d < dof; ++d) {
      s.dq[d] += opt.noise.encoder_vel_stddev * N(rng);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ForceSample> synthesize_forces(const GroundTruth& gt,
                                           const SimOptions& opt,
                                           std::uint64_t seed) {
  if (gt.size() < 2) throw Error("synthesize_forces: ground truth too short");
  const long stride = stream_stride(opt.rates.forces, "forces");
  const long n = long(gt.size()) - 1;

  std::vector<Footstep> intervals[2];
  for (const Footstep& f : gt.footsteps) {
    intervals[f.foot == Foot::left ? 0 : 1].push_back(f);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<ForceSample> out;
  out.reserve(std::size_t(n / stride) + 1);
  for (long k = 0; k < n; k += stride) {
    const double t = gt.t[std::size_t(k)];
    const double wl = stance_weight(intervals[0], t, gt.support_ramp);
    const double wr = stance_weight(intervals[1], t, gt.support_ramp);
    const double sum = wl + wr;
    ForceSample s;
    s.t = t;
    s.fz_left = (sum > 1e-12 ? opt.force_peak * wl / sum : 0.0) +
                opt.force_noise * N(rng);
    s.fz_right = (sum > 1e-12 ? opt.force_peak * wr / sum : 0.0) +
                 opt.force_noise * N(rng);
    out.push_back(s);
  }
  return out;
}

std::vector<LidarScan> synthesize_lidar(const GroundTruth& gt,
                                        const WorldModel& world,
                                        const SimOptions& opt,
                                        std::uint64_t seed) {
  if (gt.size() < 2) throw Error("synthesize_lidar: ground truth too short");
  if (world.planes.empty()) throw Error("synthesize_lidar: empty world");
  if (opt.rates.points_per_scan <= 0) {
    throw Error("synthesize_lidar: points_per_scan must be positive");
  }
  const double rate = opt.rates.lidar;
  std::vector<LidarScan> out;
  if (rate <= 0.0) return out;

  const double duration = gt.t.back() - gt.t.front();
  const double window = 1.0 / rate;
  const long n_scans = long(std::floor(duration * rate + 1e-9));
  const int npts = opt.rates.points_per_scan;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_int_distribution<int> plane_pick(0, int(world.planes.size()) - 1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);

  out.reserve(std::size_t(n_scans));
  for (long j = 1; j <= n_scans; ++j) {
    LidarScan scan;
    scan.end_time = gt.t.front() + double(j) / rate;
    scan.points.reserve(std::size_t(npts));
    for (int i = 0; i < npts; ++i) {
      const double ti = scan.end_time - window * double(npts - 1 - i) / npts;
      Mat3 R;
      Vec3 p;
      pose_at(gt, ti, R, p);
      const Mat3 Rl = R * opt.extrinsics.R;
      const Vec3 pl = R * opt.extrinsics.t + p;

      Vec3 hit = Vec3::Zero();
      for (int tries = 0; tries < 64; ++tries) {
        const Plane& pe = world.planes[std::size_t(plane_pick(rng))];
        hit = pe.anchor + U(rng) * pe.u_extent * pe.u_axis +
              U(rng) * pe.v_extent * pe.v_axis;
        const double r = (hit - pl).norm();
        if (r >= 0.1 && r <= 30.0) break;
      }
      Vec3 local = Rl.transpose() * (hit - pl);
      local += opt.noise.lidar_point_stddev * N(rng) * local.normalized();
      scan.points.push_back({ti, local});
    }
    out.push_back(std::move(scan));
  }
  return out;
}

SimResult simulate(const GaitParams& gait, const SimOptions& opt) {
  SimResult r;
  r.truth = generate_gait(gait);
  r.world = world_model(gait);
  r.data.imu = synthesize_imu(r.truth, opt, gait.seed + 1, gait.seed + 6,
                              &r.gyro_bias0, &r.accel_bias0);
  r.data.joints_left =
      synthesize_joints(r.truth, simulator_leg(), Foot::left, opt, gait.seed + 2);
  r.data.joints_right = synthesize_joints(r.truth, mirrored(simulator_leg()),
                                          Foot::right, opt, gait.seed + 3);
  r.data.forces = synthesize_forces(r.truth, opt, gait.seed + 4);
  r.data.scans = synthesize_lidar(r.truth, r.world, opt, gait.seed + 5);
  return r;
}

}  // namespace liko
