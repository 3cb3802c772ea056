#include "liko/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace liko {

namespace {

void check_trajectory(const Trajectory& traj, const char* name) {
  if (traj.empty()) throw Error(std::string(name) + " trajectory is empty");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i > 0 && !(traj[i].t > traj[i - 1].t)) {
      throw Error(std::string(name) +
                  " trajectory timestamps not strictly increasing at t=" +
                  std::to_string(traj[i].t));
    }
    if (std::abs(traj[i].q.norm() - 1.0) > 1e-6) {
      throw Error(std::string(name) + " trajectory has a non-unit quaternion");
    }
  }
}

// Index of the sample nearest in time.
std::size_t nearest(const Trajectory& traj, double t) {
  auto it = std::lower_bound(
      traj.begin(), traj.end(), t,
      [](const PoseSample& s, double tt) { return s.t < tt; });
  if (it == traj.begin()) return 0;
  if (it == traj.end()) return traj.size() - 1;
  const std::size_t hi = std::size_t(it - traj.begin());
  return (t - traj[hi - 1].t) <= (traj[hi].t - t) ? hi - 1 : hi;
}

}  // namespace

std::vector<Paired> associate(const Trajectory& est, const Trajectory& gt,
                              double max_dt) {
  check_trajectory(est, "estimate");
  check_trajectory(gt, "reference");
  std::vector<Paired> pairs;
  if (est.size() <= gt.size()) {
    for (const PoseSample& e : est) {
      const PoseSample& g = gt[nearest(gt, e.t)];
      if (std::abs(g.t - e.t) <= max_dt) pairs.push_back({e, g});
    }
  } else {
    for (const PoseSample& g : gt) {
      const PoseSample& e = est[nearest(est, g.t)];
      if (std::abs(g.t - e.t) <= max_dt) pairs.push_back({e, g});
    }
  }
  if (pairs.empty()) {
    throw Error("associate: no sample pairs within max_dt=" +
                std::to_string(max_dt));
  }
  return pairs;
}

Alignment umeyama_align(const std::vector<Paired>& pairs) {
  const std::size_t n = pairs.size();
  if (n < 3) throw Error("umeyama_align: need at least 3 pairs");
  MatX src(3, n), dst(3, n);
  for (std::size_t i = 0; i < n; ++i) {
    src.col(long(i)) = pairs[i].est.p;
    dst.col(long(i)) = pairs[i].gt.p;
  }
  const Vec3 mean_src = src.rowwise().mean();
  Eigen::JacobiSVD<MatX> svd(src.colwise() - mean_src);
  const VecX sv = svd.singularValues();
  if (sv(1) <= 1e-9 * std::max(sv(0), 1e-300)) {
    throw Error("umeyama_align: degenerate (collinear) geometry");
  }
  const Eigen::Matrix4d T = Eigen::umeyama(src, dst, false);
  Alignment a;
  a.R = T.topLeftCorner<3, 3>();
  a.t = T.topRightCorner<3, 1>();
  return a;
}

double ape_rmse(const std::vector<Paired>& pairs, const Alignment& alignment) {
  if (pairs.empty()) throw Error("ape_rmse: no pairs");
  double acc = 0.0;
  for (const Paired& pr : pairs) {
    acc += (pr.gt.p - (alignment.R * pr.est.p + alignment.t)).squaredNorm();
  }
  return std::sqrt(acc / double(pairs.size()));
}

double rpe_percent(const Trajectory& est, const Trajectory& gt, double delta) {
  if (delta <= 0.0) throw Error("rpe_percent: delta must be positive");
  const std::vector<Paired> pairs = associate(est, gt, 0.005);
  const std::size_t n = pairs.size();

  std::vector<double> arc(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    arc[i] = arc[i - 1] + (pairs[i].gt.p - pairs[i - 1].gt.p).norm();
  }
  if (arc.back() < delta) {
    throw Error("rpe_percent: trajectory arc length " +
                std::to_string(arc.back()) + " m shorter than delta");
  }

  auto rel_err = [&](std::size_t i, std::size_t j) {
    const Mat3 Rg = pairs[i].gt.q.toRotationMatrix();
    const Mat3 Re = pairs[i].est.q.toRotationMatrix();
    const Vec3 dg = Rg.transpose() * (pairs[j].gt.p - pairs[i].gt.p);
    const Vec3 de = Re.transpose() * (pairs[j].est.p - pairs[i].est.p);
    const Mat3 Rg_rel = Rg.transpose() * pairs[j].gt.q.toRotationMatrix();
    return (Rg_rel.transpose() * (de - dg)).norm();
  };

  std::vector<double> percents;
  const double stride = delta / 10.0;
  double next_start = 0.0;
  std::size_t i = 0, j = 0;
  while (true) {
    while (i < n && arc[i] < next_start) ++i;
    if (i >= n) break;
    if (j < i) j = i;
    while (j < n && arc[j] - arc[i] < delta) ++j;
    if (j >= n) break;
    const double seg = arc[j] - arc[i];
    percents.push_back(rel_err(i, j) / seg * 100.0);
    next_start += stride;
  }
  if (percents.empty()) {
    throw Error("rpe_percent: no complete segments of length delta");
  }
  double acc = 0.0;
  for (double p : percents) acc += p * p;
  return std::sqrt(acc / double(percents.size()));
}

double velocity_rmse(const std::vector<VelocitySample>& est,
                     const std::vector<VelocitySample>& ref, int window,
                     double max_dt) {
  if (est.empty() || ref.empty()) throw Error("velocity_rmse: empty input");
  if (window < 1) throw Error("velocity_rmse: window must be >= 1");

  std::vector<Vec3> smooth(ref.size());
  const long half = window / 2;
  for (long k = 0; k < long(ref.size()); ++k) {
    const long lo = std::max(0L, k - half);
    const long hi = std::min(long(ref.size()) - 1, k + (window - 1) - half);
    Vec3 acc = Vec3::Zero();
    for (long m = lo; m <= hi; ++m) acc += ref[std::size_t(m)].v;
    smooth[std::size_t(k)] = acc / double(hi - lo + 1);
  }

  double acc = 0.0;
  std::size_t count = 0;
  for (const VelocitySample& e : est) {
    auto it = std::lower_bound(
        ref.begin(), ref.end(), e.t,
        [](const VelocitySample& s, double tt) { return s.t < tt; });
    std::size_t k;
    if (it == ref.begin()) {
      k = 0;
    } else if (it == ref.end()) {
      k = ref.size() - 1;
    } else {
      const std::size_t hi = std::size_t(it - ref.begin());
      k = (e.t - ref[hi - 1].t) <= (ref[hi].t - e.t) ? hi - 1 : hi;
    }
    if (std::abs(ref[k].t - e.t) > max_dt) continue;
    acc += (e.v - smooth[k]).squaredNorm();
    ++count;
  }
  if (count == 0) throw Error("velocity_rmse: no samples within max_dt");
  return std::sqrt(acc / double(count));
}

}  // namespace liko
