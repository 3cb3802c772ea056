#include "liko/lidar.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace liko {

namespace {

int64_t grid_key(const Vec3& p, double size) {
  const int64_t ix = static_cast<int64_t>(std::floor(p.x() / size)) + (1 << 20);
  const int64_t iy = static_cast<int64_t>(std::floor(p.y() / size)) + (1 << 20);
  const int64_t iz = static_cast<int64_t>(std::floor(p.z() / size)) + (1 << 20);
  return (ix << 42) | (iy << 21) | iz;
}

}  // namespace

DeskewResult deskew(const LidarScan& scan, const State& end_state,
                    const std::vector<ImuSample>& imu, const Extrinsics& ext,
                    double max_gap) {
  DeskewResult out;
  if (scan.points.empty()) {
    out.reason = "empty scan";
    return out;
  }

  const double end = scan.end_time;
  double start = end;
  for (const auto& pt : scan.points) {
    if (pt.t > end + 1e-6 || pt.t < end - 0.2) {
      out.reason = "point timestamp " + std::to_string(pt.t)
                   + " outside scan window ending at " + std::to_string(end);
      return out;
    }
    start = std::min(start, pt.t);
  }

  // IMU samples governing [start, end]: the latest at or before `start`, then
  // everything up to `end`.
  std::vector<ImuSample> seg;
  size_t lead = imu.size();
  for (size_t i = 0; i < imu.size(); ++i) {
    if (imu[i].t <= start + 1e-12) lead = i;
    if (imu[i].t > end + 1e-12) break;
  }
  if (lead == imu.size()) {
    out.reason = "no IMU sample at or before scan start";
    return out;
  }
  for (size_t i = lead; i < imu.size() && imu[i].t <= end + 1e-12; ++i) {
    seg.push_back(imu[i]);
  }
  double prev = start;
  for (const auto& s : seg) {
    if (s.t > prev && s.t - prev > max_gap + 1e-9) {
      out.reason = "IMU coverage gap " + std::to_string(s.t - prev) + " s";
      return out;
    }
    prev = std::max(prev, s.t);
  }
  if (end - prev > max_gap + 1e-9) {
    out.reason = "IMU coverage gap " + std::to_string(end - prev)
                 + " s before scan end";
    return out;
  }

  // Breakpoints descending from the scan end; integrate the exact inverse of
  // the forward Euler step so zero-noise round trips are exact.
  std::vector<double> bp;
  bp.push_back(end);
  for (auto it = seg.rbegin(); it != seg.rend(); ++it) {
    if (it->t < end - 1e-12 && it->t > start + 1e-12) bp.push_back(it->t);
  }
  bp.push_back(start);

  struct Node {
    double t;
    Mat3 R;
    Vec3 p;
    Vec3 v;
    size_t imu_index;  // sample held on the interval below this node
  };
  std::vector<Node> nodes(bp.size());

  auto held_at = [&](double t) {
    size_t k = 0;
    for (size_t i = 0; i < seg.size(); ++i) {
      if (seg[i].t <= t + 1e-12) k = i;
    }
    return k;
  };

  nodes[0] = {end, end_state.R, end_state.p, end_state.v, held_at(end)};
  for (size_t i = 1; i < bp.size(); ++i) {
    const Node& hi = nodes[i - 1];
    const double lo_t = bp[i];
    const size_t k = held_at(lo_t);
    const ImuSample& u = seg[k];
    const double dt = hi.t - lo_t;
    Node lo;
    lo.t = lo_t;
    lo.imu_index = k;
    lo.R = hi.R * exp_so3(-(u.w - end_state.bg) * dt);
    lo.v = hi.v - dt * (lo.R * (u.a - end_state.ba) + end_state.g);
    lo.p = hi.p - dt * lo.v;
    nodes[i] = lo;
  }

  out.points.reserve(scan.points.size());
  const Mat3 Re_t = end_state.R.transpose();
  for (const auto& pt : scan.points) {
    // Bracket from above: smallest node time >= pt.t.
    size_t i = 0;
    while (i + 1 < nodes.size() && nodes[i + 1].t >= pt.t - 1e-12) ++i;
    const Node& hi = nodes[i];
    const double dt = hi.t - pt.t;
    Mat3 R_tau = hi.R;
    Vec3 p_tau = hi.p;
    if (dt > 1e-12) {
      const ImuSample& u = seg[held_at(pt.t)];
      R_tau = hi.R * exp_so3(-(u.w - end_state.bg) * dt);
      const Vec3 v_tau =
          hi.v - dt * (R_tau * (u.a - end_state.ba) + end_state.g);
      p_tau = hi.p - dt * v_tau;
    }
    const Vec3 world = R_tau * (ext.R * pt.p + ext.t) + p_tau;
    out.points.push_back(Re_t * (world - end_state.p));
  }
  out.ok = true;
  return out;
}

VoxelMap::VoxelMap(const MapConfig& cfg) : cfg_(cfg) {}

int64_t VoxelMap::coarse_key(const Vec3& p) const {
  return grid_key(p, cfg_.voxel_size);
}

int64_t VoxelMap::fine_key(const Vec3& p) const {
  return grid_key(p, cfg_.downsample_size);
}

void VoxelMap::insert(const std::vector<Vec3>& world_points) {
  for (const Vec3& p : world_points) {
    const int64_t fk = fine_key(p);
    if (!occupied_fine_.insert(fk).second) continue;
    cells_[coarse_key(p)].push_back(p);
    ++n_points_;
  }
}

PlaneFit VoxelMap::find_plane(const Vec3& query) const {
  PlaneFit fit;
  const double s = cfg_.voxel_size;
  std::vector<const Vec3*> candidates;
  candidates.reserve(64);
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dz = -1; dz <= 1; ++dz) {
        const Vec3 probe = query + s * Vec3(dx, dy, dz);
        auto it = cells_.find(coarse_key(probe));
        if (it == cells_.end()) continue;
        for (const Vec3& p : it->second) candidates.push_back(&p);
      }
    }
  }
  const int k = cfg_.knn;
  if (static_cast<int>(candidates.size()) < k) return fit;

  std::partial_sort(candidates.begin(), candidates.begin() + k,
                    candidates.end(), [&](const Vec3* a, const Vec3* b) {
                      return (*a - query).squaredNorm()
                             < (*b - query).squaredNorm();
                    });

  Vec3 centroid = Vec3::Zero();
  for (int i = 0; i < k; ++i) centroid += *candidates[i];
  centroid /= k;

  Mat3 scatter = Mat3::Zero();
  for (int i = 0; i < k; ++i) {
    const Vec3 d = *candidates[i] - centroid;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  const Vec3 normal = eig.eigenvectors().col(0);

  for (int i = 0; i < k; ++i) {
    if (std::abs(normal.dot(*candidates[i] - centroid)) > cfg_.planarity_gate) {
      return fit;
    }
  }
  if (std::abs(normal.dot(query - centroid)) > cfg_.association_gate) {
    return fit;
  }
  fit.valid = true;
  fit.normal = normal;
  fit.point = centroid;
  return fit;
}

MeasurementBlock lidar_rows(const State& x, const std::vector<Vec3>& imu_points,
                            const VoxelMap& map, double point_stddev,
                            int* n_valid) {
  std::vector<double> zs;
  std::vector<Vec3> normals;
  std::vector<const Vec3*> used;
  zs.reserve(imu_points.size());
  for (const Vec3& s : imu_points) {
    const Vec3 w = x.R * s + x.p;
    const PlaneFit fit = map.find_plane(w);
    if (!fit.valid) continue;
    zs.push_back(fit.normal.dot(w - fit.point));
    normals.push_back(fit.normal);
    used.push_back(&s);
  }
  if (n_valid) *n_valid = static_cast<int>(zs.size());

  const int n = static_cast<int>(zs.size());
  MeasurementBlock out;
  out.z = VecX(n);
  out.H = MatX::Zero(n, idx::state_dim);
  out.R = MatX::Constant(n, 1, point_stddev * point_stddev);
  for (int i = 0; i < n; ++i) {
    out.z[i] = zs[i];
    const Eigen::RowVector3d ut = normals[i].transpose();
    out.H.block<1, 3>(i, idx::theta) = -ut * x.R * skew(*used[i]);
    out.H.block<1, 3>(i, idx::pos) = ut;
  }
  return out;
}

}  // namespace liko
