#include "liko/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace liko {

namespace {
constexpr double kExpSmallAngle = 1e-8;
constexpr double kAinvSmallAngle = 1e-7;
constexpr double kLogPiBand = 1e-6;
}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  return Vec3(0.5 * (m(2, 1) - m(1, 2)),
              0.5 * (m(0, 2) - m(2, 0)),
              0.5 * (m(1, 0) - m(0, 1)));
}

Mat3 exp_so3(const Vec3& u) {
  const double theta = u.norm();
  const Mat3 w = skew(u);
  if (theta < kExpSmallAngle) {
    return Mat3::Identity() + w + 0.5 * w * w;
  }
  const double s = std::sin(theta) / theta;
  const double c = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + s * w + c * w * w;
}

Vec3 log_so3(const Mat3& R) {
  const double cos_theta = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double theta = std::acos(cos_theta);

  if (theta < kExpSmallAngle) {
    return 0.5 * vee(R - R.transpose());
  }

  if (M_PI - theta < kLogPiBand) {
    // Near pi the antisymmetric part vanishes; recover the axis from
    // S = (R + R^T)/2 = I + (1 - cos)(n n^T - I).
    const Mat3 S = 0.5 * (R + R.transpose());
    const double one_minus_cos = 1.0 - cos_theta;
    Vec3 n;
    for (int i = 0; i < 3; ++i) {
      n(i) = std::sqrt(std::max(0.0, (S(i, i) - cos_theta) / one_minus_cos));
    }
    // Off-diagonals of n n^T fix the relative signs.
    int k = 0;
    for (int i = 1; i < 3; ++i) {
      if (n(i) > n(k)) k = i;
    }
    for (int i = 0; i < 3; ++i) {
      if (i == k) continue;
      if (S(k, i) < 0.0) n(i) = -n(i);
    }
    for (int i = 0; i < 3; ++i) {
      if (std::abs(n(i)) > 1e-12) {
        if (n(i) < 0.0) n = -n;
        break;
      }
    }
    return theta * n;
  }

  return theta / (2.0 * std::sin(theta)) * vee(R - R.transpose());
}

Mat3 a_matrix(const Vec3& u) {
  const double theta = u.norm();
  const Mat3 w = skew(u);
  if (theta < kExpSmallAngle) {
    return Mat3::Identity() + 0.5 * w + w * w / 6.0;
  }
  const double t2 = theta * theta;
  const double c1 = (1.0 - std::cos(theta)) / t2;
  const double c2 = (theta - std::sin(theta)) / (t2 * theta);
  return Mat3::Identity() + c1 * w + c2 * w * w;
}

Mat3 a_matrix_inverse(const Vec3& u) {
  const double theta = u.norm();
  const Mat3 w = skew(u);
  if (theta < kAinvSmallAngle) {
    return Mat3::Identity() - 0.5 * w + w * w / 12.0;
  }
  const double half = 0.5 * theta;
  const double alpha = half * std::cos(half) / std::sin(half);
  return Mat3::Identity() - 0.5 * w + (1.0 - alpha) / (theta * theta) * w * w;
}

bool is_rotation(const Mat3& R, double tol) {
  const double ortho = (R * R.transpose() - Mat3::Identity()).norm();
  return ortho < tol && std::abs(R.determinant() - 1.0) < tol;
}

}  // namespace liko
