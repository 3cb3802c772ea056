#pragma once

#include <Eigen/Dense>

namespace liko {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Cross-product matrix: skew(a) * b == a x b.
Mat3 skew(const Vec3& v);

// Inverse of skew for (approximately) antisymmetric input.
Vec3 vee(const Mat3& m);

// SO(3) exponential map (Rodrigues); second-order Taylor below the small-angle
// threshold so the map is smooth across the switch.
Mat3 exp_so3(const Vec3& u);

// SO(3) logarithm. Valid for any rotation; the angle-pi neighbourhood extracts
// the axis from the symmetric part, sign fixed so the first nonzero component
// is positive.
Vec3 log_so3(const Mat3& R);

// Left Jacobian of SO(3).
Mat3 a_matrix(const Vec3& u);

// Inverse left Jacobian: I - skew(u)/2 + (1 - a)*skew(u)^2/|u|^2 with
// a = (|u|/2)*cot(|u|/2). Series below 1e-7. Its transpose is the inverse
// right Jacobian used by the iterated-update linearization.
Mat3 a_matrix_inverse(const Vec3& u);

// True if R is orthonormal with det +1 within tol.
bool is_rotation(const Mat3& R, double tol = 1e-9);

}  // namespace liko
