#include "liko/iekf.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace liko {

Mat21 boxminus_jacobian(const State& xj, const State& xprior) {
  const Vec3 dtheta = log_so3(xprior.R.transpose() * xj.R);
  Mat21 J = Mat21::Identity();
  J.block<3, 3>(idx::theta, idx::theta) =
      a_matrix_inverse(dtheta).transpose();
  return J;
}

namespace {

void accumulate(const std::vector<MeasurementBlock>& blocks, Mat21& HtRiH,
                Vec21& HtRiz, int& rows) {
  HtRiH.setZero();
  HtRiz.setZero();
  rows = 0;
  for (const auto& b : blocks) {
    const int n = static_cast<int>(b.z.size());
    if (n == 0) continue;
    rows += n;
    if (b.R.cols() == 1) {
      for (int i = 0; i < n; ++i) {
        const double w = 1.0 / b.R(i, 0);
        HtRiH.noalias() += w * b.H.row(i).transpose() * b.H.row(i);
        HtRiz.noalias() += w * b.z[i] * b.H.row(i).transpose();
      }
    } else {
      const MatX Ri = b.R.inverse();
      HtRiH.noalias() += b.H.transpose() * Ri * b.H;
      HtRiz.noalias() += b.H.transpose() * Ri * b.z;
    }
  }
}

}  // namespace

UpdateResult iterated_update(const State& prior_x, const Mat21& prior_P,
                             const MeasurementProvider& provider,
                             const IekfConfig& cfg) {
  UpdateResult out;
  out.x = prior_x;
  out.P = prior_P;

  State xj = prior_x;
  Mat21 HtRiH;
  Vec21 HtRiz;
  Mat21 S;
  bool have_S = false;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const std::vector<MeasurementBlock> blocks = provider(xj);
    int rows = 0;
    accumulate(blocks, HtRiH, HtRiz, rows);
    if (rows == 0) {
      if (it == 0) return out;  // nothing to do, prior stands
      break;
    }

    const Vec3 dtheta = log_so3(prior_x.R.transpose() * xj.R);
    Mat21 Jinv = Mat21::Identity();
    Jinv.block<3, 3>(idx::theta, idx::theta) = a_matrix(dtheta).transpose();

    const Mat21 P = Jinv * prior_P * Jinv.transpose();
    Eigen::LLT<Mat21> pchol(P);
    if (pchol.info() != Eigen::Success) {
      throw Error("iterated_update: prior covariance not positive definite");
    }
    const Mat21 Pinv = pchol.solve(Mat21::Identity());

    Vec21 b = boxminus(xj, prior_x);
    b = Jinv * b;

    S = HtRiH + Pinv;
    Eigen::LLT<Mat21> chol(S);
    if (chol.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Mat21> eig(S);
      const double emin = eig.eigenvalues().minCoeff();
      const double emax = eig.eigenvalues().maxCoeff();
      throw Error("iterated_update: singular information matrix (eigenvalue "
                  "range ["
                  + std::to_string(emin) + ", " + std::to_string(emax) + "])");
    }
    have_S = true;

    const Vec21 delta = chol.solve(-(HtRiz + Pinv * b));
    xj = boxplus(xj, delta);
    out.iterations = it + 1;
    out.rows = rows;
    if (delta.norm() < cfg.tolerance) break;
  }

  if (!have_S) return out;

  out.x = xj;
  out.P = S.llt().solve(Mat21::Identity());
  out.P = 0.5 * (out.P + out.P.transpose());
  out.updated = true;
  return out;
}

}  // namespace liko
