#pragma once

#include <functional>
#include <vector>

#include "liko/kin_measurement.hpp"
#include "liko/state.hpp"

namespace liko {

// Jacobian of delta -> (xj [+] delta) [-] xprior at delta = 0. Block diagonal:
// inverse-right-Jacobian-transposed on the rotation part, identity elsewhere.
Mat21 boxminus_jacobian(const State& xj, const State& xprior);

struct IekfConfig {
  int max_iterations = 5;
  double tolerance = 1e-6;
};

// Re-evaluates residuals and Jacobians at the current iterate. Blocks with
// R.cols() == 1 carry per-row variances (diagonal noise).
using MeasurementProvider =
    std::function<std::vector<MeasurementBlock>(const State&)>;

struct UpdateResult {
  State x;
  Mat21 P;
  int iterations = 0;
  int rows = 0;
  bool updated = false;
};

// Iterated extended Kalman update on the manifold. The gain is formed in
// information space, (H^T R^-1 H + P^-1)^-1 H^T R^-1, with the prior
// covariance projected into the iterate's tangent space through the boxminus
// Jacobian. Returns the prior untouched when the provider yields no rows.
UpdateResult iterated_update(const State& prior_x, const Mat21& prior_P,
                             const MeasurementProvider& provider,
                             const IekfConfig& cfg);

}  // namespace liko
