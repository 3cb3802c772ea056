#pragma once

#include "liko/kinematics.hpp"
#include "liko/state.hpp"

namespace liko {

enum class Foot { none, left, right };

struct ContactConfig {
  double force_on = 250.0;    // N, Schmitt rising threshold
  double force_off = 150.0;   // N, Schmitt falling threshold
  double switch_hysteresis = 20.0;  // N, stance hand-over margin
};

struct ContactState {
  bool left = false;
  bool right = false;
  Foot stance = Foot::none;
};

// Schmitt trigger; `latched` is the previous output.
bool schmitt(bool latched, double force, const ContactConfig& cfg);

// Update both latches and the stance selection from one force sample.
// Returns true when the stance foot changed to a (different) foot, i.e. a
// foothold reset is due.
bool update_contact(ContactState& cs, const ForceSample& f,
                    const ContactConfig& cfg);

// Hard reset of the foothold estimate at touchdown: position from forward
// kinematics, covariance block re-seeded, cross-covariance cleared.
void reset_contact(State& x, Mat21& P, const KinematicChain& chain,
                   const VecX& q, double reset_stddev);

}  // namespace liko
