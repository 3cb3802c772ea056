#include "liko/contact.hpp"

namespace liko {

bool schmitt(bool latched, double force, const ContactConfig& cfg) {
  if (latched) return force > cfg.force_off;
  return force >= cfg.force_on;
}

bool update_contact(ContactState& cs, const ForceSample& f,
                    const ContactConfig& cfg) {
  cs.left = schmitt(cs.left, f.fz_left, cfg);
  cs.right = schmitt(cs.right, f.fz_right, cfg);

  const Foot before = cs.stance;
  if (!cs.left && !cs.right) {
    cs.stance = Foot::none;
  } else if (cs.left && !cs.right) {
    cs.stance = Foot::left;
  } else if (cs.right && !cs.left) {
    cs.stance = Foot::right;
  } else {
    switch (cs.stance) {
      case Foot::left:
        if (f.fz_right > f.fz_left + cfg.switch_hysteresis) {
          cs.stance = Foot::right;
        }
        break;
      case Foot::right:
        if (f.fz_left > f.fz_right + cfg.switch_hysteresis) {
          cs.stance = Foot::left;
        }
        break;
      case Foot::none:
        cs.stance = f.fz_right > f.fz_left ? Foot::right : Foot::left;
        break;
    }
  }
  return cs.stance != before && cs.stance != Foot::none;
}

void reset_contact(State& x, Mat21& P, const KinematicChain& chain,
                   const VecX& q, double reset_stddev) {
  x.pc = x.p + x.R * fk(chain, q);
  P.block<3, 21>(idx::pc, 0).setZero();
  P.block<21, 3>(0, idx::pc).setZero();
  P.block<3, 3>(idx::pc, idx::pc) =
      reset_stddev * reset_stddev * Mat3::Identity();
}

}  // namespace liko
