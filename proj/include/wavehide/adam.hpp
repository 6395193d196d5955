#ifndef WAVEHIDE_ADAM_HPP
#define WAVEHIDE_ADAM_HPP

#include <vector>

#include "wavehide/autodiff.hpp"

namespace wavehide {

/// Adam optimizer state: first/second moment per parameter plus the global
/// step counter driving bias correction.
struct AdamState {
  std::vector<PlanarTensor> m;
  std::vector<PlanarTensor> v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam_state(const std::vector<ad::Var>& params);

/// One bias-corrected Adam update. A parameter whose grad buffer was never
/// touched is treated as having a zero gradient.
void adam_step(std::vector<ad::Var>& params, AdamState& state, double lr);

void zero_grads(std::vector<ad::Var>& params);

}  // namespace wavehide

#endif
