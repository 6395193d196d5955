#include "wavehide/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace wavehide {

AdamState make_adam_state(const std::vector<ad::Var>& params) {
  AdamState state;
  state.m.reserve(params.size());
  state.v.reserve(params.size());
  for (const ad::Var& p : params) {
    state.m.emplace_back(p->value.channels(), p->value.height(),
                         p->value.width());
    state.v.emplace_back(p->value.channels(), p->value.height(),
                         p->value.width());
  }
  return state;
}

void adam_step(std::vector<ad::Var>& params, AdamState& state, double lr) {
  if (params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: state/parameter count mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    PlanarTensor& p = params[i]->value;
    PlanarTensor& m = state.m[i];
    PlanarTensor& v = state.v[i];
    const PlanarTensor& g = params[i]->grad;
    const bool has_grad = !g.empty();
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = has_grad ? g[j] : 0.0;
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * gj;
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * gj * gj;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

void zero_grads(std::vector<ad::Var>& params) {
  for (ad::Var& p : params) p->grad = PlanarTensor();
}

}  // namespace wavehide
