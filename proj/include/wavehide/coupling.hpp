#ifndef WAVEHIDE_COUPLING_HPP
#define WAVEHIDE_COUPLING_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wavehide/container.hpp"
#include "wavehide/nets.hpp"

namespace wavehide {

/// One affine coupling block. phi, rho, theta map half the channel stack to
/// the other half's shape. The scale path squashes rho's output through
/// sigma before exponentiation so the multiplier stays in
/// [exp(-k/2), exp(k/2)] (centered form) and division in the inverse never
/// underflows.
struct CouplingBlockParams {
  DenseBlock phi;
  DenseBlock rho;
  DenseBlock theta;
};

struct StackConfig {
  int blocks = 16;
  int channels = 12;
  double clamp_k = 2.0;
  /// true: sigma(x) = k*(sigmoid(x) - 0.5), an exact identity at zero
  /// initialization. false: sigma(x) = k*sigmoid(x).
  bool centered_sigma = true;
  int dense_layers = 5;
  int growth = 32;
};

/// The invertible encoder/decoder: a fixed split of the channel stack into
/// halves, transformed by `blocks` coupling blocks. Forward and inverse
/// share these parameters; inversion is algebraic and holds for any
/// parameter values.
struct CouplingStack {
  StackConfig config;
  std::vector<CouplingBlockParams> blocks;
};

CouplingStack make_coupling_stack(const StackConfig& config,
                                  std::uint64_t seed);

std::pair<ad::Var, ad::Var> block_forward(const CouplingBlockParams& p,
                                          const ad::Var& u1, const ad::Var& u2,
                                          const StackConfig& config);
std::pair<ad::Var, ad::Var> block_inverse(const CouplingBlockParams& p,
                                          const ad::Var& u1p,
                                          const ad::Var& u2p,
                                          const StackConfig& config);

ad::Var stack_forward(const CouplingStack& stack, const ad::Var& x);
ad::Var stack_inverse(const CouplingStack& stack, const ad::Var& x);

/// Detached conveniences for inference paths.
PlanarTensor stack_forward(const CouplingStack& stack, const PlanarTensor& x);
PlanarTensor stack_inverse(const CouplingStack& stack, const PlanarTensor& x);

/// All trainable tensors in a stable order (block-major, phi/rho/theta, then
/// layer kernel/bias). The same order underlies optimizer state and the
/// serialized form.
std::vector<ad::Var> stack_parameters(CouplingStack& stack);

/// Container interchange: put_stack writes the config into the container's
/// meta and every parameter tensor under a stable name; stack_from_container
/// rebuilds and validates. save_stack/load_stack wrap these for plain model
/// files; checkpoints add optimizer tensors to the same container.
void put_stack(TensorContainer& c, const CouplingStack& stack);
CouplingStack stack_from_container(const TensorContainer& c);

void save_stack(const CouplingStack& stack, const std::string& path);
CouplingStack load_stack(const std::string& path);

}  // namespace wavehide

#endif
