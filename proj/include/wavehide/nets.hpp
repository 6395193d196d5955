#ifndef WAVEHIDE_NETS_HPP
#define WAVEHIDE_NETS_HPP

#include <random>
#include <vector>

#include "wavehide/autodiff.hpp"

namespace wavehide {

/// One 3x3 convolution with optional leaky-ReLU (slope 0.2). kernel is a
/// parameter node shaped (out_ch*in_ch, 3, 3), bias (out_ch, 1, 1).
struct ConvLayer {
  ad::Var kernel;
  ad::Var bias;
  int in_ch = 0;
  int out_ch = 0;
  bool activation = true;
};

constexpr double kLeakySlope = 0.2;

/// Densely wired convolution block: layer k consumes the block input
/// concatenated with every previous layer's output. The final layer has no
/// activation and is zero-initialized at construction, making a fresh block
/// the exact zero map.
struct DenseBlock {
  std::vector<ConvLayer> layers;
  int in_ch = 0;
  int out_ch = 0;
};

ConvLayer make_conv_layer(int in_ch, int out_ch, bool activation,
                          std::mt19937_64& rng);
ConvLayer make_zero_conv_layer(int in_ch, int out_ch);

/// `layers` total convolutions (>= 2); interior layers emit `growth`
/// channels each.
DenseBlock make_dense_block(int in_ch, int out_ch, int layers, int growth,
                            std::mt19937_64& rng);

ad::Var conv_layer_forward(const ConvLayer& layer, const ad::Var& x);
ad::Var dense_block_forward(const DenseBlock& block, const ad::Var& x);

void append_parameters(DenseBlock& block, std::vector<ad::Var>& out);

}  // namespace wavehide

#endif
