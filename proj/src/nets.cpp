#include "wavehide/nets.hpp"

#include <cmath>
#include <stdexcept>

#include "wavehide/rng.hpp"

namespace wavehide {

ConvLayer make_conv_layer(int in_ch, int out_ch, bool activation,
                          std::mt19937_64& rng) {
  if (in_ch <= 0 || out_ch <= 0) {
    throw std::invalid_argument("make_conv_layer: channel counts must be > 0");
  }
  const double limit = std::sqrt(6.0 / (in_ch * 9));
  ConvLayer layer;
  layer.kernel = ad::parameter(
      random_uniform(rng, out_ch * in_ch, 3, 3, -limit, limit));
  layer.bias = ad::parameter(PlanarTensor(out_ch, 1, 1));
  layer.in_ch = in_ch;
  layer.out_ch = out_ch;
  layer.activation = activation;
  return layer;
}

ConvLayer make_zero_conv_layer(int in_ch, int out_ch) {
  ConvLayer layer;
  layer.kernel = ad::parameter(PlanarTensor(out_ch * in_ch, 3, 3));
  layer.bias = ad::parameter(PlanarTensor(out_ch, 1, 1));
  layer.in_ch = in_ch;
  layer.out_ch = out_ch;
  layer.activation = false;
  return layer;
}

DenseBlock make_dense_block(int in_ch, int out_ch, int layers, int growth,
                            std::mt19937_64& rng) {
  if (layers < 2) {
    throw std::invalid_argument("make_dense_block: need at least 2 layers");
  }
  DenseBlock block;
  block.in_ch = in_ch;
  block.out_ch = out_ch;
  for (int k = 0; k < layers - 1; ++k) {
    block.layers.push_back(
        make_conv_layer(in_ch + k * growth, growth, true, rng));
  }
  block.layers.push_back(
      make_zero_conv_layer(in_ch + (layers - 1) * growth, out_ch));
  return block;
}

ad::Var conv_layer_forward(const ConvLayer& layer, const ad::Var& x) {
  if (x->value.channels() != layer.in_ch) {
    throw std::invalid_argument("conv_layer_forward: channel mismatch");
  }
  ad::Var out = ad::conv2d(x, layer.kernel, layer.bias);
  if (layer.activation) out = ad::leaky_relu(out, kLeakySlope);
  return out;
}

ad::Var dense_block_forward(const DenseBlock& block, const ad::Var& x) {
  if (x->value.channels() != block.in_ch) {
    throw std::invalid_argument("dense_block_forward: channel mismatch");
  }
  std::vector<ad::Var> feats{x};
  for (const ConvLayer& layer : block.layers) {
    ad::Var in = feats.size() == 1 ? x : ad::concat_channels(feats);
    feats.push_back(conv_layer_forward(layer, in));
  }
  return feats.back();
}

void append_parameters(DenseBlock& block, std::vector<ad::Var>& out) {
  for (ConvLayer& layer : block.layers) {
    out.push_back(layer.kernel);
    out.push_back(layer.bias);
  }
}

}  // namespace wavehide
