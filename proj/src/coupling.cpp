#include "wavehide/coupling.hpp"

#include <stdexcept>

#include "wavehide/rng.hpp"

namespace wavehide {

namespace {

ad::Var sigma(const ad::Var& x, const StackConfig& config) {
  if (config.centered_sigma) {
    return ad::mul_scalar(ad::add_scalar(ad::sigmoid(x), -0.5),
                          config.clamp_k);
  }
  return ad::mul_scalar(ad::sigmoid(x), config.clamp_k);
}

void check_config(const StackConfig& config) {
  if (config.blocks < 0) {
    throw std::invalid_argument("coupling: block count must be >= 0");
  }
  if (config.channels <= 0 || config.channels % 2 != 0) {
    throw std::invalid_argument("coupling: channel count must be even");
  }
  if (config.clamp_k <= 0.0) {
    throw std::invalid_argument("coupling: clamp_k must be > 0");
  }
}

std::string tensor_name(int block, const char* subnet, std::size_t layer,
                        const char* part) {
  return "block" + std::to_string(block) + "." + subnet + ".layer" +
         std::to_string(layer) + "." + part;
}

}  // namespace

CouplingStack make_coupling_stack(const StackConfig& config,
                                  std::uint64_t seed) {
  check_config(config);
  const int half = config.channels / 2;
  CouplingStack stack;
  stack.config = config;
  for (int b = 0; b < config.blocks; ++b) {
    CouplingBlockParams block;
    DenseBlock* nets[] = {&block.phi, &block.rho, &block.theta};
    for (int s = 0; s < 3; ++s) {
      std::mt19937_64 rng = make_engine(seed, static_cast<std::uint64_t>(b), s);
      *nets[s] = make_dense_block(half, half, config.dense_layers,
                                  config.growth, rng);
    }
    stack.blocks.push_back(std::move(block));
  }
  return stack;
}

std::pair<ad::Var, ad::Var> block_forward(const CouplingBlockParams& p,
                                          const ad::Var& u1, const ad::Var& u2,
                                          const StackConfig& config) {
  ad::Var u1p = ad::add(u1, dense_block_forward(p.phi, u2));
  ad::Var scale = ad::exp(sigma(dense_block_forward(p.rho, u1p), config));
  ad::Var u2p = ad::add(ad::mul(u2, scale), dense_block_forward(p.theta, u1p));
  return {u1p, u2p};
}

std::pair<ad::Var, ad::Var> block_inverse(const CouplingBlockParams& p,
                                          const ad::Var& u1p,
                                          const ad::Var& u2p,
                                          const StackConfig& config) {
  ad::Var scale = ad::exp(sigma(dense_block_forward(p.rho, u1p), config));
  ad::Var u2 = ad::div(ad::sub(u2p, dense_block_forward(p.theta, u1p)), scale);
  ad::Var u1 = ad::sub(u1p, dense_block_forward(p.phi, u2));
  return {u1, u2};
}

ad::Var stack_forward(const CouplingStack& stack, const ad::Var& x) {
  const int c = stack.config.channels;
  if (x->value.channels() != c) {
    throw std::invalid_argument("stack_forward: channel count mismatch");
  }
  ad::Var u1 = ad::slice_channels(x, 0, c / 2);
  ad::Var u2 = ad::slice_channels(x, c / 2, c);
  for (const CouplingBlockParams& block : stack.blocks) {
    auto [n1, n2] = block_forward(block, u1, u2, stack.config);
    u1 = n1;
    u2 = n2;
  }
  return ad::concat_channels({u1, u2});
}

ad::Var stack_inverse(const CouplingStack& stack, const ad::Var& x) {
  const int c = stack.config.channels;
  if (x->value.channels() != c) {
    throw std::invalid_argument("stack_inverse: channel count mismatch");
  }
  ad::Var u1 = ad::slice_channels(x, 0, c / 2);
  ad::Var u2 = ad::slice_channels(x, c / 2, c);
  for (auto it = stack.blocks.rbegin(); it != stack.blocks.rend(); ++it) {
    auto [n1, n2] = block_inverse(*it, u1, u2, stack.config);
    u1 = n1;
    u2 = n2;
  }
  return ad::concat_channels({u1, u2});
}

PlanarTensor stack_forward(const CouplingStack& stack, const PlanarTensor& x) {
  ad::NoGradGuard guard;
  return stack_forward(stack, ad::constant(x))->value;
}

PlanarTensor stack_inverse(const CouplingStack& stack, const PlanarTensor& x) {
  ad::NoGradGuard guard;
  return stack_inverse(stack, ad::constant(x))->value;
}

std::vector<ad::Var> stack_parameters(CouplingStack& stack) {
  std::vector<ad::Var> params;
  for (CouplingBlockParams& block : stack.blocks) {
    append_parameters(block.phi, params);
    append_parameters(block.rho, params);
    append_parameters(block.theta, params);
  }
  return params;
}

void put_stack(TensorContainer& c, const CouplingStack& stack) {
  nlohmann::json& meta = c.meta();
  meta["kind"] = "coupling-stack";
  meta["layout_version"] = 1;
  meta["blocks"] = stack.config.blocks;
  meta["channels"] = stack.config.channels;
  meta["clamp_k"] = stack.config.clamp_k;
  meta["centered_sigma"] = stack.config.centered_sigma;
  meta["dense_layers"] = stack.config.dense_layers;
  meta["growth"] = stack.config.growth;
  for (std::size_t b = 0; b < stack.blocks.size(); ++b) {
    const CouplingBlockParams& block = stack.blocks[b];
    const DenseBlock* nets[] = {&block.phi, &block.rho, &block.theta};
    const char* names[] = {"phi", "rho", "theta"};
    for (int s = 0; s < 3; ++s) {
      for (std::size_t l = 0; l < nets[s]->layers.size(); ++l) {
        const ConvLayer& layer = nets[s]->layers[l];
        c.put(tensor_name(static_cast<int>(b), names[s], l, "kernel"),
              layer.kernel->value);
        c.put(tensor_name(static_cast<int>(b), names[s], l, "bias"),
              layer.bias->value);
      }
    }
  }
}

CouplingStack stack_from_container(const TensorContainer& c) {
  const nlohmann::json& meta = c.meta();
  if (meta.value("kind", "") != "coupling-stack") {
    throw std::runtime_error("model file: not a coupling-stack container");
  }
  if (meta.value("layout_version", 0) != 1) {
    throw std::runtime_error("model file: unsupported layout version");
  }
  StackConfig config;
  config.blocks = meta.at("blocks").get<int>();
  config.channels = meta.at("channels").get<int>();
  config.clamp_k = meta.at("clamp_k").get<double>();
  config.centered_sigma = meta.at("centered_sigma").get<bool>();
  config.dense_layers = meta.at("dense_layers").get<int>();
  config.growth = meta.at("growth").get<int>();

  CouplingStack stack = make_coupling_stack(config, 0);
  for (std::size_t b = 0; b < stack.blocks.size(); ++b) {
    CouplingBlockParams& block = stack.blocks[b];
    DenseBlock* nets[] = {&block.phi, &block.rho, &block.theta};
    const char* names[] = {"phi", "rho", "theta"};
    for (int s = 0; s < 3; ++s) {
      for (std::size_t l = 0; l < nets[s]->layers.size(); ++l) {
        ConvLayer& layer = nets[s]->layers[l];
        const PlanarTensor& kernel =
            c.get(tensor_name(static_cast<int>(b), names[s], l, "kernel"));
        const PlanarTensor& bias =
            c.get(tensor_name(static_cast<int>(b), names[s], l, "bias"));
        if (!kernel.same_shape(layer.kernel->value) ||
            !bias.same_shape(layer.bias->value)) {
          throw std::runtime_error("model file: tensor shape mismatch at " +
                                   tensor_name(static_cast<int>(b), names[s],
                                               l, "kernel"));
        }
        layer.kernel->value = kernel;
        layer.bias->value = bias;
      }
    }
  }
  return stack;
}

void save_stack(const CouplingStack& stack, const std::string& path) {
  TensorContainer c;
  put_stack(c, stack);
  c.save(path);
}

CouplingStack load_stack(const std::string& path) {
  return stack_from_container(TensorContainer::load(path));
}

}  // namespace wavehide
