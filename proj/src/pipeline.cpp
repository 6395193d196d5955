#include "wavehide/pipeline.hpp"

#include <stdexcept>

#include "wavehide/hash.hpp"

namespace wavehide {

HideMode parse_hide_mode(const std::string& name) {
  if (name == "subtract") return HideMode::Subtract;
  if (name == "add") return HideMode::Add;
  throw std::invalid_argument("unknown hide mode: " + name +
                              " (expected subtract or add)");
}

const char* hide_mode_name(HideMode mode) {
  return mode == HideMode::Subtract ? "subtract" : "add";
}

ad::Var encode_secret(const ad::Var& secret, const CouplingStack& stack) {
  return ad::iwt(stack_forward(stack, ad::dwt(secret)));
}

PlanarTensor encode_secret(const PlanarTensor& secret,
                           const CouplingStack& stack) {
  ad::NoGradGuard guard;
  return encode_secret(ad::constant(secret), stack)->value;
}

StegoResult hide(const PlanarTensor& secret, const PlanarTensor& cover,
                 const CouplingStack& stack, HideMode mode) {
  if (!secret.same_shape(cover)) {
    throw std::invalid_argument("hide: secret and cover shapes differ");
  }
  StegoResult result;
  result.s_e = encode_secret(secret, stack);
  result.stego = cover;
  if (mode == HideMode::Subtract) {
    for (std::size_t i = 0; i < result.stego.size(); ++i) {
      result.stego[i] -= result.s_e[i];
    }
  } else {
    for (std::size_t i = 0; i < result.stego.size(); ++i) {
      result.stego[i] += result.s_e[i];
    }
  }
  result.stego_quantized = quantize01(result.stego);
  result.s_e_norm = l2_norm(result.s_e);
  const PixelImage cover_pixels = to_pixels(cover);
  result.cover_id =
      sha256_hex(cover_pixels.rgb.data(), cover_pixels.rgb.size());
  return result;
}

PlanarTensor extract(const PlanarTensor& stego, const PlanarTensor& cover,
                     HideMode mode) {
  if (!stego.same_shape(cover)) {
    throw std::invalid_argument("extract: stego and cover shapes differ");
  }
  PlanarTensor s_e = cover;
  if (mode == HideMode::Subtract) {
    for (std::size_t i = 0; i < s_e.size(); ++i) s_e[i] -= stego[i];
  } else {
    for (std::size_t i = 0; i < s_e.size(); ++i) s_e[i] = stego[i] - cover[i];
  }
  return s_e;
}

ad::Var extract(const ad::Var& stego, const ad::Var& cover, HideMode mode) {
  return mode == HideMode::Subtract ? ad::sub(cover, stego)
                                    : ad::sub(stego, cover);
}

ad::Var reveal(const ad::Var& s_e, const CouplingStack& stack) {
  return ad::iwt(stack_inverse(stack, ad::dwt(s_e)));
}

PlanarTensor reveal(const PlanarTensor& s_e, const CouplingStack& stack) {
  ad::NoGradGuard guard;
  return reveal(ad::constant(s_e), stack)->value;
}

}  // namespace wavehide
