#ifndef WAVEHIDE_PIPELINE_HPP
#define WAVEHIDE_PIPELINE_HPP

#include <string>

#include "wavehide/coupling.hpp"
#include "wavehide/image.hpp"

namespace wavehide {

/// Subtract: stego = cover - S_e, so extraction is cover - stego.
/// Add: stego = cover + S_e, extraction is stego - cover.
enum class HideMode { Subtract, Add };

HideMode parse_hide_mode(const std::string& name);
const char* hide_mode_name(HideMode mode);

struct StegoResult {
  PlanarTensor stego;            // float, pre-quantization
  PlanarTensor stego_quantized;  // clamped to [0,1], on the 8-bit grid
  PlanarTensor s_e;              // the encoded residual that was embedded
  double s_e_norm = 0.0;
  std::string cover_id;          // content hash of the cover's 8-bit RGB form
};

/// S_e = iwt(stack_forward(dwt(secret))). The cover never enters the
/// network; the residual depends on the secret and parameters alone.
PlanarTensor encode_secret(const PlanarTensor& secret,
                           const CouplingStack& stack);
ad::Var encode_secret(const ad::Var& secret, const CouplingStack& stack);

StegoResult hide(const PlanarTensor& secret, const PlanarTensor& cover,
                 const CouplingStack& stack, HideMode mode);

/// Pure per-mode subtraction; no clamping. The receiver must hold the true
/// cover.
PlanarTensor extract(const PlanarTensor& stego, const PlanarTensor& cover,
                     HideMode mode);
ad::Var extract(const ad::Var& stego, const ad::Var& cover, HideMode mode);

/// secret = iwt(stack_inverse(dwt(S_e))).
PlanarTensor reveal(const PlanarTensor& s_e, const CouplingStack& stack);
ad::Var reveal(const ad::Var& s_e, const CouplingStack& stack);

}  // namespace wavehide

#endif
