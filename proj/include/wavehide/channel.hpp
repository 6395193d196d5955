#ifndef WAVEHIDE_CHANNEL_HPP
#define WAVEHIDE_CHANNEL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wavehide/autodiff.hpp"
#include "wavehide/pipeline.hpp"
#include "wavehide/tensor.hpp"

namespace wavehide {

/// One transmission distortion. sigma is a standard deviation on the 0-255
/// scale; ratio is the dropped fraction; qf the JPEG quality factor.
struct AttackSpec {
  enum class Kind { Gaussian, Dropout, Jpeg };
  Kind kind = Kind::Gaussian;
  double sigma = 0.0;
  double ratio = 0.0;
  int qf = 0;
  std::optional<std::uint64_t> seed;  // overrides the caller's seed if set

  static AttackSpec gaussian(double sigma);
  static AttackSpec dropout(double ratio);
  static AttackSpec jpeg(int qf);
  static AttackSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string label() const;
};

PlanarTensor attack_gaussian(const PlanarTensor& stego, double sigma,
                             std::uint64_t seed);
ad::Var attack_gaussian_node(const ad::Var& stego, double sigma,
                             std::uint64_t seed);

struct DropoutResult {
  PlanarTensor attacked;
  DropMask mask;
};
struct DropoutNodeResult {
  ad::Var attacked;
  DropMask mask;
};
DropoutResult attack_dropout(const PlanarTensor& stego, double ratio,
                             std::uint64_t seed);
DropoutNodeResult attack_dropout_node(const ad::Var& stego, double ratio,
                                      std::uint64_t seed);

/// mask = 0 where every channel is exactly 0, else 1. The receiver's only
/// way to learn which pixels were dropped.
DropMask detect_mask(const PlanarTensor& received);

/// Raises pixels that are exactly 0 in all channels to 1/255 in all
/// channels. Applied to quantized stego images before a dropout channel so
/// a legitimately black pixel is never mistaken for a dropped one.
PlanarTensor floor_lift_zeros(const PlanarTensor& img);

enum class Neighborhood { Four, Nine };
const std::vector<std::pair<int, int>>& neighborhood_offsets(Neighborhood nb);
Neighborhood parse_neighborhood(const std::string& name);

struct FillResult {
  PlanarTensor s_e;
  int unfilled = 0;  // holes that never gained a surviving neighbor
};

/// Residual restoration after dropout. Builds the masked residual
/// S_e(surviving) = +/-(cover - received) with zeros at holes, then each
/// pass replaces every hole that has surviving neighbors with the mean of
/// their residual values (simultaneous update from the pass' snapshot) and
/// promotes the filled pixels to survivors for the next pass.
FillResult field_fill(const PlanarTensor& received, const PlanarTensor& cover,
                      const DropMask& mask, HideMode mode, Neighborhood nb,
                      int passes = 3);

/// Same computation on the graph; the mask and the per-pass denominators
/// are constants, so gradients flow only through surviving residuals.
/// Forward values match field_fill exactly.
ad::Var field_fill_node(const ad::Var& received, const ad::Var& cover,
                        const DropMask& mask, HideMode mode, Neighborhood nb,
                        int passes = 3);

/// Baseline-JPEG distortion model: JFIF color transform, 8x8 orthonormal
/// DCT, quality-scaled standard quantization tables, rounding, inverse.
/// Entropy coding is lossless and therefore omitted. Non-multiple-of-8
/// sizes are mirror-padded and cropped back.
PlanarTensor attack_jpeg(const PlanarTensor& stego, int qf);

/// Identical forward values; rounding becomes straight-through in the
/// gradient so training can see the channel.
ad::Var attack_jpeg_node(const ad::Var& stego, int qf);

/// Effective quantization table for a quality factor: entry-wise
/// round(base*scale/100) with scale = 5000/qf below 50 else 200-2*qf,
/// clamped to [1,255] (integer arithmetic throughout).
std::array<int, 64> scaled_quant_table(bool luma, int qf);

/// Dispatches on spec.kind; dropout uses detect-and-return semantics (mask
/// in the result, empty otherwise).
DropoutResult apply_attack(const PlanarTensor& stego, const AttackSpec& spec,
                           std::uint64_t default_seed);

}  // namespace wavehide

#endif
