#ifndef WAVEHIDE_DCT_HPP
#define WAVEHIDE_DCT_HPP

#include "wavehide/tensor.hpp"

namespace wavehide {

/// Orthonormal 2-D DCT-II applied independently to each 8x8 block of each
/// channel. H and W must be multiples of 8. Being orthonormal, the inverse
/// equals the transpose, so the pair is exactly energy preserving.
PlanarTensor dct8x8_forward(const PlanarTensor& t);
PlanarTensor dct8x8_inverse(const PlanarTensor& t);

}  // namespace wavehide

#endif
