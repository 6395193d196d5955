#ifndef WAVEHIDE_WAVELET_HPP
#define WAVEHIDE_WAVELET_HPP

#include "wavehide/tensor.hpp"

namespace wavehide {

/// Orthonormal single-level 2-D Haar analysis. Input (C, H, W) with even H
/// and W; output (4C, H/2, W/2) with channels ordered [LL..., HL..., LH...,
/// HH...], each group repeating the input channel order. For a 2x2 block
/// (a b / c d): LL=(a+b+c+d)/2, HL=(a-b+c-d)/2, LH=(a+b-c-d)/2,
/// HH=(a-b-c+d)/2.
PlanarTensor dwt_haar(const PlanarTensor& image);

/// Exact algebraic inverse of dwt_haar. Input channels must be divisible
/// by 4.
PlanarTensor iwt_haar(const PlanarTensor& subbands);

}  // namespace wavehide

#endif
