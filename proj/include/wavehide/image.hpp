#ifndef WAVEHIDE_IMAGE_HPP
#define WAVEHIDE_IMAGE_HPP

#include <vector>

#include "wavehide/tensor.hpp"

namespace wavehide {

/// 8-bit RGB image, packed row-major (the PNG interchange form).
struct PixelImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> rgb;
};

/// Clamps to [0,1] and rounds each sample onto the 8-bit grid.
PixelImage to_pixels(const PlanarTensor& t);
PlanarTensor from_pixels(const PixelImage& img);

/// to_pixels followed by from_pixels without leaving float: clamp to [0,1],
/// round to multiples of 1/255.
PlanarTensor quantize01(const PlanarTensor& t);

/// Top-left crop; the tensor must be at least the requested size.
PlanarTensor crop_top_left(const PlanarTensor& t, int height, int width);

}  // namespace wavehide

#endif
