#include "wavehide/image.hpp"

#include <cmath>
#include <stdexcept>

namespace wavehide {

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace

PixelImage to_pixels(const PlanarTensor& t) {
  if (t.channels() != 3) {
    throw std::invalid_argument("to_pixels: need a 3-channel tensor");
  }
  PixelImage img;
  img.width = t.width();
  img.height = t.height();
  img.rgb.resize(static_cast<std::size_t>(t.width()) * t.height() * 3);
  std::size_t i = 0;
  for (int y = 0; y < t.height(); ++y) {
    for (int x = 0; x < t.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        img.rgb[i++] =
            static_cast<unsigned char>(std::round(clamp01(t.at(c, y, x)) * 255.0));
      }
    }
  }
  return img;
}

PlanarTensor from_pixels(const PixelImage& img) {
  if (img.rgb.size() !=
      static_cast<std::size_t>(img.width) * img.height * 3) {
    throw std::invalid_argument("from_pixels: buffer size mismatch");
  }
  PlanarTensor t(3, img.height, img.width);
  std::size_t i = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        t.at(c, y, x) = img.rgb[i++] / 255.0;
      }
    }
  }
  return t;
}

PlanarTensor quantize01(const PlanarTensor& t) {
  PlanarTensor out = t;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::round(clamp01(out[i]) * 255.0) / 255.0;
  }
  return out;
}

PlanarTensor crop_top_left(const PlanarTensor& t, int height, int width) {
  if (height <= 0 || width <= 0 || height > t.height() || width > t.width()) {
    throw std::invalid_argument("crop_top_left: crop does not fit the tensor");
  }
  PlanarTensor out(t.channels(), height, width);
  for (int c = 0; c < t.channels(); ++c) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        out.at(c, y, x) = t.at(c, y, x);
      }
    }
  }
  return out;
}

}  // namespace wavehide
