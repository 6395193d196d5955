#include "wavehide/wavelet.hpp"

#include <stdexcept>

namespace wavehide {

PlanarTensor dwt_haar(const PlanarTensor& image) {
  const int c = image.channels();
  const int h = image.height();
  const int w = image.width();
  if (h % 2 != 0 || w % 2 != 0) {
    throw std::invalid_argument("dwt_haar: height and width must be even");
  }
  const int hh = h / 2;
  const int hw = w / 2;
  PlanarTensor out(4 * c, hh, hw);
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < hh; ++y) {
      for (int x = 0; x < hw; ++x) {
        const double a = image.at(ch, 2 * y, 2 * x);
        const double b = image.at(ch, 2 * y, 2 * x + 1);
        const double cc = image.at(ch, 2 * y + 1, 2 * x);
        const double d = image.at(ch, 2 * y + 1, 2 * x + 1);
        out.at(ch, y, x) = (a + b + cc + d) / 2.0;
        out.at(c + ch, y, x) = (a - b + cc - d) / 2.0;
        out.at(2 * c + ch, y, x) = (a + b - cc - d) / 2.0;
        out.at(3 * c + ch, y, x) = (a - b - cc + d) / 2.0;
      }
    }
  }
  return out;
}

PlanarTensor iwt_haar(const PlanarTensor& subbands) {
  const int c4 = subbands.channels();
  if (c4 % 4 != 0) {
    throw std::invalid_argument(
        "iwt_haar: channel count must be divisible by 4");
  }
  const int c = c4 / 4;
  const int hh = subbands.height();
  const int hw = subbands.width();
  PlanarTensor out(c, 2 * hh, 2 * hw);
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < hh; ++y) {
      for (int x = 0; x < hw; ++x) {
        const double ll = subbands.at(ch, y, x);
        const double hl = subbands.at(c + ch, y, x);
        const double lh = subbands.at(2 * c + ch, y, x);
        const double hhv = subbands.at(3 * c + ch, y, x);
        out.at(ch, 2 * y, 2 * x) = (ll + hl + lh + hhv) / 2.0;
        out.at(ch, 2 * y, 2 * x + 1) = (ll - hl + lh - hhv) / 2.0;
        out.at(ch, 2 * y + 1, 2 * x) = (ll + hl - lh - hhv) / 2.0;
        out.at(ch, 2 * y + 1, 2 * x + 1) = (ll - hl - lh + hhv) / 2.0;
      }
    }
  }
  return out;
}

}  // namespace wavehide
