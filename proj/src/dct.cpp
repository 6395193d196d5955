#include "wavehide/dct.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavehide {

namespace {

// basis[u][x] = alpha(u) * cos((2x+1) u pi / 16), alpha(0) = sqrt(1/8),
// alpha(u>0) = 1/2. Rows are orthonormal, so inverse = transpose.
const std::array<std::array<double, 8>, 8>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> m{};
    for (int u = 0; u < 8; ++u) {
      const double alpha = u == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
      for (int x = 0; x < 8; ++x) {
        m[u][x] = alpha * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
    return m;
  }();
  return basis;
}

template <bool Forward>
PlanarTensor transform_blocks(const PlanarTensor& t) {
  if (t.height() % 8 != 0 || t.width() % 8 != 0) {
    throw std::invalid_argument("dct8x8: dimensions must be multiples of 8");
  }
  const auto& c = dct_basis();
  PlanarTensor out(t.channels(), t.height(), t.width());
  double rows[8][8];
  for (int ch = 0; ch < t.channels(); ++ch) {
    for (int by = 0; by < t.height(); by += 8) {
      for (int bx = 0; bx < t.width(); bx += 8) {
        // Rows first: rows[y][u] = sum_x block[y][x] * c[u][x] (forward)
        // or sum_u block[y][u] * c[u][x] (inverse).
        for (int y = 0; y < 8; ++y) {
          for (int u = 0; u < 8; ++u) {
            double s = 0.0;
            for (int x = 0; x < 8; ++x) {
              s += Forward ? t.at(ch, by + y, bx + x) * c[u][x]
                           : t.at(ch, by + y, bx + x) * c[x][u];
            }
            rows[y][u] = s;
          }
        }
        for (int v = 0; v < 8; ++v) {
          for (int u = 0; u < 8; ++u) {
            double s = 0.0;
            for (int y = 0; y < 8; ++y) {
              s += Forward ? rows[y][u] * c[v][y] : rows[y][u] * c[y][v];
            }
            out.at(ch, by + v, bx + u) = s;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

PlanarTensor dct8x8_forward(const PlanarTensor& t) {
  return transform_blocks<true>(t);
}

PlanarTensor dct8x8_inverse(const PlanarTensor& t) {
  return transform_blocks<false>(t);
}

}  // namespace wavehide
