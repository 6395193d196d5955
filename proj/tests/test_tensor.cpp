#include <doctest.h>

#include <stdexcept>

#include "wavehide/tensor.hpp"

#include "helpers.hpp"

using namespace wavehide;

TEST_CASE("PlanarTensor indexing is channel-major row-major") {
  PlanarTensor t(2, 3, 4);
  CHECK(t.size() == 24);
  t.at(0, 0, 0) = 1.0;
  t.at(0, 2, 3) = 2.0;
  t.at(1, 0, 0) = 3.0;
  CHECK(t[0] == 1.0);
  CHECK(t[2 * 4 + 3] == 2.0);
  CHECK(t[12] == 3.0);
}

TEST_CASE("PlanarTensor rejects negative dimensions, allows empty ones") {
  CHECK_THROWS_AS(PlanarTensor(1, -1, 2), std::invalid_argument);
  CHECK_THROWS_AS(PlanarTensor(-3, 1, 2), std::invalid_argument);
  CHECK(PlanarTensor(0, 2, 2).empty());
  CHECK(PlanarTensor().empty());
}

TEST_CASE("fill and same_shape") {
  PlanarTensor a(3, 2, 2);
  a.fill(0.25);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == 0.25);
  CHECK(a.same_shape(PlanarTensor(3, 2, 2)));
  CHECK_FALSE(a.same_shape(PlanarTensor(3, 2, 3)));
}

TEST_CASE("max_abs_diff and l2_norm") {
  PlanarTensor a(1, 1, 3);
  PlanarTensor b(1, 1, 3);
  a[0] = 1.0; a[1] = -2.0; a[2] = 0.5;
  b[0] = 1.5; b[1] = -2.0; b[2] = 0.0;
  CHECK(max_abs_diff(a, b) == 0.5);
  CHECK(max_abs(a) == 2.0);
  CHECK(l2_norm(b) == doctest::Approx(std::sqrt(1.5 * 1.5 + 4.0)));
}

TEST_CASE("require_finite flags NaN and infinity") {
  PlanarTensor a(1, 1, 2, 1.0);
  CHECK_NOTHROW(require_finite(a, "a"));
  a[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(require_finite(a, "a"), std::invalid_argument);
  a[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(require_finite(a, "a"), std::invalid_argument);
}

TEST_CASE("neighbor_sum_raw matches a per-pixel loop exactly") {
  const PlanarTensor t = testutil::random_tensor(2, 5, 7, 11, -1.0, 1.0);
  const std::vector<std::pair<int, int>> offsets = {
      {-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  const PlanarTensor fast = neighbor_sum_raw(t, offsets);

  for (int c = 0; c < 2; ++c) {
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 7; ++x) {
        double acc = 0.0;
        for (const auto& [dy, dx] : offsets) {
          const int sy = y + dy;
          const int sx = x + dx;
          if (sy < 0 || sy >= 5 || sx < 0 || sx >= 7) continue;
          acc += t.at(c, sy, sx);
        }
        CHECK(fast.at(c, y, x) == acc);
      }
    }
  }
}

TEST_CASE("neighbor_sum_raw treats out-of-bounds neighbors as absent") {
  PlanarTensor t(1, 2, 2, 1.0);
  const PlanarTensor s =
      neighbor_sum_raw(t, {{-1, 0}, {1, 0}, {0, -1}, {0, 1}});
  // every corner pixel of a 2x2 grid has exactly two in-bounds neighbors
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == 2.0);
}
