#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "wavehide/cover_db.hpp"
#include "wavehide/hash.hpp"
#include "wavehide/image.hpp"
#include "wavehide/image_io.hpp"

#include "helpers.hpp"

using namespace wavehide;
using testutil::random_tensor;

TEST_CASE("pixel conversion rounds onto the 8-bit grid and back") {
  const PlanarTensor t = random_tensor(3, 5, 7, 900, -0.2, 1.2);
  const PixelImage px = to_pixels(t);
  REQUIRE(px.width == 7);
  REQUIRE(px.height == 5);
  REQUIRE(px.rgb.size() == 3u * 5 * 7);

  // packed row-major RGB triples
  const double r00 = std::clamp(t.at(0, 0, 0), 0.0, 1.0);
  CHECK(px.rgb[0] == static_cast<unsigned char>(std::lround(r00 * 255.0)));
  const double g21 = std::clamp(t.at(1, 2, 1), 0.0, 1.0);
  CHECK(px.rgb[(2 * 7 + 1) * 3 + 1] ==
        static_cast<unsigned char>(std::lround(g21 * 255.0)));

  const PlanarTensor back = from_pixels(px);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(std::abs(back[i] - std::clamp(t[i], 0.0, 1.0)) <= 0.5 / 255.0);
  }
}

TEST_CASE("quantize01 equals the pixel round trip without leaving float") {
  const PlanarTensor t = random_tensor(3, 6, 4, 901, -0.3, 1.3);
  const PlanarTensor q = quantize01(t);
  CHECK(max_abs_diff(q, from_pixels(to_pixels(t))) == 0.0);
  // idempotent: already-quantized values are fixed points
  CHECK(max_abs_diff(quantize01(q), q) == 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(q[i] >= 0.0);
    CHECK(q[i] <= 1.0);
    const double steps = q[i] * 255.0;
    CHECK(std::abs(steps - std::round(steps)) < 1e-9);
  }
}

TEST_CASE("top-left crops keep values and reject oversized requests") {
  const PlanarTensor t = random_tensor(3, 6, 8, 902);
  const PlanarTensor c = crop_top_left(t, 4, 5);
  REQUIRE(c.channels() == 3);
  REQUIRE(c.height() == 4);
  REQUIRE(c.width() == 5);
  for (int ch = 0; ch < 3; ++ch) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 5; ++x) {
        CHECK(c.at(ch, y, x) == t.at(ch, y, x));
      }
    }
  }
  CHECK_THROWS_AS(crop_top_left(t, 7, 5), std::invalid_argument);
  CHECK_THROWS_AS(crop_top_left(t, 4, 9), std::invalid_argument);
}

TEST_CASE("png files round trip bytes exactly") {
  const auto dir = testutil::scratch_dir("png_io");
  const PlanarTensor t = quantize01(random_tensor(3, 9, 13, 903));
  const PixelImage px = to_pixels(t);

  const std::string path = (dir / "img.png").string();
  write_png(path, px);
  const PixelImage back = read_png(path);
  REQUIRE(back.width == px.width);
  REQUIRE(back.height == px.height);
  CHECK(back.rgb == px.rgb);
}

TEST_CASE("reading a missing or broken png names the file") {
  const auto dir = testutil::scratch_dir("png_bad");
  const std::string missing = (dir / "nope.png").string();
  CHECK_THROWS_AS(read_png(missing), std::runtime_error);

  const std::string garbage = (dir / "garbage.png").string();
  std::ofstream(garbage) << "this is not a png";
  CHECK_THROWS_AS(read_png(garbage), std::runtime_error);
}

TEST_CASE("directory listings are sorted and filtered to pngs") {
  const auto dir = testutil::scratch_dir("png_list");
  const PixelImage px = to_pixels(random_tensor(3, 4, 4, 904));
  write_png((dir / "b.png").string(), px);
  write_png((dir / "a.png").string(), px);
  write_png((dir / "c.png").string(), px);
  std::ofstream(dir / "notes.txt") << "ignore me";

  const auto files = list_pngs(dir.string());
  REQUIRE(files.size() == 3);
  CHECK(files[0] == (dir / "a.png").string());
  CHECK(files[1] == (dir / "b.png").string());
  CHECK(files[2] == (dir / "c.png").string());
}

TEST_CASE("the cover database finds covers by content hash") {
  const auto dir = testutil::scratch_dir("cover_db");
  const PixelImage a = to_pixels(random_tensor(3, 6, 6, 905));
  const PixelImage b = to_pixels(random_tensor(3, 6, 6, 906));
  write_png((dir / "alpha.png").string(), a);
  write_png((dir / "beta.png").string(), b);

  const CoverDatabase db = CoverDatabase::scan(dir.string());
  REQUIRE(db.size() == 2);

  const std::string id_a = sha256_hex(a.rgb.data(), a.rgb.size());
  CHECK(db.lookup(id_a) == (dir / "alpha.png").string());
  const std::string id_b = sha256_hex(b.rgb.data(), b.rgb.size());
  CHECK(db.lookup(id_b) == (dir / "beta.png").string());
}

TEST_CASE("an unknown cover id reports the database size") {
  const auto dir = testutil::scratch_dir("cover_miss");
  write_png((dir / "only.png").string(),
            to_pixels(random_tensor(3, 4, 4, 907)));
  const CoverDatabase db = CoverDatabase::scan(dir.string());
  try {
    db.lookup("deadbeef");
    FAIL("lookup should have thrown");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("deadbeef") != std::string::npos);
    CHECK(msg.find("1 cover") != std::string::npos);
  }
}

TEST_CASE("two covers with identical pixels cannot share a database") {
  const auto dir = testutil::scratch_dir("cover_dup");
  const PixelImage px = to_pixels(random_tensor(3, 4, 4, 908));
  write_png((dir / "one.png").string(), px);
  write_png((dir / "two.png").string(), px);
  try {
    CoverDatabase::scan(dir.string());
    FAIL("scan should have thrown");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("one.png") != std::string::npos);
    CHECK(msg.find("two.png") != std::string::npos);
  }
}
