#include "wavehide/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wavehide/rng.hpp"

namespace wavehide {

AttackSpec AttackSpec::gaussian(double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian: sigma must be >= 0");
  AttackSpec s;
  s.kind = Kind::Gaussian;
  s.sigma = sigma;
  return s;
}

AttackSpec AttackSpec::dropout(double ratio) {
  if (ratio < 0.0 || ratio > 1.0) {
    throw std::invalid_argument("dropout: ratio must be in [0,1]");
  }
  AttackSpec s;
  s.kind = Kind::Dropout;
  s.ratio = ratio;
  return s;
}

AttackSpec AttackSpec::jpeg(int qf) {
  if (qf < 1 || qf > 100) {
    throw std::invalid_argument("jpeg: quality factor must be in [1,100]");
  }
  AttackSpec s;
  s.kind = Kind::Jpeg;
  s.qf = qf;
  return s;
}

AttackSpec AttackSpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  AttackSpec s;
  if (kind == "gaussian") {
    s = gaussian(j.at("sigma").get<double>());
  } else if (kind == "dropout") {
    s = dropout(j.at("ratio").get<double>());
  } else if (kind == "jpeg") {
    s = jpeg(j.at("qf").get<int>());
  } else {
    throw std::invalid_argument("unknown attack kind: " + kind);
  }
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

nlohmann::json AttackSpec::to_json() const {
  nlohmann::json j;
  switch (kind) {
    case Kind::Gaussian:
      j["kind"] = "gaussian";
      j["sigma"] = sigma;
      break;
    case Kind::Dropout:
      j["kind"] = "dropout";
      j["ratio"] = ratio;
      break;
    case Kind::Jpeg:
      j["kind"] = "jpeg";
      j["qf"] = qf;
      break;
  }
  if (seed) j["seed"] = *seed;
  return j;
}

std::string AttackSpec::label() const {
  switch (kind) {
    case Kind::Gaussian: {
      std::string v = std::to_string(sigma);
      v.erase(v.find_last_not_of('0') + 1);
      if (!v.empty() && v.back() == '.') v.pop_back();
      return "gaussian(" + v + ")";
    }
    case Kind::Dropout: {
      std::string v = std::to_string(ratio);
      v.erase(v.find_last_not_of('0') + 1);
      if (!v.empty() && v.back() == '.') v.pop_back();
      return "dropout(" + v + ")";
    }
    case Kind::Jpeg:
      return "jpeg(" + std::to_string(qf) + ")";
  }
  return "?";
}

ad::Var attack_gaussian_node(const ad::Var& stego, double sigma,
                             std::uint64_t seed) {
  if (sigma < 0.0) {
    throw std::invalid_argument("attack_gaussian: sigma must be >= 0");
  }
  if (sigma == 0.0) return ad::add_scalar(stego, 0.0);
  std::mt19937_64 rng(seed);
  PlanarTensor noise =
      random_normal(rng, stego->value.channels(), stego->value.height(),
                    stego->value.width(), 0.0, sigma / 255.0);
  return ad::clamp(ad::add(stego, ad::constant(std::move(noise))), 0.0, 1.0);
}

PlanarTensor attack_gaussian(const PlanarTensor& stego, double sigma,
                             std::uint64_t seed) {
  ad::NoGradGuard guard;
  return attack_gaussian_node(ad::constant(stego), sigma, seed)->value;
}

namespace {

DropMask make_drop_mask(int h, int w, double ratio, std::uint64_t seed) {
  const std::size_t total = static_cast<std::size_t>(h) * w;
  const std::size_t k =
      static_cast<std::size_t>(std::llround(ratio * static_cast<double>(total)));
  DropMask mask(1, h, w, 1.0);
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(idx[i], idx[pick(rng)]);
    mask[idx[i]] = 0.0;
  }
  return mask;
}

PlanarTensor tile_channels(const PlanarTensor& one, int channels) {
  PlanarTensor out(channels, one.height(), one.width());
  const std::size_t plane =
      static_cast<std::size_t>(one.height()) * one.width();
  for (int c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < plane; ++i) out[c * plane + i] = one[i];
  }
  return out;
}

}  // namespace

DropoutNodeResult attack_dropout_node(const ad::Var& stego, double ratio,
                                      std::uint64_t seed) {
  if (ratio < 0.0 || ratio > 1.0) {
    throw std::invalid_argument("attack_dropout: ratio must be in [0,1]");
  }
  DropMask mask = make_drop_mask(stego->value.height(), stego->value.width(),
                                 ratio, seed);
  ad::Var attacked = ad::mul(
      stego, ad::constant(tile_channels(mask, stego->value.channels())));
  return {attacked, std::move(mask)};
}

DropoutResult attack_dropout(const PlanarTensor& stego, double ratio,
                             std::uint64_t seed) {
  ad::NoGradGuard guard;
  DropoutNodeResult r = attack_dropout_node(ad::constant(stego), ratio, seed);
  return {r.attacked->value, std::move(r.mask)};
}

DropMask detect_mask(const PlanarTensor& received) {
  DropMask mask(1, received.height(), received.width(), 1.0);
  for (int y = 0; y < received.height(); ++y) {
    for (int x = 0; x < received.width(); ++x) {
      bool all_zero = true;
      for (int c = 0; c < received.channels(); ++c) {
        if (received.at(c, y, x) != 0.0) {
          all_zero = false;
          break;
        }
      }
      if (all_zero) mask.at(0, y, x) = 0.0;
    }
  }
  return mask;
}

PlanarTensor floor_lift_zeros(const PlanarTensor& img) {
  PlanarTensor out = img;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      bool all_zero = true;
      for (int c = 0; c < out.channels(); ++c) {
        if (out.at(c, y, x) != 0.0) {
          all_zero = false;
          break;
        }
      }
      if (all_zero) {
        for (int c = 0; c < out.channels(); ++c) out.at(c, y, x) = 1.0 / 255.0;
      }
    }
  }
  return out;
}

const std::vector<std::pair<int, int>>& neighborhood_offsets(Neighborhood nb) {
  static const std::vector<std::pair<int, int>> four = {
      {-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  static const std::vector<std::pair<int, int>> nine = {
      {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
  return nb == Neighborhood::Four ? four : nine;
}

Neighborhood parse_neighborhood(const std::string& name) {
  if (name == "four") return Neighborhood::Four;
  if (name == "nine") return Neighborhood::Nine;
  throw std::invalid_argument("unknown neighborhood: " + name +
                              " (expected four or nine)");
}

namespace {

void check_fill_shapes(const PlanarTensor& received, const PlanarTensor& cover,
                       const DropMask& mask) {
  if (!received.same_shape(cover)) {
    throw std::invalid_argument("field_fill: received/cover shape mismatch");
  }
  if (mask.channels() != 1 || mask.height() != received.height() ||
      mask.width() != received.width()) {
    throw std::invalid_argument("field_fill: mask must be 1 x H x W");
  }
}

}  // namespace

FillResult field_fill(const PlanarTensor& received, const PlanarTensor& cover,
                      const DropMask& mask, HideMode mode, Neighborhood nb,
                      int passes) {
  check_fill_shapes(received, cover, mask);
  if (passes < 1) throw std::invalid_argument("field_fill: passes must be >= 1");
  const auto& offsets = neighborhood_offsets(nb);
  const int h = received.height();
  const int w = received.width();
  const int channels = received.channels();

  PlanarTensor cur(channels, h, w);
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double d = mode == HideMode::Subtract
                             ? cover.at(c, y, x) - received.at(c, y, x)
                             : received.at(c, y, x) - cover.at(c, y, x);
        cur.at(c, y, x) = mask.at(0, y, x) * d;
      }
    }
  }

  DropMask cur_mask = mask;
  for (int pass = 0; pass < passes; ++pass) {
    bool holes_left = false;
    PlanarTensor s_sum = neighbor_sum_raw(cur, offsets);
    PlanarTensor mask_sum = neighbor_sum_raw(cur_mask, offsets);
    DropMask next_mask = cur_mask;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (cur_mask.at(0, y, x) != 0.0) continue;
        if (mask_sum.at(0, y, x) > 0.0) {
          for (int c = 0; c < channels; ++c) {
            cur.at(c, y, x) = s_sum.at(c, y, x) / mask_sum.at(0, y, x);
          }
          next_mask.at(0, y, x) = 1.0;
        } else {
          holes_left = true;
        }
      }
    }
    cur_mask = std::move(next_mask);
    if (!holes_left) break;
  }

  FillResult result;
  result.s_e = std::move(cur);
  for (std::size_t i = 0; i < cur_mask.size(); ++i) {
    if (cur_mask[i] == 0.0) ++result.unfilled;
  }
  return result;
}

ad::Var field_fill_node(const ad::Var& received, const ad::Var& cover,
                        const DropMask& mask, HideMode mode, Neighborhood nb,
                        int passes) {
  check_fill_shapes(received->value, cover->value, mask);
  if (passes < 1) throw std::invalid_argument("field_fill: passes must be >= 1");
  const auto& offsets = neighborhood_offsets(nb);
  const int channels = received->value.channels();

  ad::Var diff = mode == HideMode::Subtract ? ad::sub(cover, received)
                                            : ad::sub(received, cover);
  ad::Var cur = ad::mul(diff, ad::constant(tile_channels(mask, channels)));

  DropMask cur_mask = mask;
  for (int pass = 0; pass < passes; ++pass) {
    PlanarTensor mask_sum = neighbor_sum_raw(cur_mask, offsets);
    // Denominator 1 at pixels that keep their value, the neighbor count at
    // pixels being filled; the fill indicator selects between the two terms.
    DropMask safe_den(1, mask_sum.height(), mask_sum.width(), 1.0);
    DropMask fill_at(1, mask_sum.height(), mask_sum.width(), 0.0);
    DropMask keep_at(1, mask_sum.height(), mask_sum.width(), 1.0);
    bool any_fill = false;
    bool holes_left = false;
    for (std::size_t i = 0; i < mask_sum.size(); ++i) {
      if (cur_mask[i] != 0.0) continue;
      if (mask_sum[i] > 0.0) {
        safe_den[i] = mask_sum[i];
        fill_at[i] = 1.0;
        keep_at[i] = 0.0;
        cur_mask[i] = 1.0;
        any_fill = true;
      } else {
        holes_left = true;
      }
    }
    if (any_fill) {
      ad::Var filled = ad::div(ad::neighbor_sum(cur, offsets),
                               ad::constant(tile_channels(safe_den, channels)));
      ad::Var keep =
          ad::mul(cur, ad::constant(tile_channels(keep_at, channels)));
      cur = ad::add(
          keep, ad::mul(filled, ad::constant(tile_channels(fill_at, channels))));
    }
    if (!holes_left) break;
  }
  return cur;
}

namespace {

constexpr std::array<int, 64> kLumaTable = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kChromaTable = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// Tiled full-resolution quantization tensor: channel 0 uses the luma table,
// channels 1-2 the chroma table, repeated across every 8x8 block.
PlanarTensor quant_tensor(int h, int w, int qf) {
  const std::array<int, 64> luma = scaled_quant_table(true, qf);
  const std::array<int, 64> chroma = scaled_quant_table(false, qf);
  PlanarTensor q(3, h, w);
  for (int c = 0; c < 3; ++c) {
    const std::array<int, 64>& table = c == 0 ? luma : chroma;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        q.at(c, y, x) = static_cast<double>(table[(y % 8) * 8 + (x % 8)]);
      }
    }
  }
  return q;
}

ad::Var rgb_to_ycbcr_shifted(const ad::Var& rgb) {
  ad::Var r = ad::slice_channels(rgb, 0, 1);
  ad::Var g = ad::slice_channels(rgb, 1, 2);
  ad::Var b = ad::slice_channels(rgb, 2, 3);
  // Shifted form: luma minus 128, chroma already centered on 0.
  ad::Var y = ad::add_scalar(
      ad::add(ad::add(ad::mul_scalar(r, 0.299), ad::mul_scalar(g, 0.587)),
              ad::mul_scalar(b, 0.114)),
      -128.0);
  ad::Var cb = ad::add(ad::add(ad::mul_scalar(r, -0.168735892),
                               ad::mul_scalar(g, -0.331264108)),
                       ad::mul_scalar(b, 0.5));
  ad::Var cr = ad::add(ad::add(ad::mul_scalar(r, 0.5),
                               ad::mul_scalar(g, -0.418687589)),
                       ad::mul_scalar(b, -0.081312411));
  return ad::concat_channels({y, cb, cr});
}

ad::Var ycbcr_shifted_to_rgb(const ad::Var& ycc) {
  ad::Var y = ad::add_scalar(ad::slice_channels(ycc, 0, 1), 128.0);
  ad::Var cb = ad::slice_channels(ycc, 1, 2);
  ad::Var cr = ad::slice_channels(ycc, 2, 3);
  ad::Var r = ad::add(y, ad::mul_scalar(cr, 1.402));
  ad::Var g = ad::add(y, ad::add(ad::mul_scalar(cb, -0.344136286),
                                 ad::mul_scalar(cr, -0.714136286)));
  ad::Var b = ad::add(y, ad::mul_scalar(cb, 1.772));
  return ad::concat_channels({r, g, b});
}

}  // namespace

std::array<int, 64> scaled_quant_table(bool luma, int qf) {
  if (qf < 1 || qf > 100) {
    throw std::invalid_argument("quant table: quality factor out of [1,100]");
  }
  const int scale = qf < 50 ? 5000 / qf : 200 - 2 * qf;
  const std::array<int, 64>& base = luma ? kLumaTable : kChromaTable;
  std::array<int, 64> out{};
  for (int i = 0; i < 64; ++i) {
    int v = (base[i] * scale + 50) / 100;
    out[i] = std::clamp(v, 1, 255);
  }
  return out;
}

ad::Var attack_jpeg_node(const ad::Var& stego, int qf) {
  if (stego->value.channels() != 3) {
    throw std::invalid_argument("attack_jpeg: need a 3-channel image");
  }
  const int h = stego->value.height();
  const int w = stego->value.width();
  const int pad_b = (8 - h % 8) % 8;
  const int pad_r = (8 - w % 8) % 8;

  ad::Var x = ad::mul_scalar(stego, 255.0);
  if (pad_b > 0 || pad_r > 0) x = ad::pad_reflect(x, pad_b, pad_r);
  x = rgb_to_ycbcr_shifted(x);
  x = ad::dct8(x);
  ad::Var q = ad::constant(quant_tensor(h + pad_b, w + pad_r, qf));
  x = ad::mul(ad::round_ste(ad::div(x, q)), q);
  x = ad::idct8(x);
  x = ycbcr_shifted_to_rgb(x);
  if (pad_b > 0 || pad_r > 0) x = ad::crop_spatial(x, h, w);
  return ad::clamp(ad::mul_scalar(x, 1.0 / 255.0), 0.0, 1.0);
}

PlanarTensor attack_jpeg(const PlanarTensor& stego, int qf) {
  ad::NoGradGuard guard;
  return attack_jpeg_node(ad::constant(stego), qf)->value;
}

DropoutResult apply_attack(const PlanarTensor& stego, const AttackSpec& spec,
                           std::uint64_t default_seed) {
  const std::uint64_t seed = spec.seed.value_or(default_seed);
  switch (spec.kind) {
    case AttackSpec::Kind::Gaussian:
      return {attack_gaussian(stego, spec.sigma, seed), DropMask()};
    case AttackSpec::Kind::Dropout:
      return attack_dropout(stego, spec.ratio, seed);
    case AttackSpec::Kind::Jpeg:
      return {attack_jpeg(stego, spec.qf), DropMask()};
  }
  throw std::logic_error("apply_attack: unhandled attack kind");
}

}  // namespace wavehide
