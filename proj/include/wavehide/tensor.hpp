#ifndef WAVEHIDE_TENSOR_HPP
#define WAVEHIDE_TENSOR_HPP

#include <cstddef>
#include <utility>
#include <vector>

namespace wavehide {

/// Dense channel-major (C, H, W) tensor of doubles, row-major within a
/// channel. The single numeric currency of the library: images, wavelet
/// subbands, convolution kernels (flattened to (out*in, kh, kw)) and scalar
/// results (1x1x1) all live in this type.
class PlanarTensor {
 public:
  PlanarTensor() = default;
  PlanarTensor(int channels, int height, int width, double fill = 0.0);
  static PlanarTensor from_data(int channels, int height, int width,
                                std::vector<double> data);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& at(int c, int y, int x) {
    return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }
  double at(int c, int y, int x) const {
    return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  bool same_shape(const PlanarTensor& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }

  void fill(double v);

 private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Wavelet subband stack: a PlanarTensor whose channels are
/// [LL_R, LL_G, LL_B, HL_R, HL_G, HL_B, LH_R, LH_G, LH_B, HH_R, HH_G, HH_B]
/// at half the source resolution. The alias documents intent; the layout is
/// part of the serialization contract.
using SubbandTensor = PlanarTensor;

/// Per-pixel survival indicator (1 channel, values in {0,1}), shared across
/// the RGB channels of the image it describes.
using DropMask = PlanarTensor;

/// out(c,y,x) = sum of t(c, y+dy, x+dx) over the (dy,dx) offsets whose
/// source lands in bounds, accumulated in the order the offsets are given.
/// The accumulation order is part of the contract: restoration code and its
/// per-pixel oracle must produce bit-identical sums.
PlanarTensor neighbor_sum_raw(const PlanarTensor& t,
                              const std::vector<std::pair<int, int>>& offsets);

double max_abs(const PlanarTensor& t);
double max_abs_diff(const PlanarTensor& a, const PlanarTensor& b);
double l2_norm(const PlanarTensor& t);
bool all_finite(const PlanarTensor& t);

/// Throws std::invalid_argument naming `what` if t contains NaN or Inf.
void require_finite(const PlanarTensor& t, const char* what);

}  // namespace wavehide

#endif
