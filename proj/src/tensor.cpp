#include "wavehide/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wavehide {

PlanarTensor::PlanarTensor(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) {
    throw std::invalid_argument("PlanarTensor: negative dimension");
  }
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

PlanarTensor PlanarTensor::from_data(int channels, int height, int width,
                                     std::vector<double> data) {
  if (data.size() != static_cast<std::size_t>(channels) * height * width) {
    throw std::invalid_argument("PlanarTensor::from_data: size mismatch");
  }
  PlanarTensor t;
  t.channels_ = channels;
  t.height_ = height;
  t.width_ = width;
  t.data_ = std::move(data);
  return t;
}

void PlanarTensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

PlanarTensor neighbor_sum_raw(
    const PlanarTensor& t, const std::vector<std::pair<int, int>>& offsets) {
  const int c = t.channels();
  const int h = t.height();
  const int w = t.width();
  PlanarTensor out(c, h, w);
  for (auto [dy, dx] : offsets) {
    const int y0 = std::max(0, -dy);
    const int y1 = std::min(h, h - dy);
    const int x0 = std::max(0, -dx);
    const int x1 = std::min(w, w - dx);
    for (int ch = 0; ch < c; ++ch) {
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          out.at(ch, y, x) += t.at(ch, y + dy, x + dx);
        }
      }
    }
  }
  return out;
}

double max_abs(const PlanarTensor& t) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(t[i]));
  return m;
}

double max_abs_diff(const PlanarTensor& a, const PlanarTensor& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

double l2_norm(const PlanarTensor& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += t[i] * t[i];
  return std::sqrt(s);
}

bool all_finite(const PlanarTensor& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) return false;
  }
  return true;
}

void require_finite(const PlanarTensor& t, const char* what) {
  if (!all_finite(t)) {
    throw std::invalid_argument(std::string(what) +
                                ": tensor contains NaN or Inf");
  }
}

}  // namespace wavehide
