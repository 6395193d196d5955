#ifndef WAVEHIDE_TESTS_HELPERS_HPP
#define WAVEHIDE_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "wavehide/autodiff.hpp"
#include "wavehide/rng.hpp"
#include "wavehide/tensor.hpp"

namespace testutil {

inline wavehide::PlanarTensor random_tensor(int c, int h, int w,
                                            std::uint64_t seed,
                                            double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng = wavehide::make_engine(seed, 0, 0, 0);
  std::uniform_real_distribution<double> u(lo, hi);
  wavehide::PlanarTensor t(c, h, w);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
  return t;
}

/// Band-limited content with mild texture; looks like a photograph to a
/// codec, unlike white noise.
inline wavehide::PlanarTensor smooth_image(int h, int w, std::uint64_t seed,
                                           double texture = 0.08) {
  std::mt19937_64 rng = wavehide::make_engine(seed, 1, 0, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p1 = u(rng) * 6.28318530717958648;
  const double p2 = u(rng) * 6.28318530717958648;
  wavehide::PlanarTensor t(3, h, w);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double v = 0.5 + 0.3 * std::sin(p1 + 0.13 * x + 0.07 * y + c) +
                   0.15 * std::cos(p2 + 0.31 * x - 0.17 * y) +
                   texture * (u(rng) - 0.5);
        t.at(c, y, x) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return t;
}

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
  return std::abs(a - b) / scale;
}

/// Central finite differences against the recorded gradient.
///
/// The op's output is weighted by a fixed random tensor before the reducing
/// sum, so the check sees the full Jacobian action rather than just row
/// sums (a transposed or permuted adjoint would still pass an unweighted
/// sum). Returns the worst relative error over every input element.
inline double check_gradient(
    const wavehide::PlanarTensor& x0,
    const std::function<wavehide::ad::Var(const wavehide::ad::Var&)>& op,
    std::uint64_t weight_seed, double h = 1e-5) {
  namespace ad = wavehide::ad;

  ad::Var x = ad::parameter(x0);
  ad::Var y = op(x);
  const wavehide::PlanarTensor weights =
      random_tensor(y->value.channels(), y->value.height(), y->value.width(),
                    weight_seed, -1.0, 1.0);

  ad::Var loss = ad::sum(ad::mul(y, ad::constant(weights)));
  ad::backward(loss);
  const wavehide::PlanarTensor analytic =
      x->grad.size() ? x->grad : wavehide::PlanarTensor(
                                     x0.channels(), x0.height(), x0.width());

  const auto eval = [&](const wavehide::PlanarTensor& in) {
    ad::NoGradGuard ng;
    ad::Var out = op(ad::constant(in));
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += out->value[i] * weights[i];
    }
    return acc;
  };

  double worst = 0.0;
  wavehide::PlanarTensor probe = x0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = eval(probe);
    probe[i] = saved - h;
    const double down = eval(probe);
    probe[i] = saved;
    worst = std::max(worst, rel_err(analytic[i], (up - down) / (2.0 * h)));
  }
  return worst;
}

/// Direct zero-padded 3x3 convolution; the independent route against the
/// GEMM-backed implementation. Kernel rows are (out_channel*in_channels +
/// in_channel).
inline wavehide::PlanarTensor brute_conv3x3(const wavehide::PlanarTensor& in,
                                            const wavehide::PlanarTensor& kernel,
                                            const wavehide::PlanarTensor& bias) {
  const int in_ch = in.channels();
  const int out_ch = kernel.channels() / in_ch;
  wavehide::PlanarTensor out(out_ch, in.height(), in.width());
  for (int o = 0; o < out_ch; ++o) {
    for (int y = 0; y < in.height(); ++y) {
      for (int x = 0; x < in.width(); ++x) {
        double acc = bias.at(o, 0, 0);
        for (int i = 0; i < in_ch; ++i) {
          for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
              const int sy = y + ky - 1;
              const int sx = x + kx - 1;
              if (sy < 0 || sy >= in.height() || sx < 0 || sx >= in.width()) {
                continue;
              }
              acc += kernel.at(o * in_ch + i, ky, kx) * in.at(i, sy, sx);
            }
          }
        }
        out.at(o, y, x) = acc;
      }
    }
  }
  return out;
}

/// Fresh empty directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / ("wavehide_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace testutil

#endif
