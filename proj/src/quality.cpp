#include "wavehide/quality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wavehide {

double mse(const PlanarTensor& a, const PlanarTensor& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mse: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double psnr(const PlanarTensor& a, const PlanarTensor& b, double max_value) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / m);
}

namespace {

struct ChannelStats {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  double cov = 0.0;
};

ChannelStats channel_stats(const PlanarTensor& a, const PlanarTensor& b,
                           int ch) {
  const std::size_t plane =
      static_cast<std::size_t>(a.height()) * a.width();
  const double* pa = a.data() + ch * plane;
  const double* pb = b.data() + ch * plane;
  ChannelStats s;
  for (std::size_t i = 0; i < plane; ++i) {
    s.mean_a += pa[i];
    s.mean_b += pb[i];
  }
  s.mean_a /= static_cast<double>(plane);
  s.mean_b /= static_cast<double>(plane);
  for (std::size_t i = 0; i < plane; ++i) {
    const double da = pa[i] - s.mean_a;
    const double db = pb[i] - s.mean_b;
    s.var_a += da * da;
    s.var_b += db * db;
    s.cov += da * db;
  }
  s.var_a /= static_cast<double>(plane);
  s.var_b /= static_cast<double>(plane);
  s.cov /= static_cast<double>(plane);
  return s;
}

}  // namespace

double ssim_global(const PlanarTensor& a, const PlanarTensor& b,
                   double max_value) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("ssim_global: shape mismatch");
  }
  const double c1 = 0.01 * max_value * 0.01 * max_value;
  const double c2 = 0.03 * max_value * 0.03 * max_value;
  double acc = 0.0;
  for (int ch = 0; ch < a.channels(); ++ch) {
    const ChannelStats s = channel_stats(a, b, ch);
    const double num =
        (2.0 * s.mean_a * s.mean_b + c1) * (2.0 * s.cov + c2);
    const double den = (s.mean_a * s.mean_a + s.mean_b * s.mean_b + c1) *
                       (s.var_a + s.var_b + c2);
    acc += num / den;
  }
  return acc / a.channels();
}

MetricReport compare(const PlanarTensor& a, const PlanarTensor& b,
                     double max_value) {
  MetricReport r;
  r.mse = mse(a, b);
  r.psnr_db = psnr(a, b, max_value);
  r.ssim = ssim_global(a, b, max_value);
  return r;
}

ad::Var mse_node(const ad::Var& a, const ad::Var& b) {
  if (!a->value.same_shape(b->value)) {
    throw std::invalid_argument("mse_node: shape mismatch");
  }
  ad::Var d = ad::sub(a, b);
  return ad::mean(ad::mul(d, d));
}

ad::Var ssim_node(const ad::Var& a, const ad::Var& b, double max_value) {
  if (!a->value.same_shape(b->value)) {
    throw std::invalid_argument("ssim_node: shape mismatch");
  }
  const double c1 = 0.01 * max_value * 0.01 * max_value;
  const double c2 = 0.03 * max_value * 0.03 * max_value;
  const int channels = a->value.channels();
  ad::Var acc;
  for (int ch = 0; ch < channels; ++ch) {
    ad::Var x = ad::slice_channels(a, ch, ch + 1);
    ad::Var y = ad::slice_channels(b, ch, ch + 1);
    ad::Var mx = ad::mean(x);
    ad::Var my = ad::mean(y);
    ad::Var var_x = ad::sub(ad::mean(ad::mul(x, x)), ad::mul(mx, mx));
    ad::Var var_y = ad::sub(ad::mean(ad::mul(y, y)), ad::mul(my, my));
    ad::Var cov = ad::sub(ad::mean(ad::mul(x, y)), ad::mul(mx, my));
    ad::Var num =
        ad::mul(ad::add_scalar(ad::mul_scalar(ad::mul(mx, my), 2.0), c1),
                ad::add_scalar(ad::mul_scalar(cov, 2.0), c2));
    ad::Var den = ad::mul(
        ad::add_scalar(ad::add(ad::mul(mx, mx), ad::mul(my, my)), c1),
        ad::add_scalar(ad::add(var_x, var_y), c2));
    ad::Var term = ad::div(num, den);
    acc = acc ? ad::add(acc, term) : term;
  }
  return ad::mul_scalar(acc, 1.0 / channels);
}

ad::Var total_loss(const ad::Var& cover, const ad::Var& stego,
                   const ad::Var& secret, const ad::Var& recovery,
                   const LossWeights& w, bool literal_mse3) {
  ad::Var hide_mse = mse_node(stego, cover);
  ad::Var hide_ssim =
      ad::add_scalar(ad::mul_scalar(ssim_node(stego, cover), -1.0), 1.0);
  ad::Var rec_mse =
      literal_mse3 ? mse_node(secret, cover) : mse_node(recovery, secret);
  ad::Var rec_ssim = ad::add_scalar(
      ad::mul_scalar(ssim_node(recovery, secret), -1.0), 1.0);
  return ad::add(
      ad::add(ad::mul_scalar(hide_mse, w.stego_mse),
              ad::mul_scalar(hide_ssim, w.stego_ssim)),
      ad::add(ad::mul_scalar(rec_mse, w.recovery_mse),
              ad::mul_scalar(rec_ssim, w.recovery_ssim)));
}

}  // namespace wavehide
