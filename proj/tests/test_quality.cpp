#include <doctest.h>

#include <cmath>
#include <limits>

#include "wavehide/quality.hpp"

#include "helpers.hpp"

using namespace wavehide;
using testutil::random_tensor;

namespace {

// Plain-formula implementations, written independently of the library's
// loops (different accumulation structure on purpose).
double oracle_mse(const PlanarTensor& a, const PlanarTensor& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return acc / static_cast<double>(a.size());
}

double oracle_psnr(const PlanarTensor& a, const PlanarTensor& b) {
  const double m = oracle_mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

double oracle_ssim(const PlanarTensor& a, const PlanarTensor& b) {
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  const std::size_t per = static_cast<std::size_t>(a.height()) * a.width();
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      mx += a[c * per + i];
      my += b[c * per + i];
    }
    mx /= per;
    my /= per;
    double vx = 0.0, vy = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      vx += (a[c * per + i] - mx) * (a[c * per + i] - mx);
      vy += (b[c * per + i] - my) * (b[c * per + i] - my);
      cov += (a[c * per + i] - mx) * (b[c * per + i] - my);
    }
    vx /= per;
    vy /= per;
    cov /= per;
    total += ((2 * mx * my + c1) * (2 * cov + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return total / a.channels();
}

}  // namespace

TEST_CASE("metrics match direct-formula oracles") {
  for (int trial = 0; trial < 20; ++trial) {
    const PlanarTensor a = random_tensor(3, 6, 5, 800 + trial);
    const PlanarTensor b = random_tensor(3, 6, 5, 900 + trial);
    CHECK(testutil::rel_err(mse(a, b), oracle_mse(a, b)) < 1e-10);
    CHECK(testutil::rel_err(psnr(a, b), oracle_psnr(a, b)) < 1e-10);
    CHECK(testutil::rel_err(ssim_global(a, b), oracle_ssim(a, b)) < 1e-10);
  }
}

TEST_CASE("identical images hit the identity sentinels") {
  const PlanarTensor a = random_tensor(3, 4, 4, 801);
  CHECK(mse(a, a) == 0.0);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, a) > 0);
  CHECK(ssim_global(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  const MetricReport r = compare(a, a);
  CHECK(r.mse == 0.0);
  CHECK(std::isinf(r.psnr_db));
  CHECK(r.ssim == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("known distance: uniform offset of 0.1") {
  PlanarTensor a(1, 2, 2, 0.4);
  PlanarTensor b(1, 2, 2, 0.5);
  CHECK(mse(a, b) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("ssim is symmetric and bounded by 1 for matching signs") {
  const PlanarTensor a = random_tensor(3, 8, 8, 802);
  const PlanarTensor b = random_tensor(3, 8, 8, 803);
  CHECK(ssim_global(a, b) == doctest::Approx(ssim_global(b, a)).epsilon(1e-12));
  CHECK(ssim_global(a, b) < 1.0);
  CHECK(ssim_global(a, b) > -1.0);
}

TEST_CASE("graph metrics equal the detached ones") {
  const PlanarTensor a = random_tensor(3, 6, 6, 804);
  const PlanarTensor b = random_tensor(3, 6, 6, 805);
  ad::Var va = ad::constant(a);
  ad::Var vb = ad::constant(b);
  CHECK(mse_node(va, vb)->value[0] == doctest::Approx(mse(a, b)).epsilon(1e-14));
  CHECK(ssim_node(va, vb)->value[0] ==
        doctest::Approx(ssim_global(a, b)).epsilon(1e-12));
}

TEST_CASE("graph metrics are differentiable") {
  const PlanarTensor a = random_tensor(3, 4, 4, 806);
  const PlanarTensor b = random_tensor(3, 4, 4, 807);
  const ad::Var cb = ad::constant(b);
  CHECK(testutil::check_gradient(
            a, [&](const ad::Var& x) { return mse_node(x, cb); }, 810) < 1e-4);
  CHECK(testutil::check_gradient(
            a, [&](const ad::Var& x) { return ssim_node(x, cb); }, 811) < 1e-4);
}

TEST_CASE("total_loss combines the four weighted terms") {
  const PlanarTensor cover = random_tensor(3, 4, 4, 820);
  const PlanarTensor stego = random_tensor(3, 4, 4, 821);
  const PlanarTensor secret = random_tensor(3, 4, 4, 822);
  const PlanarTensor rec = random_tensor(3, 4, 4, 823);

  LossWeights w;
  w.stego_mse = 5.0;
  w.stego_ssim = 7.0;
  w.recovery_mse = 2.0;
  w.recovery_ssim = 3.0;

  const ad::Var loss =
      total_loss(ad::constant(cover), ad::constant(stego), ad::constant(secret),
                 ad::constant(rec), w);
  const double expected = 5.0 * mse(stego, cover) +
                          7.0 * (1.0 - ssim_global(stego, cover)) +
                          2.0 * mse(rec, secret) +
                          3.0 * (1.0 - ssim_global(rec, secret));
  CHECK(loss->value[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("the literal third-term variant scores secret against cover") {
  const PlanarTensor cover = random_tensor(3, 4, 4, 830);
  const PlanarTensor stego = random_tensor(3, 4, 4, 831);
  const PlanarTensor secret = random_tensor(3, 4, 4, 832);
  const PlanarTensor rec = random_tensor(3, 4, 4, 833);

  LossWeights w;
  const ad::Var loss = total_loss(ad::constant(cover), ad::constant(stego),
                                  ad::constant(secret), ad::constant(rec), w,
                                  /*literal_mse3=*/true);
  const double expected = w.stego_mse * mse(stego, cover) +
                          w.stego_ssim * (1.0 - ssim_global(stego, cover)) +
                          w.recovery_mse * mse(secret, cover) +
                          w.recovery_ssim * (1.0 - ssim_global(rec, secret));
  CHECK(loss->value[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("total_loss is differentiable end to end") {
  const PlanarTensor cover = random_tensor(3, 4, 4, 840);
  const PlanarTensor secret = random_tensor(3, 4, 4, 841);
  LossWeights w;

  // stego and recovery both depend on the probed tensor
  CHECK(testutil::check_gradient(
            random_tensor(3, 4, 4, 842),
            [&](const ad::Var& x) {
              return total_loss(ad::constant(cover), x, ad::constant(secret),
                                ad::mul_scalar(x, 0.5), w);
            },
            843) < 1e-4);
}
