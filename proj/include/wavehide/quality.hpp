#ifndef WAVEHIDE_QUALITY_HPP
#define WAVEHIDE_QUALITY_HPP

#include "wavehide/autodiff.hpp"
#include "wavehide/tensor.hpp"

namespace wavehide {

struct LossWeights {
  double stego_mse = 50.0;
  double stego_ssim = 50.0;
  double recovery_mse = 1.0;
  double recovery_ssim = 1.0;
};

/// psnr_db is +infinity when mse is exactly 0; serialize as the string
/// "inf".
struct MetricReport {
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

double mse(const PlanarTensor& a, const PlanarTensor& b);
double psnr(const PlanarTensor& a, const PlanarTensor& b,
            double max_value = 1.0);

/// Global-statistics SSIM (one window spanning the whole channel), computed
/// per channel with population variance/covariance, averaged over channels.
/// Stabilizers: (0.01*max_value)^2 on the luminance term and
/// (0.03*max_value)^2 on the contrast term.
double ssim_global(const PlanarTensor& a, const PlanarTensor& b,
                   double max_value = 1.0);

MetricReport compare(const PlanarTensor& a, const PlanarTensor& b,
                     double max_value = 1.0);

/// Graph versions of the metrics used inside the training objective.
ad::Var mse_node(const ad::Var& a, const ad::Var& b);
ad::Var ssim_node(const ad::Var& a, const ad::Var& b, double max_value = 1.0);

/// Weighted sum of hiding and recovery fidelity:
///   w.stego_mse * MSE(stego, cover) + w.stego_ssim * (1 - SSIM(stego, cover))
/// + w.recovery_mse * MSE(recovery, secret)
/// + w.recovery_ssim * (1 - SSIM(recovery, secret)).
/// literal_mse3 swaps the third term for MSE(secret, cover), a constant with
/// no gradient; it exists for side-by-side comparison and is not the
/// default.
ad::Var total_loss(const ad::Var& cover, const ad::Var& stego,
                   const ad::Var& secret, const ad::Var& recovery,
                   const LossWeights& w, bool literal_mse3 = false);

}  // namespace wavehide

#endif
