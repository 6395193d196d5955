#include <cblas.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "wavehide/autodiff.hpp"

namespace wavehide::ad {

namespace {

// Column matrix for 3x3/pad-1/stride-1: row (i*3+ky)*3+kx holds input
// channel i shifted by (ky-1, kx-1), zero outside; column index is y*W+x.
// Matches the kernel's flat (out, in*9) layout so one GEMM computes all
// output channels. Fills the caller's scratch buffer: these matrices run
// to hundreds of megabytes at 224-pixel inputs, so reallocation (and the blanket
// zero fill it forces) would dominate the convolution itself. Only the
// border gaps are zeroed; the interior is overwritten by the copies.
void im2col3x3(const PlanarTensor& in, std::vector<double>& cols) {
  const int c = in.channels();
  const int h = in.height();
  const int w = in.width();
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  cols.resize(static_cast<std::size_t>(c) * 9 * hw);
  for (int i = 0; i < c; ++i) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const int dy = ky - 1;
        const int dx = kx - 1;
        double* row = cols.data() + ((i * 3 + ky) * 3 + kx) * hw;
        const int x0 = std::max(0, -dx);
        const int x1 = std::min(w, w - dx);
        for (int y = 0; y < h; ++y) {
          double* dst = row + static_cast<std::size_t>(y) * w;
          const int sy = y + dy;
          if (sy < 0 || sy >= h || x1 <= x0) {
            std::fill(dst, dst + w, 0.0);
            continue;
          }
          std::fill(dst, dst + x0, 0.0);
          std::memcpy(dst + x0,
                      in.data() +
                          (static_cast<std::size_t>(i) * h + sy) * w + x0 + dx,
                      static_cast<std::size_t>(x1 - x0) * sizeof(double));
          std::fill(dst + x1, dst + w, 0.0);
        }
      }
    }
  }
}

void col2im3x3(const std::vector<double>& cols, PlanarTensor& grad_in) {
  const int c = grad_in.channels();
  const int h = grad_in.height();
  const int w = grad_in.width();
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  for (int i = 0; i < c; ++i) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const int dy = ky - 1;
        const int dx = kx - 1;
        const double* row = cols.data() + ((i * 3 + ky) * 3 + kx) * hw;
        const int x0 = std::max(0, -dx);
        const int x1 = std::min(w, w - dx);
        if (x1 <= x0) continue;
        for (int y = 0; y < h; ++y) {
          const int sy = y + dy;
          if (sy < 0 || sy >= h) continue;
          const double* src = row + static_cast<std::size_t>(y) * w + x0;
          double* dst = &grad_in.at(i, sy, x0 + dx);
          for (int x = 0; x < x1 - x0; ++x) dst[x] += src[x];
        }
      }
    }
  }
}

}  // namespace

Var conv2d(const Var& input, const Var& kernel, const Var& bias) {
  const int in_ch = input->value.channels();
  const int h = input->value.height();
  const int w = input->value.width();
  if (kernel->value.height() != 3 || kernel->value.width() != 3) {
    throw std::invalid_argument("conv2d: kernel must be 3x3");
  }
  if (in_ch <= 0 || kernel->value.channels() % in_ch != 0) {
    throw std::invalid_argument("conv2d: kernel/input channel mismatch");
  }
  const int out_ch = kernel->value.channels() / in_ch;
  if (bias->value.channels() != out_ch || bias->value.height() != 1 ||
      bias->value.width() != 1) {
    throw std::invalid_argument("conv2d: bias must be (out_ch, 1, 1)");
  }

  const std::size_t hw = static_cast<std::size_t>(h) * w;
  const int k = in_ch * 9;
  thread_local std::vector<double> cols;
  im2col3x3(input->value, cols);
  PlanarTensor out(out_ch, h, w);
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, out_ch,
              static_cast<int>(hw), k, 1.0, kernel->value.data(), k,
              cols.data(), static_cast<int>(hw), 0.0, out.data(),
              static_cast<int>(hw));
  for (int o = 0; o < out_ch; ++o) {
    const double b = bias->value[o];
    double* plane = out.data() + o * hw;
    for (std::size_t i = 0; i < hw; ++i) plane[i] += b;
  }

  return make_node(
      std::move(out), {input, kernel, bias},
      [input, kernel, bias, out_ch, k, hw](Node& self) {
        const double* g = self.grad.data();
        if (bias->requires_grad) {
          PlanarTensor& gb = bias->ensure_grad();
          for (int o = 0; o < out_ch; ++o) {
            double s = 0.0;
            const double* plane = g + o * hw;
            for (std::size_t i = 0; i < hw; ++i) s += plane[i];
            gb[o] += s;
          }
        }
        if (!kernel->requires_grad && !input->requires_grad) return;
        // The column matrix is rebuilt here rather than captured: it is 9x
        // the input size and per-step graphs would otherwise hold one per
        // layer for the whole backward pass.
        thread_local std::vector<double> cols;
        im2col3x3(input->value, cols);
        if (kernel->requires_grad) {
          PlanarTensor& gk = kernel->ensure_grad();
          cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, out_ch, k,
                      static_cast<int>(hw), 1.0, g, static_cast<int>(hw),
                      cols.data(), static_cast<int>(hw), 1.0, gk.data(), k);
        }
        if (input->requires_grad) {
          // Every element is written by the GEMM (beta = 0), so the scratch
          // needs no clearing.
          thread_local std::vector<double> gcols;
          gcols.resize(cols.size());
          cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, k,
                      static_cast<int>(hw), out_ch, 1.0,
                      kernel->value.data(), k, g, static_cast<int>(hw), 0.0,
                      gcols.data(), static_cast<int>(hw));
          col2im3x3(gcols, input->ensure_grad());
        }
      });
}

}  // namespace wavehide::ad
