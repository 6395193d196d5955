#ifndef WAVEHIDE_AUTODIFF_HPP
#define WAVEHIDE_AUTODIFF_HPP

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "wavehide/tensor.hpp"

namespace wavehide::ad {

/// Reverse-mode automatic differentiation over PlanarTensor.
///
/// Every operation returns a new graph node holding its forward value, the
/// parent links and a closure that propagates this node's adjoint to the
/// parents. backward() replays the recorded graph in reverse topological
/// order, visiting each node exactly once. Recording is skipped entirely
/// while a NoGradGuard is alive or when no input requires gradients, so the
/// same code path serves both training and inference.

class Node;
using Var = std::shared_ptr<Node>;

class Node {
 public:
  explicit Node(PlanarTensor v) : value(std::move(v)) {}

  PlanarTensor value;
  PlanarTensor grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<Var> parents;
  std::function<void(Node&)> backprop;

  /// grad[i] += g[i], allocating a zero grad buffer on first use.
  void accumulate(const PlanarTensor& g);
  /// Returns the grad buffer, allocating zeros if absent.
  PlanarTensor& ensure_grad();
};

bool grad_enabled();

/// Disables graph recording for its lifetime (current thread).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

/// Builds an operation node. Records parents and the adjoint closure only
/// when recording is enabled and some parent requires gradients; otherwise
/// the result is a detached value and the closure is dropped. All primitives
/// are built on this.
Var make_node(PlanarTensor value, std::vector<Var> parents,
              std::function<void(Node&)> backprop);

/// Leaf that never receives a gradient.
Var constant(PlanarTensor v);
/// Trainable leaf: gradients accumulate into node->grad across backward
/// calls until explicitly zeroed.
Var parameter(PlanarTensor v);

/// Propagates d(root)/d(leaf) into every reachable leaf's grad buffer.
/// root must hold a single element (scalar).
void backward(const Var& root);

// Elementwise arithmetic. Binary ops accept equal shapes, or a single-element
// (1x1x1) operand on either side which broadcasts against the other.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var add_scalar(const Var& a, double s);
Var mul_scalar(const Var& a, double s);

Var sigmoid(const Var& a);
Var exp(const Var& a);
Var leaky_relu(const Var& a, double slope);

// Reductions to a 1x1x1 scalar node.
Var sum(const Var& a);
Var mean(const Var& a);

Var concat_channels(const std::vector<Var>& parts);
Var slice_channels(const Var& a, int begin, int end);

/// 3x3 convolution, padding 1, stride 1. kernel is (out_ch*in_ch, 3, 3)
/// laid out as out-major rows of a (out_ch, in_ch*9) matrix; bias is
/// (out_ch, 1, 1). Output is (out_ch, H, W).
Var conv2d(const Var& input, const Var& kernel, const Var& bias);

/// Orthonormal single-level 2-D Haar analysis/synthesis (see wavelet.hpp).
/// Adjoints use the transpose = inverse property.
Var dwt(const Var& a);
Var iwt(const Var& a);

/// Orthonormal 8x8 blockwise 2-D DCT-II and its inverse (see dct.hpp).
/// H and W must be multiples of 8.
Var dct8(const Var& a);
Var idct8(const Var& a);

/// Rounds in the forward pass; the gradient passes through unchanged.
Var round_ste(const Var& a);

/// Clamps values to [lo, hi]; gradient is zero where the input fell outside.
Var clamp(const Var& a, double lo, double hi);

/// out(c,y,x) = sum of a(c, y+dy, x+dx) over the given (dy,dx) offsets that
/// land in bounds, accumulated in offset order. The adjoint is the same sum
/// over negated offsets.
Var neighbor_sum(const Var& a, const std::vector<std::pair<int, int>>& offsets);

/// Mirror-pads the bottom/right edges (reflection about the last row/column,
/// not repeating it). Requires pad_bottom < H and pad_right < W.
Var pad_reflect(const Var& a, int pad_bottom, int pad_right);

/// Keeps the top-left h x w region.
Var crop_spatial(const Var& a, int h, int w);

}  // namespace wavehide::ad

#endif
