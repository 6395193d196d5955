#include "wavehide/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "wavehide/dct.hpp"
#include "wavehide/wavelet.hpp"

namespace wavehide::ad {

namespace {

thread_local bool g_grad_enabled = true;

bool any_requires(const std::vector<Var>& parents) {
  for (const Var& p : parents) {
    if (p->requires_grad) return true;
  }
  return false;
}

bool is_scalar(const Var& v) { return v->value.size() == 1; }

double total(const PlanarTensor& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += t[i];
  return s;
}

void check_binary_shapes(const Var& a, const Var& b, const char* op) {
  if (!a->value.same_shape(b->value) && !is_scalar(a) && !is_scalar(b)) {
    throw std::invalid_argument(std::string(op) +
                                ": shape mismatch without scalar operand");
  }
}

}  // namespace

void Node::accumulate(const PlanarTensor& g) {
  PlanarTensor& buf = ensure_grad();
  if (!buf.same_shape(g)) {
    throw std::invalid_argument("Node::accumulate: gradient shape mismatch");
  }
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += g[i];
}

PlanarTensor& Node::ensure_grad() {
  if (grad.empty()) {
    grad = PlanarTensor(value.channels(), value.height(), value.width());
  }
  return grad;
}

bool grad_enabled() { return g_grad_enabled; }

Var make_node(PlanarTensor value, std::vector<Var> parents,
              std::function<void(Node&)> backprop) {
  auto node = std::make_shared<Node>(std::move(value));
  if (g_grad_enabled && any_requires(parents)) {
    node->requires_grad = true;
    node->parents = std::move(parents);
    node->backprop = std::move(backprop);
  }
  return node;
}

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

Var constant(PlanarTensor v) { return std::make_shared<Node>(std::move(v)); }

Var parameter(PlanarTensor v) {
  auto node = std::make_shared<Node>(std::move(v));
  node->requires_grad = true;
  return node;
}

void backward(const Var& root) {
  if (root->value.size() != 1) {
    throw std::invalid_argument("backward: root must be a scalar node");
  }
  if (!root->requires_grad) return;

  // Post-order DFS along parent edges emits parents before children, so
  // the reverse is a topological order with every node visited after all
  // of its consumers.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->ensure_grad()[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backprop) {
      node->ensure_grad();
      node->backprop(*node);
    }
  }
}

Var add(const Var& a, const Var& b) {
  check_binary_shapes(a, b, "add");
  PlanarTensor out;
  if (a->value.same_shape(b->value)) {
    out = a->value;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b->value[i];
  } else if (is_scalar(a)) {
    out = b->value;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a->value[0];
  } else {
    out = a->value;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b->value[0];
  }
  return make_node(std::move(out), {a, b}, [a, b](Node& self) {
    if (a->requires_grad) {
      if (is_scalar(a) && self.grad.size() > 1) {
        a->ensure_grad()[0] += total(self.grad);
      } else {
        a->accumulate(self.grad);
      }
    }
    if (b->requires_grad) {
      if (is_scalar(b) && self.grad.size() > 1) {
        b->ensure_grad()[0] += total(self.grad);
      } else {
        b->accumulate(self.grad);
      }
    }
  });
}

Var sub(const Var& a, const Var& b) {
  check_binary_shapes(a, b, "sub");
  const PlanarTensor& av = a->value;
  const PlanarTensor& bv = b->value;
  PlanarTensor out = is_scalar(a) && !is_scalar(b) ? bv : av;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = av.size() == 1 ? av[0] : av[i];
    const double y = bv.size() == 1 ? bv[0] : bv[i];
    out[i] = x - y;
  }
  return make_node(std::move(out), {a, b}, [a, b](Node& self) {
    if (a->requires_grad) {
      if (is_scalar(a) && self.grad.size() > 1) {
        a->ensure_grad()[0] += total(self.grad);
      } else {
        a->accumulate(self.grad);
      }
    }
    if (b->requires_grad) {
      if (is_scalar(b) && self.grad.size() > 1) {
        b->ensure_grad()[0] -= total(self.grad);
      } else {
        PlanarTensor& gb = b->ensure_grad();
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= self.grad[i];
      }
    }
  });
}

Var mul(const Var& a, const Var& b) {
  check_binary_shapes(a, b, "mul");
  const PlanarTensor& av = a->value;
  const PlanarTensor& bv = b->value;
  PlanarTensor out = is_scalar(a) && !is_scalar(b) ? bv : av;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = av.size() == 1 ? av[0] : av[i];
    const double y = bv.size() == 1 ? bv[0] : bv[i];
    out[i] = x * y;
  }
  return make_node(std::move(out), {a, b}, [a, b](Node& self) {
    const PlanarTensor& av = a->value;
    const PlanarTensor& bv = b->value;
    if (a->requires_grad) {
      if (is_scalar(a) && self.grad.size() > 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          s += self.grad[i] * bv[i];
        }
        a->ensure_grad()[0] += s;
      } else {
        PlanarTensor& ga = a->ensure_grad();
        for (std::size_t i = 0; i < ga.size(); ++i) {
          ga[i] += self.grad[i] * (bv.size() == 1 ? bv[0] : bv[i]);
        }
      }
    }
    if (b->requires_grad) {
      if (is_scalar(b) && self.grad.size() > 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          s += self.grad[i] * av[i];
        }
        b->ensure_grad()[0] += s;
      } else {
        PlanarTensor& gb = b->ensure_grad();
        for (std::size_t i = 0; i < gb.size(); ++i) {
          gb[i] += self.grad[i] * (av.size() == 1 ? av[0] : av[i]);
        }
      }
    }
  });
}

Var div(const Var& a, const Var& b) {
  check_binary_shapes(a, b, "div");
  const PlanarTensor& av = a->value;
  const PlanarTensor& bv = b->value;
  PlanarTensor out = is_scalar(a) && !is_scalar(b) ? bv : av;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = av.size() == 1 ? av[0] : av[i];
    const double y = bv.size() == 1 ? bv[0] : bv[i];
    out[i] = x / y;
  }
  return make_node(std::move(out), {a, b}, [a, b](Node& self) {
    const PlanarTensor& av = a->value;
    const PlanarTensor& bv = b->value;
    if (a->requires_grad) {
      if (is_scalar(a) && self.grad.size() > 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          s += self.grad[i] / bv[i];
        }
        a->ensure_grad()[0] += s;
      } else {
        PlanarTensor& ga = a->ensure_grad();
        for (std::size_t i = 0; i < ga.size(); ++i) {
          ga[i] += self.grad[i] / (bv.size() == 1 ? bv[0] : bv[i]);
        }
      }
    }
    if (b->requires_grad) {
      if (is_scalar(b) && self.grad.size() > 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          const double y = bv[0];
          const double x = av.size() == 1 ? av[0] : av[i];
          s -= self.grad[i] * x / (y * y);
        }
        b->ensure_grad()[0] += s;
      } else {
        PlanarTensor& gb = b->ensure_grad();
        for (std::size_t i = 0; i < gb.size(); ++i) {
          const double y = bv[i];
          const double x = av.size() == 1 ? av[0] : av[i];
          gb[i] -= self.grad[i] * x / (y * y);
        }
      }
    }
  });
}

Var add_scalar(const Var& a, double s) {
  PlanarTensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s;
  return make_node(std::move(out), {a}, [a](Node& self) {
    a->accumulate(self.grad);
  });
}

Var mul_scalar(const Var& a, double s) {
  PlanarTensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
  return make_node(std::move(out), {a}, [a, s](Node& self) {
    PlanarTensor& ga = a->ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i] * s;
  });
}

Var sigmoid(const Var& a) {
  PlanarTensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = out[i];
    if (x >= 0.0) {
      out[i] = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      out[i] = e / (1.0 + e);
    }
  }
  return make_node(std::move(out), {a}, [a](Node& self) {
    PlanarTensor& ga = a->ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      const double s = self.value[i];
      ga[i] += self.grad[i] * s * (1.0 - s);
    }
  });
}

Var exp(const Var& a) {
  PlanarTensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(out[i]);
  return make_node(std::move(out), {a}, [a](Node& self) {
    PlanarTensor& ga = a->ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      ga[i] += self.grad[i] * self.value[i];
    }
  });
}

Var leaky_relu(const Var& a, double slope) {
  PlanarTensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) out[i] *= slope;
  }
  return make_node(std::move(out), {a}, [a, slope](Node& self) {
    PlanarTensor& ga = a->ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      ga[i] += self.grad[i] * (a->value[i] >= 0.0 ? 1.0 : slope);
    }
  });
}

Var sum(const Var& a) {
  PlanarTensor out(1, 1, 1);
  out[0] = total(a->value);
  return make_node(std::move(out), {a}, [a](Node& self) {
    const double g = self.grad[0];
    PlanarTensor& ga = a->ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
  });
}

Var mean(const Var& a) {
  const double n = static_cast<double>(a->value.size());
  PlanarTensor out(1, 1, 1);
  out[0] = total(a->value) / n;
  return make_node(std::move(out), {a}, [a, n](Node& self) {
    const double g = self.grad[0] / n;
    PlanarTensor& ga = a->ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
  });
}

Var concat_channels(const std::vector<Var>& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("concat_channels: no inputs");
  }
  const int h = parts[0]->value.height();
  const int w = parts[0]->value.width();
  int channels = 0;
  for (const Var& p : parts) {
    if (p->value.height() != h || p->value.width() != w) {
      throw std::invalid_argument("concat_channels: spatial size mismatch");
    }
    channels += p->value.channels();
  }
  PlanarTensor out(channels, h, w);
  std::size_t off = 0;
  for (const Var& p : parts) {
    for (std::size_t i = 0; i < p->value.size(); ++i) out[off + i] = p->value[i];
    off += p->value.size();
  }
  return make_node(std::move(out), parts, [parts](Node& self) {
    std::size_t off = 0;
    for (const Var& p : parts) {
      if (p->requires_grad) {
        PlanarTensor& gp = p->ensure_grad();
        for (std::size_t i = 0; i < gp.size(); ++i) {
          gp[i] += self.grad[off + i];
        }
      }
      off += p->value.size();
    }
  });
}

Var slice_channels(const Var& a, int begin, int end) {
  if (begin < 0 || end > a->value.channels() || begin >= end) {
    throw std::invalid_argument("slice_channels: bad channel range");
  }
  const int h = a->value.height();
  const int w = a->value.width();
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  PlanarTensor out(end - begin, h, w);
  const std::size_t off = begin * plane;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->value[off + i];
  return make_node(std::move(out), {a}, [a, off](Node& self) {
    PlanarTensor& ga = a->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      ga[off + i] += self.grad[i];
    }
  });
}

Var dwt(const Var& a) {
  return make_node(dwt_haar(a->value), {a}, [a](Node& self) {
    a->accumulate(iwt_haar(self.grad));
  });
}

Var iwt(const Var& a) {
  return make_node(iwt_haar(a->value), {a}, [a](Node& self) {
    a->accumulate(dwt_haar(self.grad));
  });
}

Var dct8(const Var& a) {
  return make_node(dct8x8_forward(a->value), {a}, [a](Node& self) {
    a->accumulate(dct8x8_inverse(self.grad));
  });
}

Var idct8(const Var& a) {
  return make_node(dct8x8_inverse(a->value), {a}, [a](Node& self) {
    a->accumulate(dct8x8_forward(self.grad));
  });
}

Var round_ste(const Var& a) {
  PlanarTensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::round(out[i]);
  return make_node(std::move(out), {a}, [a](Node& self) {
    a->accumulate(self.grad);
  });
}

Var clamp(const Var& a, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clamp: lo > hi");
  PlanarTensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < lo) out[i] = lo;
    if (out[i] > hi) out[i] = hi;
  }
  return make_node(std::move(out), {a}, [a, lo, hi](Node& self) {
    PlanarTensor& ga = a->ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      const double x = a->value[i];
      if (x >= lo && x <= hi) ga[i] += self.grad[i];
    }
  });
}

Var neighbor_sum(const Var& a,
                 const std::vector<std::pair<int, int>>& offsets) {
  return make_node(neighbor_sum_raw(a->value, offsets), {a},
                   [a, offsets](Node& self) {
                     std::vector<std::pair<int, int>> negated;
                     negated.reserve(offsets.size());
                     for (auto [dy, dx] : offsets) negated.emplace_back(-dy, -dx);
                     a->accumulate(neighbor_sum_raw(self.grad, negated));
                   });
}

Var pad_reflect(const Var& a, int pad_bottom, int pad_right) {
  const int c = a->value.channels();
  const int h = a->value.height();
  const int w = a->value.width();
  if (pad_bottom < 0 || pad_right < 0 || pad_bottom >= h || pad_right >= w) {
    throw std::invalid_argument("pad_reflect: padding out of range");
  }
  PlanarTensor out(c, h + pad_bottom, w + pad_right);
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h + pad_bottom; ++y) {
      const int sy = y < h ? y : 2 * h - 2 - y;
      for (int x = 0; x < w + pad_right; ++x) {
        const int sx = x < w ? x : 2 * w - 2 - x;
        out.at(ch, y, x) = a->value.at(ch, sy, sx);
      }
    }
  }
  return make_node(std::move(out), {a}, [a, h, w](Node& self) {
    PlanarTensor& ga = a->ensure_grad();
    for (int ch = 0; ch < self.grad.channels(); ++ch) {
      for (int y = 0; y < self.grad.height(); ++y) {
        const int sy = y < h ? y : 2 * h - 2 - y;
        for (int x = 0; x < self.grad.width(); ++x) {
          const int sx = x < w ? x : 2 * w - 2 - x;
          ga.at(ch, sy, sx) += self.grad.at(ch, y, x);
        }
      }
    }
  });
}

Var crop_spatial(const Var& a, int h, int w) {
  if (h <= 0 || w <= 0 || h > a->value.height() || w > a->value.width()) {
    throw std::invalid_argument("crop_spatial: bad target size");
  }
  const int c = a->value.channels();
  PlanarTensor out(c, h, w);
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.at(ch, y, x) = a->value.at(ch, y, x);
    }
  }
  return make_node(std::move(out), {a}, [a, h, w](Node& self) {
    PlanarTensor& ga = a->ensure_grad();
    for (int ch = 0; ch < self.grad.channels(); ++ch) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          ga.at(ch, y, x) += self.grad.at(ch, y, x);
        }
      }
    }
  });
}

}  // namespace wavehide::ad
