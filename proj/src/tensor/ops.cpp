// src/tensor/ops.cpp

// Copyright 2026 The emoser Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "emoser/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "emoser/tensor/conv_kernels.hpp"

namespace emoser::tensor {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

template <typename T>
bool wants_grad(const Node<T>* n) {
  return n->requires_grad;
}

// (outer, channels, inner) view of a tensor with channel axis 1.
struct ChannelView {
  std::size_t outer, channels, inner;
};

template <typename T>
ChannelView channel_view(const Tensor<T>& x) {
  require(x.rank() >= 2, "expected a tensor with a channel axis, got " + shape_str(x.shape()));
  ChannelView v{static_cast<std::size_t>(x.dim(0)), static_cast<std::size_t>(x.dim(1)), 1};
  for (std::size_t i = 2; i < x.rank(); ++i) v.inner *= static_cast<std::size_t>(x.dim(i));
  return v;
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Conv2dParams& p) {
  require(x.rank() == 4 && weight.rank() == 4, "conv2d: expected NCHW input and OIHW weight");
  require(x.dim(1) == weight.dim(1),
          "conv2d: input channels " + std::to_string(x.dim(1)) + " != weight channels " +
              std::to_string(weight.dim(1)));
  kernels::ConvGeometry g;
  g.batch = x.dim(0);
  g.in_channels = x.dim(1);
  g.in_h = x.dim(2);
  g.in_w = x.dim(3);
  g.out_channels = weight.dim(0);
  g.kernel_h = weight.dim(2);
  g.kernel_w = weight.dim(3);
  g.stride_h = p.stride_h;
  g.stride_w = p.stride_w;
  g.pad_h = p.pad_h;
  g.pad_w = p.pad_w;
  require(p.stride_h > 0 && p.stride_w > 0 && p.pad_h >= 0 && p.pad_w >= 0,
          "conv2d: bad stride/padding");
  require(g.in_h + 2 * g.pad_h >= g.kernel_h && g.in_w + 2 * g.pad_w >= g.kernel_w,
          "conv2d: kernel larger than padded input " + shape_str(x.shape()));

  std::vector<T> out(std::size_t(g.batch) * g.output_size());
  kernels::conv2d_forward(g, x.data().data(), weight.data().data(), out.data());

  auto* xn = &x.node();
  auto* wn = &weight.node();
  return Tensor<T>::make_result(
      {g.batch, g.out_channels, g.out_h(), g.out_w()}, std::move(out), {&x, &weight},
      [g, xn, wn](Node<T>& self) {
        T* dx = wants_grad(xn) ? xn->ensure_grad().data() : nullptr;
        T* dw = wants_grad(wn) ? wn->ensure_grad().data() : nullptr;
        kernels::conv2d_backward(g, xn->value.data(), wn->value.data(), self.grad.data(), dx, dw);
      });
}

template <typename T>
Tensor<T> max_pool2d(const Tensor<T>& x, const Pool2dParams& p) {
  require(x.rank() == 4, "max_pool2d: expected NCHW input");
  require(p.kernel > 0 && p.stride > 0 && p.pad >= 0 && p.pad < p.kernel, "max_pool2d: bad params");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int oh = (h + 2 * p.pad - p.kernel) / p.stride + 1;
  const int ow = (w + 2 * p.pad - p.kernel) / p.stride + 1;
  require(oh >= 1 && ow >= 1, "max_pool2d: input too small " + shape_str(x.shape()));

  std::vector<T> out(std::size_t(n) * c * oh * ow);
  std::vector<std::size_t> argmax(out.size());
  const T* xv = x.data().data();
  for (std::size_t plane = 0; plane < std::size_t(n) * c; ++plane) {
    const T* src = xv + plane * h * w;
    for (int i = 0; i < oh; ++i) {
      for (int j = 0; j < ow; ++j) {
        T best = -std::numeric_limits<T>::infinity();
        std::size_t best_idx = 0;
        bool found = false;
        for (int ki = 0; ki < p.kernel; ++ki) {
          const int y = i * p.stride - p.pad + ki;
          if (y < 0 || y >= h) continue;
          for (int kj = 0; kj < p.kernel; ++kj) {
            const int xx = j * p.stride - p.pad + kj;
            if (xx < 0 || xx >= w) continue;
            const T v = src[std::size_t(y) * w + xx];
            if (!found || v > best) {
              found = true;
              best = v;
              best_idx = plane * h * w + std::size_t(y) * w + xx;
            }
          }
        }
        const std::size_t o = (plane * oh + i) * ow + j;
        out[o] = best;
        argmax[o] = best_idx;
      }
    }
  }
  auto* xn = &x.node();
  return Tensor<T>::make_result({n, c, oh, ow}, std::move(out), {&x},
                                [xn, argmax = std::move(argmax)](Node<T>& self) {
                                  auto& dx = xn->ensure_grad();
                                  for (std::size_t o = 0; o < argmax.size(); ++o) {
                                    dx[argmax[o]] += self.grad[o];
                                  }
                                });
}

template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                     std::vector<T>& running_mean, std::vector<T>& running_var,
                     const BatchNormOptions& opt) {
  const ChannelView v = channel_view(x);
  require(gamma.numel() == v.channels && beta.numel() == v.channels &&
              running_mean.size() == v.channels && running_var.size() == v.channels,
          "batch_norm: parameter size does not match channel count " + std::to_string(v.channels));
  const std::size_t m = v.outer * v.inner;
  require(m > 0, "batch_norm: empty input");
  const T* xv = x.data().data();
  const T* gv = gamma.data().data();
  const T* bv = beta.data().data();

  std::vector<T> mean(v.channels), inv_std(v.channels);
  if (opt.training) {
    for (std::size_t c = 0; c < v.channels; ++c) {
      double s = 0.0;
      for (std::size_t o = 0; o < v.outer; ++o) {
        const T* p = xv + (o * v.channels + c) * v.inner;
        for (std::size_t i = 0; i < v.inner; ++i) s += p[i];
      }
      const double mu = s / static_cast<double>(m);
      double ss = 0.0;
      for (std::size_t o = 0; o < v.outer; ++o) {
        const T* p = xv + (o * v.channels + c) * v.inner;
        for (std::size_t i = 0; i < v.inner; ++i) {
          const double d = p[i] - mu;
          ss += d * d;
        }
      }
      const double var = ss / static_cast<double>(m);
      mean[c] = static_cast<T>(mu);
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(var + opt.eps));
      const double unbiased = m > 1 ? ss / static_cast<double>(m - 1) : var;
      running_mean[c] = static_cast<T>((1.0 - opt.momentum) * running_mean[c] + opt.momentum * mu);
      running_var[c] =
          static_cast<T>((1.0 - opt.momentum) * running_var[c] + opt.momentum * unbiased);
    }
  } else {
    for (std::size_t c = 0; c < v.channels; ++c) {
      mean[c] = running_mean[c];
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(running_var[c]) + opt.eps));
    }
  }

  std::vector<T> out(x.numel());
  std::vector<T> xhat(x.numel());
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t c = 0; c < v.channels; ++c) {
      const std::size_t base = (o * v.channels + c) * v.inner;
      for (std::size_t i = 0; i < v.inner; ++i) {
        const T h = (xv[base + i] - mean[c]) * inv_std[c];
        xhat[base + i] = h;
        out[base + i] = gv[c] * h + bv[c];
      }
    }
  }

  auto* xn = &x.node();
  auto* gn = &gamma.node();
  auto* bn = &beta.node();
  const bool training = opt.training;
  return Tensor<T>::make_result(
      x.shape(), std::move(out), {&x, &gamma, &beta},
      [v, m, training, xn, gn, bn, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node<T>& self) {
        const T* dy = self.grad.data();
        std::vector<double> sum_dy(v.channels, 0.0), sum_dy_xhat(v.channels, 0.0);
        for (std::size_t o = 0; o < v.outer; ++o) {
          for (std::size_t c = 0; c < v.channels; ++c) {
            const std::size_t base = (o * v.channels + c) * v.inner;
            for (std::size_t i = 0; i < v.inner; ++i) {
              sum_dy[c] += dy[base + i];
              sum_dy_xhat[c] += static_cast<double>(dy[base + i]) * xhat[base + i];
            }
          }
        }
        if (wants_grad(gn)) {
          auto& dg = gn->ensure_grad();
          for (std::size_t c = 0; c < v.channels; ++c) dg[c] += static_cast<T>(sum_dy_xhat[c]);
        }
        if (wants_grad(bn)) {
          auto& db = bn->ensure_grad();
          for (std::size_t c = 0; c < v.channels; ++c) db[c] += static_cast<T>(sum_dy[c]);
        }
        if (!wants_grad(xn)) return;
        auto& dx = xn->ensure_grad();
        const T* g = gn->value.data();
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::size_t o = 0; o < v.outer; ++o) {
          for (std::size_t c = 0; c < v.channels; ++c) {
            const std::size_t base = (o * v.channels + c) * v.inner;
            const double scale = static_cast<double>(g[c]) * inv_std[c];
            for (std::size_t i = 0; i < v.inner; ++i) {
              if (training) {
                dx[base + i] += static_cast<T>(
                    scale * (dy[base + i] - inv_m * sum_dy[c] - xhat[base + i] * inv_m * sum_dy_xhat[c]));
              } else {
                dx[base + i] += static_cast<T>(scale * dy[base + i]);
              }
            }
          }
        }
      });
}

template <typename T>
Tensor<T> prelu(const Tensor<T>& x, const Tensor<T>& slope) {
  const ChannelView v = channel_view(x);
  require(slope.numel() == v.channels, "prelu: slope count must equal channel count");
  const T* xv = x.data().data();
  const T* a = slope.data().data();
  std::vector<T> out(x.numel());
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t c = 0; c < v.channels; ++c) {
      const std::size_t base = (o * v.channels + c) * v.inner;
      for (std::size_t i = 0; i < v.inner; ++i) {
        const T xi = xv[base + i];
        out[base + i] = xi > T(0) ? xi : a[c] * xi;
      }
    }
  }
  auto* xn = &x.node();
  auto* an = &slope.node();
  return Tensor<T>::make_result(x.shape(), std::move(out), {&x, &slope}, [v, xn, an](Node<T>& self) {
    const T* dy = self.grad.data();
    const T* xv = xn->value.data();
    const T* a = an->value.data();
    T* dx = wants_grad(xn) ? xn->ensure_grad().data() : nullptr;
    T* da = wants_grad(an) ? an->ensure_grad().data() : nullptr;
    for (std::size_t c = 0; c < v.channels; ++c) {
      double acc = 0.0;
      for (std::size_t o = 0; o < v.outer; ++o) {
        const std::size_t base = (o * v.channels + c) * v.inner;
        for (std::size_t i = 0; i < v.inner; ++i) {
          const T xi = xv[base + i];
          if (xi > T(0)) {
            if (dx) dx[base + i] += dy[base + i];
          } else {
            if (dx) dx[base + i] += a[c] * dy[base + i];
            acc += static_cast<double>(dy[base + i]) * xi;
          }
        }
      }
      if (da) da[c] += static_cast<T>(acc);
    }
  });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(),
          "add: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  std::vector<T> out(a.numel());
  const T* av = a.data().data();
  const T* bv = b.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  auto* an = &a.node();
  auto* bn = &b.node();
  return Tensor<T>::make_result(a.shape(), std::move(out), {&a, &b}, [an, bn](Node<T>& self) {
    for (Node<T>* p : {an, bn}) {
      if (!wants_grad(p)) continue;
      auto& d = p->ensure_grad();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  require(x.rank() == 2 && weight.rank() == 2 && bias.rank() == 1, "linear: bad ranks");
  const int n = x.dim(0), in = x.dim(1), out_dim = weight.dim(0);
  require(weight.dim(1) == in && bias.dim(0) == out_dim,
          "linear: weight " + shape_str(weight.shape()) + " incompatible with input " +
              shape_str(x.shape()));
  const T* xv = x.data().data();
  const T* w = weight.data().data();
  const T* b = bias.data().data();
  std::vector<T> out(std::size_t(n) * out_dim);
  for (int r = 0; r < n; ++r) {
    for (int o = 0; o < out_dim; ++o) {
      T acc = b[o];
      const T* wr = w + std::size_t(o) * in;
      const T* xr = xv + std::size_t(r) * in;
      for (int i = 0; i < in; ++i) acc += wr[i] * xr[i];
      out[std::size_t(r) * out_dim + o] = acc;
    }
  }
  auto* xn = &x.node();
  auto* wn = &weight.node();
  auto* bn = &bias.node();
  return Tensor<T>::make_result(
      {n, out_dim}, std::move(out), {&x, &weight, &bias}, [n, in, out_dim, xn, wn, bn](Node<T>& self) {
        const T* dy = self.grad.data();
        if (wants_grad(xn)) {
          auto& dx = xn->ensure_grad();
          const T* w = wn->value.data();
          for (int r = 0; r < n; ++r)
            for (int o = 0; o < out_dim; ++o) {
              const T g = dy[std::size_t(r) * out_dim + o];
              const T* wr = w + std::size_t(o) * in;
              T* dxr = dx.data() + std::size_t(r) * in;
              for (int i = 0; i < in; ++i) dxr[i] += g * wr[i];
            }
        }
        if (wants_grad(wn)) {
          auto& dw = wn->ensure_grad();
          const T* xv = xn->value.data();
          for (int r = 0; r < n; ++r)
            for (int o = 0; o < out_dim; ++o) {
              const T g = dy[std::size_t(r) * out_dim + o];
              const T* xr = xv + std::size_t(r) * in;
              T* dwr = dw.data() + std::size_t(o) * in;
              for (int i = 0; i < in; ++i) dwr[i] += g * xr[i];
            }
        }
        if (wants_grad(bn)) {
          auto& db = bn->ensure_grad();
          for (int r = 0; r < n; ++r)
            for (int o = 0; o < out_dim; ++o) db[o] += dy[std::size_t(r) * out_dim + o];
        }
      });
}

template <typename T>
Tensor<T> mean_over_axis(const Tensor<T>& x, int axis) {
  require(axis >= 0 && static_cast<std::size_t>(axis) < x.rank(), "mean_over_axis: bad axis");
  std::size_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= x.dim(i);
  for (std::size_t i = axis + 1; i < x.rank(); ++i) inner *= x.dim(i);
  const std::size_t len = x.dim(axis);
  require(len > 0, "mean_over_axis: empty axis");
  Shape shape = x.shape();
  shape.erase(shape.begin() + axis);
  const T* xv = x.data().data();
  std::vector<T> out(outer * inner, T(0));
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < len; ++k) s += xv[(o * len + k) * inner + i];
      out[o * inner + i] = static_cast<T>(s / static_cast<double>(len));
    }
  }
  auto* xn = &x.node();
  return Tensor<T>::make_result(std::move(shape), std::move(out), {&x},
                                [outer, inner, len, xn](Node<T>& self) {
                                  auto& dx = xn->ensure_grad();
                                  const T scale = T(1) / static_cast<T>(len);
                                  for (std::size_t o = 0; o < outer; ++o)
                                    for (std::size_t k = 0; k < len; ++k)
                                      for (std::size_t i = 0; i < inner; ++i)
                                        dx[(o * len + k) * inner + i] += self.grad[o * inner + i] * scale;
                                });
}

template <typename T>
Tensor<T> mean_std_over_time(const Tensor<T>& x, double eps_std) {
  require(x.rank() == 3, "mean_std_over_time: expected N x C x T, got " + shape_str(x.shape()));
  const int n = x.dim(0), c = x.dim(1), t = x.dim(2);
  require(t >= 1, "mean_std_over_time: T must be >= 1");
  const T* xv = x.data().data();
  std::vector<T> out(std::size_t(n) * 2 * c);
  std::vector<double> means(std::size_t(n) * c), stds(std::size_t(n) * c);
  for (int r = 0; r < n; ++r) {
    for (int ch = 0; ch < c; ++ch) {
      const T* p = xv + (std::size_t(r) * c + ch) * t;
      double sum = 0.0;
      for (int k = 0; k < t; ++k) sum += p[k];
      const double mean = sum / t;
      double ss = 0.0;
      for (int k = 0; k < t; ++k) {
        const double d = p[k] - mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / t + eps_std);
      means[std::size_t(r) * c + ch] = mean;
      stds[std::size_t(r) * c + ch] = sd;
      out[std::size_t(r) * 2 * c + ch] = static_cast<T>(mean);
      out[std::size_t(r) * 2 * c + c + ch] = static_cast<T>(sd);
    }
  }
  auto* xn = &x.node();
  return Tensor<T>::make_result(
      {n, 2 * c}, std::move(out), {&x},
      [n, c, t, xn, means = std::move(means), stds = std::move(stds)](Node<T>& self) {
        auto& dx = xn->ensure_grad();
        const T* xv = xn->value.data();
        for (int r = 0; r < n; ++r) {
          for (int ch = 0; ch < c; ++ch) {
            const double dmean = self.grad[std::size_t(r) * 2 * c + ch];
            const double dstd = self.grad[std::size_t(r) * 2 * c + c + ch];
            const double mean = means[std::size_t(r) * c + ch];
            const double coef = dstd / (t * stds[std::size_t(r) * c + ch]);
            const std::size_t base = (std::size_t(r) * c + ch) * t;
            for (int k = 0; k < t; ++k) {
              dx[base + k] += static_cast<T>(dmean / t + coef * (xv[base + k] - mean));
            }
          }
        }
      });
}

template <typename T>
Tensor<T> mean_over_time(const Tensor<T>& x) {
  require(x.rank() == 3, "mean_over_time: expected N x C x T, got " + shape_str(x.shape()));
  return mean_over_axis(x, 2);
}

template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels) {
  require(logits.rank() == 2, "softmax_cross_entropy: expected N x K logits");
  const int n = logits.dim(0), k = logits.dim(1);
  require(static_cast<int>(labels.size()) == n, "softmax_cross_entropy: label count != batch size");
  require(n > 0 && k > 0, "softmax_cross_entropy: empty logits");
  for (int label : labels) {
    if (label < 0 || label >= k) {
      throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(label) +
                              " outside [0, " + std::to_string(k) + ")");
    }
  }
  const T* z = logits.data().data();
  std::vector<T> probs(std::size_t(n) * k);
  double loss = 0.0;
  for (int r = 0; r < n; ++r) {
    const T* zr = z + std::size_t(r) * k;
    const double mx = *std::max_element(zr, zr + k);
    double denom = 0.0;
    for (int j = 0; j < k; ++j) denom += std::exp(zr[j] - mx);
    const double log_denom = std::log(denom);
    for (int j = 0; j < k; ++j) {
      probs[std::size_t(r) * k + j] = static_cast<T>(std::exp(zr[j] - mx - log_denom));
    }
    loss += -(zr[labels[r]] - mx - log_denom);
  }
  loss /= n;
  auto* zn = &logits.node();
  std::vector<int> lab(labels.begin(), labels.end());
  return Tensor<T>::make_result(
      {1}, {static_cast<T>(loss)}, {&logits},
      [n, k, zn, probs = std::move(probs), lab = std::move(lab)](Node<T>& self) {
        auto& dz = zn->ensure_grad();
        const double scale = static_cast<double>(self.grad[0]) / n;
        for (int r = 0; r < n; ++r) {
          for (int j = 0; j < k; ++j) {
            const double target = (j == lab[r]) ? 1.0 : 0.0;
            dz[std::size_t(r) * k + j] += static_cast<T>(scale * (probs[std::size_t(r) * k + j] - target));
          }
        }
      });
}

#define EMOSER_INSTANTIATE_OPS(T)                                                              \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Conv2dParams&);          \
  template Tensor<T> max_pool2d(const Tensor<T>&, const Pool2dParams&);                        \
  template Tensor<T> batch_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,          \
                                std::vector<T>&, std::vector<T>&, const BatchNormOptions&);    \
  template Tensor<T> prelu(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                  \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> mean_over_axis(const Tensor<T>&, int);                                    \
  template Tensor<T> mean_std_over_time(const Tensor<T>&, double);                             \
  template Tensor<T> mean_over_time(const Tensor<T>&);                                         \
  template Tensor<T> softmax_cross_entropy(const Tensor<T>&, std::span<const int>);

EMOSER_INSTANTIATE_OPS(float)
EMOSER_INSTANTIATE_OPS(double)

#undef EMOSER_INSTANTIATE_OPS

}  // namespace emoser::tensor
