#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "accent/errors.hpp"
#include "accent/rng.hpp"
#include "accent/tensor.hpp"

namespace accent::nn {

enum class LayerKind { kConv2d, kDense };

// Weights + bias of one layer. Conv weights are [out_c, in_c, kh, kw] with
// bias [out_c]; dense weights are [out_features, in_features] with bias
// [out_features]. Velocity buffers back the momentum update in sgd_step.
template <typename T>
struct LayerParams {
  Tensor<T> weights;
  Tensor<T> bias;
  LayerKind kind = LayerKind::kDense;
  std::vector<T> w_velocity;
  std::vector<T> b_velocity;

  void alloc_grad() {
    weights.alloc_grad();
    bias.alloc_grad();
  }
};

// Kaiming-uniform init for ReLU stacks: U(-b, b) with b = sqrt(6 / fan_in).
// Draws happen in double so the stream is scalar-type independent.
template <typename T>
void kaiming_uniform(Tensor<T>& t, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (auto& v : t.data) v = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
LayerParams<T> make_conv2d(std::size_t out_c, std::size_t in_c, std::size_t kh,
                           std::size_t kw, Rng& rng) {
  LayerParams<T> p;
  p.kind = LayerKind::kConv2d;
  p.weights = Tensor<T>({out_c, in_c, kh, kw});
  p.bias = Tensor<T>({out_c});
  kaiming_uniform(p.weights, in_c * kh * kw, rng);
  p.alloc_grad();
  return p;
}

template <typename T>
LayerParams<T> make_dense(std::size_t out_f, std::size_t in_f, Rng& rng) {
  LayerParams<T> p;
  p.kind = LayerKind::kDense;
  p.weights = Tensor<T>({out_f, in_f});
  p.bias = Tensor<T>({out_f});
  kaiming_uniform(p.weights, in_f, rng);
  p.alloc_grad();
  return p;
}

namespace detail {

// c[M][N] += a[M][K] * b[K][N]
template <typename T>
void matmul_accum(const T* a, const T* b, T* c, std::size_t M, std::size_t K,
                  std::size_t N) {
  for (std::size_t m = 0; m < M; ++m) {
    T* crow = c + m * N;
    const T* arow = a + m * K;
    for (std::size_t k = 0; k < K; ++k) {
      const T av = arow[k];
      const T* brow = b + k * N;
      for (std::size_t n = 0; n < N; ++n) crow[n] += av * brow[n];
    }
  }
}

// c[M][N] += a[M][K] * b[N][K]^T
template <typename T>
void matmul_abt_accum(const T* a, const T* b, T* c, std::size_t M, std::size_t K,
                      std::size_t N) {
  for (std::size_t m = 0; m < M; ++m) {
    const T* arow = a + m * K;
    for (std::size_t n = 0; n < N; ++n) {
      const T* brow = b + n * K;
      T acc = 0;
      for (std::size_t k = 0; k < K; ++k) acc += arow[k] * brow[k];
      c[m * N + n] += acc;
    }
  }
}

// c[K][N] += a[M][K]^T * b[M][N]
template <typename T>
void matmul_atb_accum(const T* a, const T* b, T* c, std::size_t M, std::size_t K,
                      std::size_t N) {
  for (std::size_t m = 0; m < M; ++m) {
    const T* arow = a + m * K;
    const T* brow = b + m * N;
    for (std::size_t k = 0; k < K; ++k) {
      const T av = arow[k];
      T* crow = c + k * N;
      for (std::size_t n = 0; n < N; ++n) crow[n] += av * brow[n];
    }
  }
}

// Unrolls conv patches into a [in_c*kh*kw][out_h*out_w] matrix.
template <typename T>
void im2col(const Tensor<T>& x, std::size_t kh, std::size_t kw, std::size_t stride,
            std::size_t pad, std::size_t out_h, std::size_t out_w, std::vector<T>& cols) {
  const std::size_t in_c = x.shape[0], H = x.shape[1], W = x.shape[2];
  cols.assign(in_c * kh * kw * out_h * out_w, T(0));
  std::size_t row = 0;
  for (std::size_t c = 0; c < in_c; ++c) {
    for (std::size_t i = 0; i < kh; ++i) {
      for (std::size_t j = 0; j < kw; ++j, ++row) {
        T* dst = cols.data() + row * out_h * out_w;
        for (std::size_t oh = 0; oh < out_h; ++oh) {
          const long ih = static_cast<long>(oh * stride + i) - static_cast<long>(pad);
          if (ih < 0 || ih >= static_cast<long>(H)) {
            dst += out_w;
            continue;
          }
          const T* src = x.data.data() + (c * H + static_cast<std::size_t>(ih)) * W;
          for (std::size_t ow = 0; ow < out_w; ++ow) {
            const long iw = static_cast<long>(ow * stride + j) - static_cast<long>(pad);
            *dst++ = (iw >= 0 && iw < static_cast<long>(W))
                         ? src[static_cast<std::size_t>(iw)]
                         : T(0);
          }
        }
      }
    }
  }
}

// Scatter-adds a column matrix back into image layout (inverse of im2col).
template <typename T>
void col2im_accum(const std::vector<T>& cols, std::size_t in_c, std::size_t H,
                  std::size_t W, std::size_t kh, std::size_t kw, std::size_t stride,
                  std::size_t pad, std::size_t out_h, std::size_t out_w, Tensor<T>& x) {
  std::size_t row = 0;
  for (std::size_t c = 0; c < in_c; ++c) {
    for (std::size_t i = 0; i < kh; ++i) {
      for (std::size_t j = 0; j < kw; ++j, ++row) {
        const T* src = cols.data() + row * out_h * out_w;
        for (std::size_t oh = 0; oh < out_h; ++oh) {
          const long ih = static_cast<long>(oh * stride + i) - static_cast<long>(pad);
          if (ih < 0 || ih >= static_cast<long>(H)) {
            src += out_w;
            continue;
          }
          T* dst = x.data.data() + (c * H + static_cast<std::size_t>(ih)) * W;
          for (std::size_t ow = 0; ow < out_w; ++ow) {
            const long iw = static_cast<long>(ow * stride + j) - static_cast<long>(pad);
            if (iw >= 0 && iw < static_cast<long>(W))
              dst[static_cast<std::size_t>(iw)] += *src;
            ++src;
          }
        }
      }
    }
  }
}

inline std::size_t conv_out_dim(std::size_t in, std::size_t k, std::size_t stride,
                                std::size_t pad, const char* what) {
  const long num = static_cast<long>(in) + 2 * static_cast<long>(pad) -
                   static_cast<long>(k);
  if (num < 0 || num % static_cast<long>(stride) != 0)
    throw ShapeMismatch(std::string("conv2d: invalid ") + what + " geometry");
  return static_cast<std::size_t>(num) / stride + 1;
}

}  // namespace detail

// Cross-correlation plus per-output-channel bias. Input [C,H,W], weights
// [OC,C,kh,kw] -> output [OC,OH,OW]. Implemented as im2col + matmul.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& input, const LayerParams<T>& params,
                         std::size_t stride = 1, std::size_t padding = 0) {
  if (input.shape.size() != 3) throw ShapeMismatch("conv2d: input must be [C,H,W]");
  if (params.weights.shape.size() != 4)
    throw ShapeMismatch("conv2d: weights must be [OC,C,kh,kw]");
  const std::size_t in_c = input.shape[0];
  if (params.weights.shape[1] != in_c)
    throw ShapeMismatch("conv2d: input channels " + std::to_string(in_c) +
                        " != weight channels " + std::to_string(params.weights.shape[1]));
  const std::size_t out_c = params.weights.shape[0];
  const std::size_t kh = params.weights.shape[2], kw = params.weights.shape[3];
  const std::size_t out_h = detail::conv_out_dim(input.shape[1], kh, stride, padding, "height");
  const std::size_t out_w = detail::conv_out_dim(input.shape[2], kw, stride, padding, "width");

  std::vector<T> cols;
  detail::im2col(input, kh, kw, stride, padding, out_h, out_w, cols);

  Tensor<T> out({out_c, out_h, out_w});
  detail::matmul_accum(params.weights.data.data(), cols.data(), out.data.data(),
                       out_c, in_c * kh * kw, out_h * out_w);
  for (std::size_t oc = 0; oc < out_c; ++oc) {
    const T b = params.bias.data[oc];
    T* dst = out.data.data() + oc * out_h * out_w;
    for (std::size_t i = 0; i < out_h * out_w; ++i) dst[i] += b;
  }
  return out;
}

template <typename T>
struct Conv2dGrads {
  Tensor<T> input;
  Tensor<T> weights;
  Tensor<T> bias;
};

// Analytic gradients of conv2d_forward with respect to input, weights, bias.
template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                               const LayerParams<T>& params, std::size_t stride = 1,
                               std::size_t padding = 0) {
  const std::size_t in_c = input.shape[0], H = input.shape[1], W = input.shape[2];
  const std::size_t out_c = params.weights.shape[0];
  const std::size_t kh = params.weights.shape[2], kw = params.weights.shape[3];
  const std::size_t out_h = detail::conv_out_dim(H, kh, stride, padding, "height");
  const std::size_t out_w = detail::conv_out_dim(W, kw, stride, padding, "width");
  if (grad_out.shape != std::vector<std::size_t>{out_c, out_h, out_w})
    throw ShapeMismatch("conv2d_backward: grad_out shape " + grad_out.shape_str() +
                        " does not match forward output");

  Conv2dGrads<T> g;
  g.input = Tensor<T>({in_c, H, W});
  g.weights = Tensor<T>(params.weights.shape);
  g.bias = Tensor<T>(params.bias.shape);

  const std::size_t ohw = out_h * out_w;
  for (std::size_t oc = 0; oc < out_c; ++oc) {
    T acc = 0;
    const T* src = grad_out.data.data() + oc * ohw;
    for (std::size_t i = 0; i < ohw; ++i) acc += src[i];
    g.bias.data[oc] = acc;
  }

  std::vector<T> cols;
  detail::im2col(input, kh, kw, stride, padding, out_h, out_w, cols);
  // dW = dY [OC][OHW] x cols^T [OHW][CKK]
  detail::matmul_abt_accum(grad_out.data.data(), cols.data(), g.weights.data.data(),
                           out_c, ohw, in_c * kh * kw);
  // dcols = W^T [CKK][OC] x dY [OC][OHW]
  std::vector<T> dcols(in_c * kh * kw * ohw, T(0));
  detail::matmul_atb_accum(params.weights.data.data(), grad_out.data.data(),
                           dcols.data(), out_c, in_c * kh * kw, ohw);
  detail::col2im_accum(dcols, in_c, H, W, kh, kw, stride, padding, out_h, out_w,
                       g.input);
  return g;
}

// Elementwise max(0, x). The subgradient at exactly zero is taken as zero.
template <typename T>
Tensor<T> relu(const Tensor<T>& input) {
  Tensor<T> out(input.shape);
  for (std::size_t i = 0; i < input.data.size(); ++i)
    out.data[i] = input.data[i] > T(0) ? input.data[i] : T(0);
  return out;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& grad_out, const Tensor<T>& input) {
  if (!grad_out.same_shape(input))
    throw ShapeMismatch("relu_backward: shape mismatch");
  Tensor<T> g(input.shape);
  for (std::size_t i = 0; i < input.data.size(); ++i)
    g.data[i] = input.data[i] > T(0) ? grad_out.data[i] : T(0);
  return g;
}

template <typename T>
struct Maxpool2Result {
  Tensor<T> output;
  std::vector<std::size_t> argmax;  // flat input index per output cell
};

// Non-overlapping 2x2 max pooling. Ties break toward the lowest flat index,
// which keeps the backward pass deterministic.
template <typename T>
Maxpool2Result<T> maxpool2(const Tensor<T>& input) {
  if (input.shape.size() != 3) throw ShapeMismatch("maxpool2: input must be [C,H,W]");
  const std::size_t C = input.shape[0], H = input.shape[1], W = input.shape[2];
  if (H % 2 != 0 || W % 2 != 0)
    throw OddSpatialDims("maxpool2: spatial dims must be even, got " +
                         std::to_string(H) + "x" + std::to_string(W));
  Maxpool2Result<T> res;
  res.output = Tensor<T>({C, H / 2, W / 2});
  res.argmax.resize(res.output.numel());
  std::size_t o = 0;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t h = 0; h < H; h += 2) {
      for (std::size_t w = 0; w < W; w += 2, ++o) {
        const std::size_t base = (c * H + h) * W + w;
        const std::size_t idx[4] = {base, base + 1, base + W, base + W + 1};
        std::size_t best = idx[0];
        T best_v = input.data[idx[0]];
        for (int k = 1; k < 4; ++k) {
          if (input.data[idx[k]] > best_v) {
            best_v = input.data[idx[k]];
            best = idx[k];
          }
        }
        res.output.data[o] = best_v;
        res.argmax[o] = best;
      }
    }
  }
  return res;
}

template <typename T>
Tensor<T> maxpool2_backward(const Tensor<T>& grad_out,
                            const std::vector<std::size_t>& argmax,
                            const std::vector<std::size_t>& input_shape) {
  if (grad_out.numel() != argmax.size())
    throw ShapeMismatch("maxpool2_backward: grad/argmax mismatch");
  Tensor<T> g(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i)
    g.data[argmax[i]] += grad_out.data[i];
  return g;
}

// y = W x + b for a flat input [n] -> [m].
template <typename T>
Tensor<T> dense_forward(const Tensor<T>& input, const LayerParams<T>& params) {
  const std::size_t in_f = params.weights.shape[1];
  const std::size_t out_f = params.weights.shape[0];
  if (input.numel() != in_f)
    throw ShapeMismatch("dense: input length " + std::to_string(input.numel()) +
                        " != in_features " + std::to_string(in_f));
  Tensor<T> out({out_f});
  for (std::size_t m = 0; m < out_f; ++m) {
    const T* w = params.weights.data.data() + m * in_f;
    T acc = params.bias.data[m];
    for (std::size_t k = 0; k < in_f; ++k) acc += w[k] * input.data[k];
    out.data[m] = acc;
  }
  return out;
}

template <typename T>
struct DenseGrads {
  Tensor<T> input;
  Tensor<T> weights;
  Tensor<T> bias;
};

// Backward of dense_forward: (W^T g, g outer x, g).
template <typename T>
DenseGrads<T> dense_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                             const LayerParams<T>& params) {
  const std::size_t in_f = params.weights.shape[1];
  const std::size_t out_f = params.weights.shape[0];
  if (grad_out.numel() != out_f)
    throw ShapeMismatch("dense_backward: grad_out length mismatch");
  DenseGrads<T> g;
  g.input = Tensor<T>({in_f});
  g.weights = Tensor<T>(params.weights.shape);
  g.bias = Tensor<T>(params.bias.shape);
  for (std::size_t m = 0; m < out_f; ++m) {
    const T gm = grad_out.data[m];
    g.bias.data[m] = gm;
    const T* w = params.weights.data.data() + m * in_f;
    T* gw = g.weights.data.data() + m * in_f;
    for (std::size_t k = 0; k < in_f; ++k) {
      gw[k] = gm * input.data[k];
      g.input.data[k] += gm * w[k];
    }
  }
  return g;
}

template <typename T>
struct SoftmaxCeResult {
  T loss = 0;
  Tensor<T> grad_logits;
  std::vector<T> probs;
};

// Stabilized softmax + cross entropy: loss = -log p[label],
// grad = p - onehot(label).
template <typename T>
SoftmaxCeResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::size_t label) {
  const std::size_t C = logits.numel();
  if (label >= C)
    throw LabelOutOfRange("softmax_cross_entropy: label " + std::to_string(label) +
                          " out of range for " + std::to_string(C) + " classes");
  SoftmaxCeResult<T> res;
  res.probs.resize(C);
  res.grad_logits = Tensor<T>({C});
  T max_logit = logits.data[0];
  for (std::size_t i = 1; i < C; ++i) max_logit = std::max(max_logit, logits.data[i]);
  T denom = 0;
  for (std::size_t i = 0; i < C; ++i) {
    res.probs[i] = std::exp(logits.data[i] - max_logit);
    denom += res.probs[i];
  }
  for (std::size_t i = 0; i < C; ++i) res.probs[i] /= denom;
  res.loss = -std::log(std::max(res.probs[label], std::numeric_limits<T>::min()));
  for (std::size_t i = 0; i < C; ++i)
    res.grad_logits.data[i] = res.probs[i] - (i == label ? T(1) : T(0));
  return res;
}

// Momentum SGD: v <- momentum*v - lr*grad; w <- w + v. Gradients are zeroed
// afterward so batch accumulation can restart.
template <typename T>
void sgd_step(LayerParams<T>& params, double lr, double momentum) {
  if (momentum < 0.0 || momentum >= 1.0)
    throw InvalidConfig("sgd_step: momentum must be in [0, 1)");
  auto update = [&](Tensor<T>& t, std::vector<T>& vel) {
    if (vel.size() != t.data.size()) vel.assign(t.data.size(), T(0));
    t.alloc_grad();
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      vel[i] = static_cast<T>(momentum) * vel[i] - static_cast<T>(lr) * t.grad[i];
      t.data[i] += vel[i];
    }
    t.zero_grad();
  };
  update(params.weights, params.w_velocity);
  update(params.bias, params.b_velocity);
}

template <typename T>
void sgd_step(std::vector<LayerParams<T>*>& params, double lr, double momentum) {
  for (auto* p : params) sgd_step(*p, lr, momentum);
}

// ---------------------------------------------------------------------------
// Gradient checking: central finite differences against analytic gradients.
// Relative error per coordinate is |a - n| / max(|a|, |n|, 1e-8).

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
  return std::fabs(analytic - numeric) / denom;
}

// Checks analytic[i] against the central difference of loss_fn with respect
// to values[i] for every coordinate; returns the max relative error.
inline double gradient_check(std::vector<double>& values,
                             const std::vector<double>& analytic,
                             const std::function<double()>& loss_fn, double eps) {
  if (eps <= 0.0) throw InvalidConfig("gradient_check: eps must be > 0");
  if (values.size() != analytic.size())
    throw ShapeMismatch("gradient_check: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double orig = values[i];
    values[i] = orig + eps;
    const double up = loss_fn();
    values[i] = orig - eps;
    const double down = loss_fn();
    values[i] = orig;
    const double numeric = (up - down) / (2.0 * eps);
    worst = std::max(worst, relative_error(analytic[i], numeric));
  }
  return worst;
}

namespace check {

// Each routine builds one random instance of a layer, computes analytic
// gradients of the scalar probe loss L = sum(output * R) for a fixed random
// cotangent R, and compares every input/parameter coordinate against
// central differences. Returns the max relative error of the instance.

inline double conv2d(Rng& rng, double eps = 1e-5) {
  const std::size_t in_c = 1 + rng.below(2), H = 4, W = 4;
  const std::size_t out_c = 1 + rng.below(3), k = 1 + rng.below(2) * 2;  // 1 or 3
  const std::size_t pad = k / 2;
  LayerParams<double> p = make_conv2d<double>(out_c, in_c, k, k, rng);
  Tensor<double> x({in_c, H, W});
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);

  Tensor<double> cotangent;
  {
    Tensor<double> y = conv2d_forward(x, p, 1, pad);
    cotangent = Tensor<double>(y.shape);
    for (auto& v : cotangent.data) v = rng.uniform(-1.0, 1.0);
  }
  auto loss = [&]() {
    Tensor<double> y = conv2d_forward(x, p, 1, pad);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.data.size(); ++i) acc += y.data[i] * cotangent.data[i];
    return acc;
  };
  Conv2dGrads<double> g = conv2d_backward(cotangent, x, p, 1, pad);
  double worst = gradient_check(x.data, g.input.data, loss, eps);
  worst = std::max(worst, gradient_check(p.weights.data, g.weights.data, loss, eps));
  worst = std::max(worst, gradient_check(p.bias.data, g.bias.data, loss, eps));
  return worst;
}

inline double dense(Rng& rng, double eps = 1e-5) {
  const std::size_t in_f = 3 + rng.below(8), out_f = 2 + rng.below(6);
  LayerParams<double> p = make_dense<double>(out_f, in_f, rng);
  Tensor<double> x({in_f});
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
  Tensor<double> cot({out_f});
  for (auto& v : cot.data) v = rng.uniform(-1.0, 1.0);

  auto loss = [&]() {
    Tensor<double> y = dense_forward(x, p);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.data.size(); ++i) acc += y.data[i] * cot.data[i];
    return acc;
  };
  DenseGrads<double> g = dense_backward(cot, x, p);
  double worst = gradient_check(x.data, g.input.data, loss, eps);
  worst = std::max(worst, gradient_check(p.weights.data, g.weights.data, loss, eps));
  worst = std::max(worst, gradient_check(p.bias.data, g.bias.data, loss, eps));
  return worst;
}

inline double relu_away_from_zero(Rng& rng, double eps = 1e-5) {
  Tensor<double> x({16});
  for (auto& v : x.data) {
    do {
      v = rng.uniform(-1.0, 1.0);
    } while (std::fabs(v) <= 1e-3);  // stay clear of the kink
  }
  Tensor<double> cot(x.shape);
  for (auto& v : cot.data) v = rng.uniform(-1.0, 1.0);
  auto loss = [&]() {
    Tensor<double> y = relu(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.data.size(); ++i) acc += y.data[i] * cot.data[i];
    return acc;
  };
  Tensor<double> g = relu_backward(cot, x);
  return gradient_check(x.data, g.data, loss, eps);
}

inline double maxpool_away_from_ties(Rng& rng, double eps = 1e-5) {
  const std::size_t C = 1 + rng.below(2);
  Tensor<double> x({C, 4, 4});
  // Regenerate any window whose top two values are close enough for the
  // finite-difference probe to cross the tie.
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t h = 0; h < 4; h += 2) {
      for (std::size_t w = 0; w < 4; w += 2) {
        for (;;) {
          double vals[4] = {x.at3(c, h, w), x.at3(c, h, w + 1), x.at3(c, h + 1, w),
                            x.at3(c, h + 1, w + 1)};
          std::sort(vals, vals + 4);
          if (vals[3] - vals[2] > 1e-3) break;
          x.at3(c, h, w) = rng.uniform(-1.0, 1.0);
          x.at3(c, h, w + 1) = rng.uniform(-1.0, 1.0);
          x.at3(c, h + 1, w) = rng.uniform(-1.0, 1.0);
          x.at3(c, h + 1, w + 1) = rng.uniform(-1.0, 1.0);
        }
      }
    }
  }
  Tensor<double> cot({C, 2, 2});
  for (auto& v : cot.data) v = rng.uniform(-1.0, 1.0);
  auto loss = [&]() {
    auto res = maxpool2(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < res.output.data.size(); ++i)
      acc += res.output.data[i] * cot.data[i];
    return acc;
  };
  auto res = maxpool2(x);
  Tensor<double> g = maxpool2_backward(cot, res.argmax, x.shape);
  return gradient_check(x.data, g.data, loss, eps);
}

inline double softmax_ce(Rng& rng, double eps = 1e-5) {
  const std::size_t C = 2 + rng.below(6);
  const std::size_t label = rng.below(C);
  Tensor<double> logits({C});
  for (auto& v : logits.data) v = rng.uniform(-2.0, 2.0);
  auto loss = [&]() { return softmax_cross_entropy(logits, label).loss; };
  auto res = softmax_cross_entropy(logits, label);
  return gradient_check(logits.data, res.grad_logits.data, loss, eps);
}

}  // namespace check

}  // namespace accent::nn
