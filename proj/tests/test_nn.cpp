#include <doctest.h>

#include <cmath>
#include <vector>

#include "accent/nn.hpp"
#include "accent/rng.hpp"
#include "accent/tensor.hpp"

using namespace accent;
using namespace accent::nn;

TEST_CASE("conv2d scalar kernel doubles the input") {
  Tensor<double> x({1, 3, 3});
  x.data.assign(9, 1.0);
  LayerParams<double> p;
  p.kind = LayerKind::kConv2d;
  p.weights = Tensor<double>({1, 1, 1, 1}, {2.0});
  p.bias = Tensor<double>({1}, {0.0});
  const Tensor<double> y = conv2d_forward(x, p, 1, 0);
  REQUIRE(y.shape == std::vector<std::size_t>{1, 3, 3});
  for (double v : y.data) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("conv2d 2x2 ones kernel sums windows") {
  Tensor<double> x({1, 3, 3});
  for (std::size_t i = 0; i < 9; ++i) x.data[i] = static_cast<double>(i + 1);
  LayerParams<double> p;
  p.kind = LayerKind::kConv2d;
  p.weights = Tensor<double>({1, 1, 2, 2}, {1.0, 1.0, 1.0, 1.0});
  p.bias = Tensor<double>({1}, {0.0});
  const Tensor<double> y = conv2d_forward(x, p, 1, 0);
  REQUIRE(y.shape == std::vector<std::size_t>{1, 2, 2});
  CHECK(y.data[0] == doctest::Approx(12.0));
  CHECK(y.data[1] == doctest::Approx(16.0));
  CHECK(y.data[2] == doctest::Approx(24.0));
  CHECK(y.data[3] == doctest::Approx(28.0));
}

TEST_CASE("conv2d zero kernel with bias yields constant bias") {
  Tensor<double> x({2, 4, 4});
  Rng rng(1);
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
  LayerParams<double> p;
  p.kind = LayerKind::kConv2d;
  p.weights = Tensor<double>({3, 2, 3, 3});
  p.bias = Tensor<double>({3}, {0.5, -1.0, 2.0});
  const Tensor<double> y = conv2d_forward(x, p, 1, 1);
  for (std::size_t oc = 0; oc < 3; ++oc)
    for (std::size_t i = 0; i < 16; ++i)
      CHECK(y.data[oc * 16 + i] == doctest::Approx(p.bias.data[oc]));
}

TEST_CASE("conv2d channel mismatch throws") {
  Tensor<double> x({2, 4, 4});
  LayerParams<double> p;
  p.weights = Tensor<double>({1, 3, 3, 3});
  p.bias = Tensor<double>({1});
  CHECK_THROWS_AS(conv2d_forward(x, p, 1, 1), ShapeMismatch);
}

TEST_CASE("conv2d backward zero and scalar cases") {
  Tensor<double> x({1, 2, 2});
  x.data = {1.0, 2.0, 3.0, 4.0};
  LayerParams<double> p;
  p.kind = LayerKind::kConv2d;
  p.weights = Tensor<double>({1, 1, 1, 1}, {3.0});
  p.bias = Tensor<double>({1}, {0.0});

  Tensor<double> zero_grad({1, 2, 2});
  const auto gz = conv2d_backward(zero_grad, x, p, 1, 0);
  for (double v : gz.input.data) CHECK(v == 0.0);
  for (double v : gz.weights.data) CHECK(v == 0.0);
  for (double v : gz.bias.data) CHECK(v == 0.0);

  // 1x1x1 case: dW = g*x, dx = g*w
  Tensor<double> x1({1, 1, 1}, {5.0});
  Tensor<double> g1({1, 1, 1}, {2.0});
  const auto g = conv2d_backward(g1, x1, p, 1, 0);
  CHECK(g.weights.data[0] == doctest::Approx(2.0 * 5.0));
  CHECK(g.input.data[0] == doctest::Approx(2.0 * 3.0));
  CHECK(g.bias.data[0] == doctest::Approx(2.0));
}

TEST_CASE("relu forward and backward") {
  Tensor<double> x({3}, {-1.0, 0.0, 2.0});
  const Tensor<double> y = relu(x);
  CHECK(y.data == std::vector<double>{0.0, 0.0, 2.0});

  Tensor<double> x2({2}, {-1.0, 2.0});
  Tensor<double> g({2}, {5.0, 5.0});
  const Tensor<double> gx = relu_backward(g, x2);
  CHECK(gx.data == std::vector<double>{0.0, 5.0});
}

TEST_CASE("maxpool2 basic, tie rule, odd dims") {
  Tensor<double> x({1, 2, 2}, {1.0, 2.0, 3.0, 4.0});
  const auto res = maxpool2(x);
  REQUIRE(res.output.shape == std::vector<std::size_t>{1, 1, 1});
  CHECK(res.output.data[0] == 4.0);

  Tensor<double> flat({1, 2, 2}, {7.0, 7.0, 7.0, 7.0});
  const auto tie = maxpool2(flat);
  CHECK(tie.argmax[0] == 0);  // lowest flat index wins
  Tensor<double> g({1, 1, 1}, {3.0});
  const Tensor<double> gx = maxpool2_backward(g, tie.argmax, flat.shape);
  CHECK(gx.data == std::vector<double>{3.0, 0.0, 0.0, 0.0});

  Tensor<double> odd({1, 3, 3});
  CHECK_THROWS_AS(maxpool2(odd), OddSpatialDims);
}

TEST_CASE("dense forward examples") {
  LayerParams<double> id;
  id.weights = Tensor<double>({2, 2}, {1.0, 0.0, 0.0, 1.0});
  id.bias = Tensor<double>({2});
  Tensor<double> x({2}, {3.0, -4.0});
  CHECK(dense_forward(x, id).data == x.data);

  LayerParams<double> p;
  p.weights = Tensor<double>({1, 2}, {1.0, 2.0});
  p.bias = Tensor<double>({1}, {3.0});
  Tensor<double> x2({2}, {4.0, 5.0});
  CHECK(dense_forward(x2, p).data[0] == doctest::Approx(17.0));
}

TEST_CASE("softmax_cross_entropy uniform, stabilized, label checks") {
  Tensor<double> zeros({5});
  const auto res = softmax_cross_entropy(zeros, 2);
  CHECK(res.loss == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(res.probs[i] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(res.grad_logits.data[i] ==
          doctest::Approx(0.2 - (i == 2 ? 1.0 : 0.0)).epsilon(1e-12));
  }

  Tensor<double> extreme({2}, {1000.0, 0.0});
  const auto stable = softmax_cross_entropy(extreme, 0);
  CHECK(std::isfinite(stable.loss));
  CHECK(stable.loss == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_AS(softmax_cross_entropy(zeros, 5), LabelOutOfRange);
}

TEST_CASE("softmax probabilities form a simplex") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor<double> logits({4});
    for (auto& v : logits.data) v = rng.uniform(-30.0, 30.0);
    const auto res = softmax_cross_entropy(logits, 1);
    double sum = 0.0;
    for (double p : res.probs) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
      sum += p;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("sgd_step plain, momentum unroll, zero grads") {
  LayerParams<double> p;
  p.weights = Tensor<double>({1}, {1.0});
  p.bias = Tensor<double>({1}, {0.0});
  p.alloc_grad();
  p.weights.grad[0] = 0.5;
  sgd_step(p, 0.1, 0.0);
  CHECK(p.weights.data[0] == doctest::Approx(0.95));
  CHECK(p.weights.grad[0] == 0.0);  // zeroed afterward

  // two momentum steps on constant grad g: total delta = -lr*g*(1 + 1.9)
  LayerParams<double> q;
  q.weights = Tensor<double>({1}, {0.0});
  q.bias = Tensor<double>({1});
  q.alloc_grad();
  const double g = 0.5, lr = 0.01;
  q.weights.grad[0] = g;
  sgd_step(q, lr, 0.9);
  q.weights.grad[0] = g;
  sgd_step(q, lr, 0.9);
  CHECK(q.weights.data[0] == doctest::Approx(-lr * g * (1.0 + 1.9)).epsilon(1e-12));

  // zero grads: params unchanged, velocity decays
  LayerParams<double> r;
  r.weights = Tensor<double>({1}, {2.0});
  r.bias = Tensor<double>({1});
  r.alloc_grad();
  r.weights.grad[0] = 1.0;
  sgd_step(r, 0.1, 0.5);  // v = -0.1, w = 1.9
  sgd_step(r, 0.1, 0.5);  // grad 0: v = -0.05, w = 1.85
  CHECK(r.weights.data[0] == doctest::Approx(1.85));
}

TEST_CASE("one sgd step decreases a quadratic objective") {
  // f(w) = 0.5 * w^2, grad = w
  LayerParams<double> p;
  p.weights = Tensor<double>({1}, {1.0});
  p.bias = Tensor<double>({1});
  p.alloc_grad();
  const double before = 0.5 * p.weights.data[0] * p.weights.data[0];
  p.weights.grad[0] = p.weights.data[0];
  sgd_step(p, 1e-3, 0.0);
  const double after = 0.5 * p.weights.data[0] * p.weights.data[0];
  CHECK(after < before);
}

TEST_CASE("gradient checks per layer meet criterion tolerances") {
  Rng rng(101);
  for (int i = 0; i < 20; ++i) CHECK(check::conv2d(rng) < 1e-4);
  for (int i = 0; i < 20; ++i) CHECK(check::dense(rng) < 1e-7);
  for (int i = 0; i < 20; ++i) CHECK(check::relu_away_from_zero(rng) < 1e-6);
  for (int i = 0; i < 20; ++i) CHECK(check::maxpool_away_from_ties(rng) < 1e-4);
  for (int i = 0; i < 20; ++i) CHECK(check::softmax_ce(rng) < 1e-6);
}

TEST_CASE("forward passes are deterministic") {
  Rng rng_a(55), rng_b(55);
  const auto p1 = make_conv2d<float>(4, 2, 3, 3, rng_a);
  const auto p2 = make_conv2d<float>(4, 2, 3, 3, rng_b);
  CHECK(p1.weights.data == p2.weights.data);

  Tensor<float> x({2, 8, 8});
  Rng rng_x(7);
  for (auto& v : x.data) v = static_cast<float>(rng_x.uniform(-1.0, 1.0));
  const auto y1 = conv2d_forward(x, p1, 1, 1);
  const auto y2 = conv2d_forward(x, p2, 1, 1);
  CHECK(y1.data == y2.data);
}
