#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "accent/errors.hpp"

namespace accent {

// Dense n-dimensional array, row-major, with an optional gradient buffer of
// the same length. T is float for training, double for gradient checks.
template <typename T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;
  std::vector<T> grad;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(numel(), T(0));
  }
  Tensor(std::vector<std::size_t> s, std::vector<T> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != numel())
      throw ShapeMismatch("Tensor: data length does not match shape");
  }

  std::size_t numel() const {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return shape.empty() ? 0 : n;
  }

  std::size_t dim(std::size_t i) const { return shape.at(i); }

  void alloc_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), T(0));
  }
  void zero_grad() { grad.assign(data.size(), T(0)); }

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  // 3-D accessor for [C,H,W] tensors.
  T& at3(std::size_t c, std::size_t h, std::size_t w) {
    return data[(c * shape[1] + h) * shape[2] + w];
  }
  T at3(std::size_t c, std::size_t h, std::size_t w) const {
    return data[(c * shape[1] + h) * shape[2] + w];
  }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  std::string shape_str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }
};

}  // namespace accent
