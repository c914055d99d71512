// Copyright (c) 2026 the cyclir authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef CYCLIR_CORE_TENSOR_HPP
#define CYCLIR_CORE_TENSOR_HPP

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cyclir/core/error.hpp"

namespace cyclir {

/// Dense row-major shape. Feature maps are stored height x width x channels
/// (channels innermost), matrices rows x cols.
using Shape = std::vector<int>;

inline std::size_t numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) n *= static_cast<std::size_t>(d);
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << ']';
  return os.str();
}

inline bool same_shape(const Shape& a, const Shape& b) { return a == b; }

/// Plain owned buffer with a shape, used outside the autograd graph
/// (images, datasets, checkpoints).
template <typename T>
struct HostTensor {
  Shape shape;
  std::vector<T> data;

  HostTensor() = default;
  explicit HostTensor(Shape s) : shape(std::move(s)), data(numel(shape), T(0)) {}
  HostTensor(Shape s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != numel(shape))
      throw ShapeError("HostTensor data size " + std::to_string(data.size()) +
                       " does not match shape " + shape_str(shape));
  }

  std::size_t size() const { return data.size(); }

  T& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
  T operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
  T& operator()(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * shape[1] + x) * shape[2] + c];
  }
  T operator()(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * shape[1] + x) * shape[2] + c];
  }
};

/// Restoration images are H x W x 3 float tensors with values in [0, 1].
using ImageF = HostTensor<float>;
using ImageD = HostTensor<double>;

template <typename T>
HostTensor<T> image_cast(const ImageF& img) {
  HostTensor<T> out(img.shape);
  for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = static_cast<T>(img.data[i]);
  return out;
}

}  // namespace cyclir

#endif  // CYCLIR_CORE_TENSOR_HPP
