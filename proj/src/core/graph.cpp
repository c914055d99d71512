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

#include "cyclir/core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cyclir/core/error.hpp"

namespace cyclir {

namespace {

// Separable area-resampling weights: for each output index, the list of
// (input index, weight) covering its box. Weights sum to 1.
struct ResampleAxis {
  std::vector<int> start;
  std::vector<std::vector<double>> w;
};

ResampleAxis make_axis(int in, int out) {
  ResampleAxis ax;
  ax.start.resize(out);
  ax.w.resize(out);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    int i0 = static_cast<int>(std::floor(lo));
    int i1 = static_cast<int>(std::ceil(hi));
    i1 = std::min(i1, in);
    ax.start[o] = i0;
    for (int i = i0; i < i1; ++i) {
      const double cover = std::min<double>(hi, i + 1) - std::max<double>(lo, i);
      ax.w[o].push_back(cover / scale);
    }
  }
  return ax;
}

}  // namespace

template <typename T>
Graph<T>::Graph() : K(kernels::active<T>()) {}

template <typename T>
VarId Graph<T>::make(Shape s, bool needs_grad) {
  Node nd;
  nd.shape = std::move(s);
  nd.n = numel(nd.shape);
  nd.store.resize(nd.n);
  nd.vptr = nd.store.data();
  nd.needs_grad = needs_grad;
  nodes_.push_back(std::move(nd));
  // store may have been moved; refresh the pointer
  nodes_.back().vptr = nodes_.back().store.data();
  return static_cast<VarId>(nodes_.size() - 1);
}

template <typename T>
VarId Graph<T>::constant(Shape s, std::vector<T> data) {
  if (data.size() != numel(s))
    throw ShapeError("constant: data size does not match shape " + shape_str(s));
  Node nd;
  nd.shape = std::move(s);
  nd.n = data.size();
  nd.store = std::move(data);
  nd.vptr = nd.store.data();
  nodes_.push_back(std::move(nd));
  nodes_.back().vptr = nodes_.back().store.data();
  return static_cast<VarId>(nodes_.size() - 1);
}

template <typename T>
VarId Graph<T>::constant_view(Shape s, const T* data) {
  Node nd;
  nd.shape = std::move(s);
  nd.n = numel(nd.shape);
  nd.vptr = data;
  nodes_.push_back(std::move(nd));
  return static_cast<VarId>(nodes_.size() - 1);
}

template <typename T>
VarId Graph<T>::input(Shape s, std::vector<T> data, bool needs_grad) {
  VarId id = constant(std::move(s), std::move(data));
  node(id).needs_grad = needs_grad;
  return id;
}

template <typename T>
VarId Graph<T>::zeros(Shape s, bool needs_grad) {
  return make(std::move(s), needs_grad);
}

template <typename T>
VarId Graph<T>::leaf(Param<T>& p) {
  auto it = leaf_cache_.find(&p);
  if (it != leaf_cache_.end()) return it->second;
  Node nd;
  nd.shape = p.shape;
  nd.n = p.value.size();
  nd.vptr = p.value.data();
  nd.needs_grad = p.trainable;
  nd.param = &p;
  nodes_.push_back(std::move(nd));
  VarId id = static_cast<VarId>(nodes_.size() - 1);
  leaf_cache_[&p] = id;
  return id;
}

template <typename T>
const Shape& Graph<T>::shape(VarId id) const {
  return node(id).shape;
}

template <typename T>
std::size_t Graph<T>::size(VarId id) const {
  return node(id).n;
}

template <typename T>
const T* Graph<T>::vals(VarId id) const {
  return node(id).vptr;
}

template <typename T>
std::vector<T> Graph<T>::copy_values(VarId id) const {
  const Node& nd = node(id);
  return std::vector<T>(nd.vptr, nd.vptr + nd.n);
}

template <typename T>
const std::vector<T>& Graph<T>::grad(VarId id) const {
  return node(id).grad;
}

template <typename T>
bool Graph<T>::needs_grad(VarId id) const {
  return node(id).needs_grad;
}

template <typename T>
void Graph<T>::check_finite(VarId id, const char* label) const {
  const Node& nd = node(id);
  for (std::size_t i = 0; i < nd.n; ++i)
    if (!std::isfinite(nd.vptr[i]))
      throw NumericError(std::string("non-finite value in ") + label);
}

template <typename T>
T* Graph<T>::gradbuf(VarId id) {
  Node& nd = node(id);
  if (nd.grad.empty()) nd.grad.assign(nd.n, T(0));
  return nd.grad.data();
}

template <typename T>
void Graph<T>::add_grad(VarId id, const T* g, std::size_t n) {
  K.axpy(T(1), g, gradbuf(id), n);
}

template <typename T>
void Graph<T>::require_2d(VarId a, const char* who) const {
  if (shape(a).size() != 2)
    throw ShapeError(std::string(who) + ": expected a matrix, got " + shape_str(shape(a)));
}

template <typename T>
void Graph<T>::require_3d(VarId a, const char* who) const {
  if (shape(a).size() != 3)
    throw ShapeError(std::string(who) + ": expected H x W x C, got " + shape_str(shape(a)));
}

// ---------------------------------------------------------------------------
// elementwise

template <typename T>
VarId Graph<T>::add(VarId a, VarId b) {
  if (!same_shape(shape(a), shape(b)))
    throw ShapeError("add: " + shape_str(shape(a)) + " vs " + shape_str(shape(b)));
  VarId out = make(shape(a), needs_grad(a) || needs_grad(b));
  K.add(vals(a), vals(b), node(out).store.data(), size(a));
  if (node(out).needs_grad)
    node(out).back = [a, b, out](Graph& g) {
      const auto& go = g.node(out).grad;
      if (g.needs_grad(a)) g.add_grad(a, go.data(), go.size());
      if (g.needs_grad(b)) g.add_grad(b, go.data(), go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::sub(VarId a, VarId b) {
  if (!same_shape(shape(a), shape(b)))
    throw ShapeError("sub: " + shape_str(shape(a)) + " vs " + shape_str(shape(b)));
  VarId out = make(shape(a), needs_grad(a) || needs_grad(b));
  K.sub(vals(a), vals(b), node(out).store.data(), size(a));
  if (node(out).needs_grad)
    node(out).back = [a, b, out](Graph& g) {
      const auto& go = g.node(out).grad;
      if (g.needs_grad(a)) g.add_grad(a, go.data(), go.size());
      if (g.needs_grad(b)) g.K.axpy(T(-1), go.data(), g.gradbuf(b), go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::mul(VarId a, VarId b) {
  if (!same_shape(shape(a), shape(b)))
    throw ShapeError("mul: " + shape_str(shape(a)) + " vs " + shape_str(shape(b)));
  VarId out = make(shape(a), needs_grad(a) || needs_grad(b));
  K.mul(vals(a), vals(b), node(out).store.data(), size(a));
  if (node(out).needs_grad)
    node(out).back = [a, b, out](Graph& g) {
      const auto& go = g.node(out).grad;
      if (g.needs_grad(a)) g.K.mul_acc(g.gradbuf(a), go.data(), g.vals(b), go.size());
      if (g.needs_grad(b)) g.K.mul_acc(g.gradbuf(b), go.data(), g.vals(a), go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::scale(VarId a, T s) {
  VarId out = make(shape(a), needs_grad(a));
  K.scale(vals(a), s, node(out).store.data(), size(a));
  if (node(out).needs_grad)
    node(out).back = [a, s, out](Graph& g) {
      const auto& go = g.node(out).grad;
      g.K.axpy(s, go.data(), g.gradbuf(a), go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::add_scalar(VarId a, T s) {
  VarId out = make(shape(a), needs_grad(a));
  const T* x = vals(a);
  T* y = node(out).store.data();
  for (std::size_t i = 0; i < size(a); ++i) y[i] = x[i] + s;
  if (node(out).needs_grad)
    node(out).back = [a, out](Graph& g) {
      const auto& go = g.node(out).grad;
      g.add_grad(a, go.data(), go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::abs_val(VarId a) {
  VarId out = make(shape(a), needs_grad(a));
  const T* x = vals(a);
  T* y = node(out).store.data();
  for (std::size_t i = 0; i < size(a); ++i) y[i] = std::abs(x[i]);
  if (node(out).needs_grad)
    node(out).back = [a, out](Graph& g) {
      const auto& go = g.node(out).grad;
      const T* x = g.vals(a);
      T* ga = g.gradbuf(a);
      for (std::size_t i = 0; i < go.size(); ++i) {
        if (x[i] > T(0))
          ga[i] += go[i];
        else if (x[i] < T(0))
          ga[i] -= go[i];
      }
    };
  return out;
}

template <typename T>
VarId Graph<T>::gelu(VarId a) {
  VarId out = make(shape(a), needs_grad(a));
  K.gelu_fwd(vals(a), node(out).store.data(), size(a));
  if (node(out).needs_grad)
    node(out).back = [a, out](Graph& g) {
      const auto& go = g.node(out).grad;
      g.K.gelu_bwd_acc(g.vals(a), go.data(), g.gradbuf(a), go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::sigmoid(VarId a) {
  VarId out = make(shape(a), needs_grad(a));
  K.sigmoid_fwd(vals(a), node(out).store.data(), size(a));
  if (node(out).needs_grad)
    node(out).back = [a, out](Graph& g) {
      const auto& go = g.node(out).grad;
      g.K.sigmoid_bwd_acc(g.vals(out), go.data(), g.gradbuf(a), go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::clamp01(VarId a) {
  VarId out = make(shape(a), needs_grad(a));
  const T* x = vals(a);
  T* y = node(out).store.data();
  for (std::size_t i = 0; i < size(a); ++i) y[i] = std::min(T(1), std::max(T(0), x[i]));
  if (node(out).needs_grad)
    node(out).back = [a, out](Graph& g) {
      const auto& go = g.node(out).grad;
      const T* x = g.vals(a);
      T* ga = g.gradbuf(a);
      for (std::size_t i = 0; i < go.size(); ++i)
        if (x[i] >= T(0) && x[i] <= T(1)) ga[i] += go[i];
    };
  return out;
}

template <typename T>
VarId Graph<T>::modulate(VarId x, VarId alpha, VarId beta) {
  if (!same_shape(shape(x), shape(alpha)) || !same_shape(shape(x), shape(beta)))
    throw ShapeError("modulate: x " + shape_str(shape(x)) + ", alpha " +
                     shape_str(shape(alpha)) + ", beta " + shape_str(shape(beta)));
  VarId out = make(shape(x), needs_grad(x) || needs_grad(alpha) || needs_grad(beta));
  K.affine3(vals(alpha), vals(x), vals(beta), node(out).store.data(), size(x));
  if (node(out).needs_grad)
    node(out).back = [x, alpha, beta, out](Graph& g) {
      const auto& go = g.node(out).grad;
      if (g.needs_grad(x)) g.K.mul_acc(g.gradbuf(x), go.data(), g.vals(alpha), go.size());
      if (g.needs_grad(alpha)) g.K.mul_acc(g.gradbuf(alpha), go.data(), g.vals(x), go.size());
      if (g.needs_grad(beta)) g.add_grad(beta, go.data(), go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::detach(VarId a) {
  VarId out = constant_view(shape(a), vals(a));
  return out;
}

// ---------------------------------------------------------------------------
// reductions

template <typename T>
VarId Graph<T>::sum_all(VarId a) {
  VarId out = make(Shape{1}, needs_grad(a));
  node(out).store[0] = K.sum(vals(a), size(a));
  if (node(out).needs_grad)
    node(out).back = [a, out](Graph& g) {
      const T go = g.node(out).grad[0];
      T* ga = g.gradbuf(a);
      const std::size_t n = g.size(a);
      for (std::size_t i = 0; i < n; ++i) ga[i] += go;
    };
  return out;
}

template <typename T>
VarId Graph<T>::mean_all(VarId a) {
  VarId out = make(Shape{1}, needs_grad(a));
  node(out).store[0] = K.sum(vals(a), size(a)) / static_cast<T>(size(a));
  if (node(out).needs_grad)
    node(out).back = [a, out](Graph& g) {
      const T go = g.node(out).grad[0] / static_cast<T>(g.size(a));
      T* ga = g.gradbuf(a);
      const std::size_t n = g.size(a);
      for (std::size_t i = 0; i < n; ++i) ga[i] += go;
    };
  return out;
}

// ---------------------------------------------------------------------------
// matrices

template <typename T>
VarId Graph<T>::matmul(VarId a, VarId b) {
  require_2d(a, "matmul");
  require_2d(b, "matmul");
  const int m = rows2(a), k = cols2(a), n = cols2(b);
  if (rows2(b) != k)
    throw ShapeError("matmul: " + shape_str(shape(a)) + " x " + shape_str(shape(b)));
  VarId out = make(Shape{m, n}, needs_grad(a) || needs_grad(b));
  K.gemm(vals(a), vals(b), node(out).store.data(), m, k, n, false);
  if (node(out).needs_grad)
    node(out).back = [a, b, out, m, k, n](Graph& g) {
      const T* go = g.node(out).grad.data();
      if (g.needs_grad(a)) g.K.gemm_nt(go, g.vals(b), g.gradbuf(a), m, n, k, true);
      if (g.needs_grad(b)) g.K.gemm_tn(g.vals(a), go, g.gradbuf(b), k, m, n, true);
    };
  return out;
}

template <typename T>
VarId Graph<T>::matmul_tn(VarId a, VarId b) {
  require_2d(a, "matmul_tn");
  require_2d(b, "matmul_tn");
  const int k = rows2(a), m = cols2(a), n = cols2(b);
  if (rows2(b) != k)
    throw ShapeError("matmul_tn: " + shape_str(shape(a)) + "ᵀ x " + shape_str(shape(b)));
  VarId out = make(Shape{m, n}, needs_grad(a) || needs_grad(b));
  K.gemm_tn(vals(a), vals(b), node(out).store.data(), m, k, n, false);
  if (node(out).needs_grad)
    node(out).back = [a, b, out, m, k, n](Graph& g) {
      const T* go = g.node(out).grad.data();
      // dA[k,m] += B[k,n] * goᵀ[n,m];   dB[k,n] += A[k,m] * go[m,n]
      if (g.needs_grad(a)) g.K.gemm_nt(g.vals(b), go, g.gradbuf(a), k, n, m, true);
      if (g.needs_grad(b)) g.K.gemm(g.vals(a), go, g.gradbuf(b), k, m, n, true);
    };
  return out;
}

template <typename T>
VarId Graph<T>::matmul_nt(VarId a, VarId b) {
  require_2d(a, "matmul_nt");
  require_2d(b, "matmul_nt");
  const int m = rows2(a), k = cols2(a), n = rows2(b);
  if (cols2(b) != k)
    throw ShapeError("matmul_nt: " + shape_str(shape(a)) + " x " + shape_str(shape(b)) + "ᵀ");
  VarId out = make(Shape{m, n}, needs_grad(a) || needs_grad(b));
  K.gemm_nt(vals(a), vals(b), node(out).store.data(), m, k, n, false);
  if (node(out).needs_grad)
    node(out).back = [a, b, out, m, k, n](Graph& g) {
      const T* go = g.node(out).grad.data();
      // dA[m,k] += go[m,n] * B[n,k];    dB[n,k] += goᵀ[n,m] * A[m,k]
      if (g.needs_grad(a)) g.K.gemm(go, g.vals(b), g.gradbuf(a), m, n, k, true);
      if (g.needs_grad(b)) g.K.gemm_tn(go, g.vals(a), g.gradbuf(b), n, m, k, true);
    };
  return out;
}

template <typename T>
VarId Graph<T>::transpose(VarId a) {
  require_2d(a, "transpose");
  const int m = rows2(a), n = cols2(a);
  VarId out = make(Shape{n, m}, needs_grad(a));
  const T* x = vals(a);
  T* y = node(out).store.data();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) y[std::size_t(j) * m + i] = x[std::size_t(i) * n + j];
  if (node(out).needs_grad)
    node(out).back = [a, out, m, n](Graph& g) {
      const T* go = g.node(out).grad.data();
      T* ga = g.gradbuf(a);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) ga[std::size_t(i) * n + j] += go[std::size_t(j) * m + i];
    };
  return out;
}

template <typename T>
VarId Graph<T>::add_rowvec(VarId x, VarId v) {
  require_2d(x, "add_rowvec");
  const int m = rows2(x), n = cols2(x);
  if (static_cast<int>(size(v)) != n)
    throw ShapeError("add_rowvec: vector size " + std::to_string(size(v)) +
                     " vs row width " + std::to_string(n));
  VarId out = make(shape(x), needs_grad(x) || needs_grad(v));
  const T* xv = vals(x);
  const T* vv = vals(v);
  T* y = node(out).store.data();
  for (int i = 0; i < m; ++i)
    K.add(xv + std::size_t(i) * n, vv, y + std::size_t(i) * n, n);
  if (node(out).needs_grad)
    node(out).back = [x, v, out, m, n](Graph& g) {
      const T* go = g.node(out).grad.data();
      if (g.needs_grad(x)) g.add_grad(x, go, std::size_t(m) * n);
      if (g.needs_grad(v)) {
        T* gv = g.gradbuf(v);
        for (int i = 0; i < m; ++i) g.K.axpy(T(1), go + std::size_t(i) * n, gv, n);
      }
    };
  return out;
}

template <typename T>
VarId Graph<T>::mul_rowvec(VarId x, VarId v) {
  require_2d(x, "mul_rowvec");
  const int m = rows2(x), n = cols2(x);
  if (static_cast<int>(size(v)) != n)
    throw ShapeError("mul_rowvec: vector size " + std::to_string(size(v)) +
                     " vs row width " + std::to_string(n));
  VarId out = make(shape(x), needs_grad(x) || needs_grad(v));
  const T* xv = vals(x);
  const T* vv = vals(v);
  T* y = node(out).store.data();
  for (int i = 0; i < m; ++i)
    K.mul(xv + std::size_t(i) * n, vv, y + std::size_t(i) * n, n);
  if (node(out).needs_grad)
    node(out).back = [x, v, out, m, n](Graph& g) {
      const T* go = g.node(out).grad.data();
      if (g.needs_grad(x)) {
        T* gx = g.gradbuf(x);
        const T* vv = g.vals(v);
        for (int i = 0; i < m; ++i)
          g.K.mul_acc(gx + std::size_t(i) * n, go + std::size_t(i) * n, vv, n);
      }
      if (g.needs_grad(v)) {
        T* gv = g.gradbuf(v);
        const T* xv = g.vals(x);
        for (int i = 0; i < m; ++i)
          g.K.mul_acc(gv, go + std::size_t(i) * n, xv + std::size_t(i) * n, n);
      }
    };
  return out;
}

template <typename T>
VarId Graph<T>::softmax_rows(VarId a) {
  require_2d(a, "softmax_rows");
  const int m = rows2(a), n = cols2(a);
  VarId out = make(shape(a), needs_grad(a));
  const T* x = vals(a);
  T* y = node(out).store.data();
  for (int i = 0; i < m; ++i) {
    const T* xr = x + std::size_t(i) * n;
    T* yr = y + std::size_t(i) * n;
    T mx = xr[0];
    for (int j = 1; j < n; ++j) mx = std::max(mx, xr[j]);
    T s = T(0);
    for (int j = 0; j < n; ++j) {
      yr[j] = std::exp(xr[j] - mx);
      s += yr[j];
    }
    const T inv = T(1) / s;
    for (int j = 0; j < n; ++j) yr[j] *= inv;
  }
  if (node(out).needs_grad)
    node(out).back = [a, out, m, n](Graph& g) {
      const T* go = g.node(out).grad.data();
      const T* y = g.vals(out);
      T* ga = g.gradbuf(a);
      for (int i = 0; i < m; ++i) {
        const T* yr = y + std::size_t(i) * n;
        const T* gr = go + std::size_t(i) * n;
        T* gar = ga + std::size_t(i) * n;
        const T s = g.K.dot(yr, gr, n);
        for (int j = 0; j < n; ++j) gar[j] += yr[j] * (gr[j] - s);
      }
    };
  return out;
}

template <typename T>
VarId Graph<T>::l2norm_rows(VarId a) {
  require_2d(a, "l2norm_rows");
  const int m = rows2(a), n = cols2(a);
  VarId out = make(shape(a), needs_grad(a));
  auto inv_norm = std::make_shared<std::vector<T>>(m);
  const T* x = vals(a);
  T* y = node(out).store.data();
  for (int i = 0; i < m; ++i) {
    const T* xr = x + std::size_t(i) * n;
    T* yr = y + std::size_t(i) * n;
    const T norm = std::sqrt(K.dot(xr, xr, n));
    if (norm < T(1e-12)) {
      (*inv_norm)[i] = T(0);
      std::fill(yr, yr + n, T(0));
    } else {
      const T inv = T(1) / norm;
      (*inv_norm)[i] = inv;
      K.scale(xr, inv, yr, n);
    }
  }
  if (node(out).needs_grad)
    node(out).back = [a, out, m, n, inv_norm](Graph& g) {
      const T* go = g.node(out).grad.data();
      const T* y = g.vals(out);
      T* ga = g.gradbuf(a);
      for (int i = 0; i < m; ++i) {
        const T inv = (*inv_norm)[i];
        if (inv == T(0)) continue;
        const T* yr = y + std::size_t(i) * n;
        const T* gr = go + std::size_t(i) * n;
        T* gar = ga + std::size_t(i) * n;
        const T s = g.K.dot(yr, gr, n);
        for (int j = 0; j < n; ++j) gar[j] += inv * (gr[j] - yr[j] * s);
      }
    };
  return out;
}

// ---------------------------------------------------------------------------
// shape ops

template <typename T>
VarId Graph<T>::reshape(VarId a, Shape s) {
  if (numel(s) != size(a))
    throw ShapeError("reshape: " + shape_str(shape(a)) + " -> " + shape_str(s));
  Node nd;
  nd.shape = std::move(s);
  nd.n = size(a);
  nd.vptr = vals(a);  // zero-copy view
  nd.needs_grad = needs_grad(a);
  nodes_.push_back(std::move(nd));
  VarId out = static_cast<VarId>(nodes_.size() - 1);
  if (node(out).needs_grad)
    node(out).back = [a, out](Graph& g) {
      const auto& go = g.node(out).grad;
      g.add_grad(a, go.data(), go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::concat_rows(const std::vector<VarId>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const int n = cols2(parts[0]);
  int m = 0;
  bool ng = false;
  for (VarId p : parts) {
    require_2d(p, "concat_rows");
    if (cols2(p) != n) throw ShapeError("concat_rows: column mismatch");
    m += rows2(p);
    ng = ng || needs_grad(p);
  }
  VarId out = make(Shape{m, n}, ng);
  T* y = node(out).store.data();
  std::size_t off = 0;
  for (VarId p : parts) {
    std::memcpy(y + off, vals(p), sizeof(T) * size(p));
    off += size(p);
  }
  if (ng) {
    auto parts_copy = parts;
    node(out).back = [parts_copy, out](Graph& g) {
      const T* go = g.node(out).grad.data();
      std::size_t off = 0;
      for (VarId p : parts_copy) {
        if (g.needs_grad(p)) g.K.axpy(T(1), go + off, g.gradbuf(p), g.size(p));
        off += g.size(p);
      }
    };
  }
  return out;
}

template <typename T>
VarId Graph<T>::slice_rows(VarId a, int r0, int r1) {
  require_2d(a, "slice_rows");
  const int m = rows2(a), n = cols2(a);
  if (r0 < 0 || r1 > m || r0 >= r1) throw ShapeError("slice_rows: bad range");
  VarId out = make(Shape{r1 - r0, n}, needs_grad(a));
  std::memcpy(node(out).store.data(), vals(a) + std::size_t(r0) * n,
              sizeof(T) * std::size_t(r1 - r0) * n);
  if (node(out).needs_grad)
    node(out).back = [a, out, r0, n](Graph& g) {
      const auto& go = g.node(out).grad;
      g.K.axpy(T(1), go.data(), g.gradbuf(a) + std::size_t(r0) * n, go.size());
    };
  return out;
}

template <typename T>
VarId Graph<T>::repeat_rows(VarId a, int n_rows) {
  require_2d(a, "repeat_rows");
  if (rows2(a) != 1) throw ShapeError("repeat_rows: expected a single row");
  const int n = cols2(a);
  VarId out = make(Shape{n_rows, n}, needs_grad(a));
  T* y = node(out).store.data();
  for (int i = 0; i < n_rows; ++i) std::memcpy(y + std::size_t(i) * n, vals(a), sizeof(T) * n);
  if (node(out).needs_grad)
    node(out).back = [a, out, n_rows, n](Graph& g) {
      const T* go = g.node(out).grad.data();
      T* ga = g.gradbuf(a);
      for (int i = 0; i < n_rows; ++i) g.K.axpy(T(1), go + std::size_t(i) * n, ga, n);
    };
  return out;
}

template <typename T>
VarId Graph<T>::concat_channels(VarId a, VarId b) {
  require_3d(a, "concat_channels");
  require_3d(b, "concat_channels");
  const Shape& sa = shape(a);
  const Shape& sb = shape(b);
  if (sa[0] != sb[0] || sa[1] != sb[1])
    throw ShapeError("concat_channels: " + shape_str(sa) + " vs " + shape_str(sb));
  const int hw = sa[0] * sa[1], ca = sa[2], cb = sb[2];
  VarId out = make(Shape{sa[0], sa[1], ca + cb}, needs_grad(a) || needs_grad(b));
  const T* xa = vals(a);
  const T* xb = vals(b);
  T* y = node(out).store.data();
  for (int i = 0; i < hw; ++i) {
    std::memcpy(y + std::size_t(i) * (ca + cb), xa + std::size_t(i) * ca, sizeof(T) * ca);
    std::memcpy(y + std::size_t(i) * (ca + cb) + ca, xb + std::size_t(i) * cb, sizeof(T) * cb);
  }
  if (node(out).needs_grad)
    node(out).back = [a, b, out, hw, ca, cb](Graph& g) {
      const T* go = g.node(out).grad.data();
      if (g.needs_grad(a)) {
        T* ga = g.gradbuf(a);
        for (int i = 0; i < hw; ++i)
          g.K.axpy(T(1), go + std::size_t(i) * (ca + cb), ga + std::size_t(i) * ca, ca);
      }
      if (g.needs_grad(b)) {
        T* gb = g.gradbuf(b);
        for (int i = 0; i < hw; ++i)
          g.K.axpy(T(1), go + std::size_t(i) * (ca + cb) + ca, gb + std::size_t(i) * cb, cb);
      }
    };
  return out;
}

template <typename T>
std::vector<VarId> Graph<T>::split_channels(VarId a, const std::vector<int>& sizes) {
  require_3d(a, "split_channels");
  const Shape& s = shape(a);
  int total = 0;
  for (int c : sizes) total += c;
  if (total != s[2]) throw ShapeError("split_channels: sizes do not sum to C");
  const int hw = s[0] * s[1], C = s[2];
  std::vector<VarId> outs;
  int off = 0;
  for (int c : sizes) {
    VarId out = make(Shape{s[0], s[1], c}, needs_grad(a));
    const T* x = vals(a);
    T* y = node(out).store.data();
    for (int i = 0; i < hw; ++i)
      std::memcpy(y + std::size_t(i) * c, x + std::size_t(i) * C + off, sizeof(T) * c);
    if (node(out).needs_grad) {
      const int off_c = off;
      node(out).back = [a, out, hw, C, c, off_c](Graph& g) {
        const T* go = g.node(out).grad.data();
        T* ga = g.gradbuf(a);
        for (int i = 0; i < hw; ++i)
          g.K.axpy(T(1), go + std::size_t(i) * c, ga + std::size_t(i) * C + off_c, c);
      };
    }
    outs.push_back(out);
    off += c;
  }
  return outs;
}

// ---------------------------------------------------------------------------
// conv / image ops

namespace {

template <typename T>
void im2col(const T* x, int H, int W, int C, int k, int stride, int pad,
            int OH, int OW, T* col) {
  // col row = output pixel, col column = (dy*k + dx)*C + c
  const int K = k * k * C;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (std::size_t(OH) * OW * K > 100000)
#endif
  for (int oy = 0; oy < OH; ++oy) {
    for (int ox = 0; ox < OW; ++ox) {
      T* row = col + (std::size_t(oy) * OW + ox) * K;
      for (int dy = 0; dy < k; ++dy) {
        const int iy = oy * stride + dy - pad;
        for (int dx = 0; dx < k; ++dx) {
          const int ix = ox * stride + dx - pad;
          T* dst = row + (std::size_t(dy) * k + dx) * C;
          if (iy < 0 || iy >= H || ix < 0 || ix >= W) {
            std::memset(dst, 0, sizeof(T) * C);
          } else {
            std::memcpy(dst, x + (std::size_t(iy) * W + ix) * C, sizeof(T) * C);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_acc(const T* col, int H, int W, int C, int k, int stride, int pad,
                int OH, int OW, T* gx) {
  const int K = k * k * C;
  for (int oy = 0; oy < OH; ++oy) {
    for (int ox = 0; ox < OW; ++ox) {
      const T* row = col + (std::size_t(oy) * OW + ox) * K;
      for (int dy = 0; dy < k; ++dy) {
        const int iy = oy * stride + dy - pad;
        if (iy < 0 || iy >= H) continue;
        for (int dx = 0; dx < k; ++dx) {
          const int ix = ox * stride + dx - pad;
          if (ix < 0 || ix >= W) continue;
          const T* src = row + (std::size_t(dy) * k + dx) * C;
          T* dst = gx + (std::size_t(iy) * W + ix) * C;
          for (int c = 0; c < C; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

}  // namespace

template <typename T>
VarId Graph<T>::conv2d(VarId x, VarId w, VarId b, int k, int stride) {
  require_3d(x, "conv2d");
  const Shape& sx = shape(x);
  const Shape& sw = shape(w);
  if (sw.size() != 4 || sw[0] != k || sw[1] != k)
    throw ShapeError("conv2d: weight must be [k,k,Cin,Cout], got " + shape_str(sw));
  const int H = sx[0], W = sx[1], Cin = sx[2], Cout = sw[3];
  if (sw[2] != Cin)
    throw ShapeError("conv2d: input channels " + std::to_string(Cin) +
                     " vs weight " + std::to_string(sw[2]));
  const int pad = k / 2;
  const int OH = (H + 2 * pad - k) / stride + 1;
  const int OW = (W + 2 * pad - k) / stride + 1;
  const int Kdim = k * k * Cin;

  auto col = std::make_shared<std::vector<T>>(std::size_t(OH) * OW * Kdim);
  im2col(vals(x), H, W, Cin, k, stride, pad, OH, OW, col->data());

  bool ng = needs_grad(x) || needs_grad(w) || (b != kNoVar && needs_grad(b));
  VarId out = make(Shape{OH, OW, Cout}, ng);
  // out = col [R,K] x w [K,Cout]
  K.gemm(col->data(), vals(w), node(out).store.data(), OH * OW, Kdim, Cout, false);
  if (b != kNoVar) {
    const T* bias = vals(b);
    T* y = node(out).store.data();
    for (int i = 0; i < OH * OW; ++i) K.add(y + std::size_t(i) * Cout, bias, y + std::size_t(i) * Cout, Cout);
  }

  if (ng)
    node(out).back = [x, w, b, out, col, H, W, Cin, Cout, k, stride, pad, OH, OW, Kdim](Graph& g) {
      const T* go = g.node(out).grad.data();
      const int R = OH * OW;
      if (g.needs_grad(w)) g.K.gemm_tn(col->data(), go, g.gradbuf(w), Kdim, R, Cout, true);
      if (b != kNoVar && g.needs_grad(b)) {
        T* gb = g.gradbuf(b);
        for (int i = 0; i < R; ++i) g.K.axpy(T(1), go + std::size_t(i) * Cout, gb, Cout);
      }
      if (g.needs_grad(x)) {
        std::vector<T> gcol(std::size_t(R) * Kdim);
        g.K.gemm_nt(go, g.vals(w), gcol.data(), R, Cout, Kdim, false);
        col2im_acc(gcol.data(), H, W, Cin, k, stride, pad, OH, OW, g.gradbuf(x));
      }
    };
  return out;
}

template <typename T>
VarId Graph<T>::dwconv(VarId x, VarId w, VarId b, int k) {
  require_3d(x, "dwconv");
  const Shape& sx = shape(x);
  const Shape& sw = shape(w);
  const int H = sx[0], W = sx[1], C = sx[2];
  if (sw.size() != 3 || sw[0] != k || sw[1] != k || sw[2] != C)
    throw ShapeError("dwconv: weight must be [k,k,C], got " + shape_str(sw));
  bool ng = needs_grad(x) || needs_grad(w) || (b != kNoVar && needs_grad(b));
  VarId out = make(shape(x), ng);
  K.dwconv_fwd(vals(x), H, W, C, vals(w), k, b == kNoVar ? nullptr : vals(b),
               node(out).store.data());
  if (ng)
    node(out).back = [x, w, b, out, H, W, C, k](Graph& g) {
      const T* go = g.node(out).grad.data();
      if (g.needs_grad(x)) g.K.dwconv_bwd_data_acc(go, H, W, C, g.vals(w), k, g.gradbuf(x));
      const bool need_w = g.needs_grad(w);
      const bool need_b = b != kNoVar && g.needs_grad(b);
      if (need_w || need_b)
        g.K.dwconv_bwd_wb_acc(g.vals(x), go, H, W, C, k,
                              need_w ? g.gradbuf(w) : nullptr,
                              need_b ? g.gradbuf(b) : nullptr);
    };
  return out;
}

template <typename T>
VarId Graph<T>::pixel_shuffle2(VarId x) {
  require_3d(x, "pixel_shuffle2");
  const Shape& s = shape(x);
  const int H = s[0], W = s[1], C = s[2];
  if (C % 4 != 0) throw ShapeError("pixel_shuffle2: channels must be divisible by 4");
  const int Co = C / 4;
  VarId out = make(Shape{2 * H, 2 * W, Co}, needs_grad(x));
  const T* in = vals(x);
  T* y = node(out).store.data();
  for (int iy = 0; iy < H; ++iy)
    for (int ix = 0; ix < W; ++ix) {
      const T* src = in + (std::size_t(iy) * W + ix) * C;
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          T* dst = y + (std::size_t(2 * iy + dy) * (2 * W) + (2 * ix + dx)) * Co;
          std::memcpy(dst, src + std::size_t(Co) * (dy * 2 + dx), sizeof(T) * Co);
        }
    }
  if (node(out).needs_grad)
    node(out).back = [x, out, H, W, C, Co](Graph& g) {
      const T* go = g.node(out).grad.data();
      T* gx = g.gradbuf(x);
      for (int iy = 0; iy < H; ++iy)
        for (int ix = 0; ix < W; ++ix) {
          T* dst = gx + (std::size_t(iy) * W + ix) * C;
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
              const T* src = go + (std::size_t(2 * iy + dy) * (2 * W) + (2 * ix + dx)) * Co;
              g.K.axpy(T(1), src, dst + std::size_t(Co) * (dy * 2 + dx), Co);
            }
        }
    };
  return out;
}

template <typename T>
VarId Graph<T>::area_resize(VarId x, int Ho, int Wo) {
  require_3d(x, "area_resize");
  const Shape& s = shape(x);
  const int H = s[0], W = s[1], C = s[2];
  if (Ho < 1 || Wo < 1 || Ho > H || Wo > W)
    throw ShapeError("area_resize: cannot resize " + shape_str(s) + " to " +
                     std::to_string(Ho) + "x" + std::to_string(Wo));
  auto ay = std::make_shared<ResampleAxis>(make_axis(H, Ho));
  auto ax = std::make_shared<ResampleAxis>(make_axis(W, Wo));
  VarId out = make(Shape{Ho, Wo, C}, needs_grad(x));
  // rows pass into tmp, then columns pass into out
  std::vector<T> tmp(std::size_t(Ho) * W * C, T(0));
  const T* in = vals(x);
  for (int oy = 0; oy < Ho; ++oy) {
    T* trow = tmp.data() + std::size_t(oy) * W * C;
    const auto& wy = ay->w[oy];
    for (std::size_t t = 0; t < wy.size(); ++t) {
      const int iy = ay->start[oy] + static_cast<int>(t);
      K.axpy(static_cast<T>(wy[t]), in + std::size_t(iy) * W * C, trow, std::size_t(W) * C);
    }
  }
  T* y = node(out).store.data();
  std::fill(y, y + size(out), T(0));
  for (int oy = 0; oy < Ho; ++oy) {
    const T* trow = tmp.data() + std::size_t(oy) * W * C;
    T* yrow = y + std::size_t(oy) * Wo * C;
    for (int ox = 0; ox < Wo; ++ox) {
      const auto& wx = ax->w[ox];
      for (std::size_t t = 0; t < wx.size(); ++t) {
        const int ixx = ax->start[ox] + static_cast<int>(t);
        K.axpy(static_cast<T>(wx[t]), trow + std::size_t(ixx) * C, yrow + std::size_t(ox) * C, C);
      }
    }
  }
  if (node(out).needs_grad)
    node(out).back = [x, out, H, W, C, Ho, Wo, ay, ax](Graph& g) {
      const T* go = g.node(out).grad.data();
      std::vector<T> gtmp(std::size_t(Ho) * W * C, T(0));
      for (int oy = 0; oy < Ho; ++oy) {
        T* trow = gtmp.data() + std::size_t(oy) * W * C;
        const T* grow = go + std::size_t(oy) * Wo * C;
        for (int ox = 0; ox < Wo; ++ox) {
          const auto& wx = ax->w[ox];
          for (std::size_t t = 0; t < wx.size(); ++t) {
            const int ixx = ax->start[ox] + static_cast<int>(t);
            g.K.axpy(static_cast<T>(wx[t]), grow + std::size_t(ox) * C,
                     trow + std::size_t(ixx) * C, C);
          }
        }
      }
      T* gx = g.gradbuf(x);
      for (int oy = 0; oy < Ho; ++oy) {
        const T* trow = gtmp.data() + std::size_t(oy) * W * C;
        const auto& wy = ay->w[oy];
        for (std::size_t t = 0; t < wy.size(); ++t) {
          const int iy = ay->start[oy] + static_cast<int>(t);
          g.K.axpy(static_cast<T>(wy[t]), trow, gx + std::size_t(iy) * W * C, std::size_t(W) * C);
        }
      }
    };
  return out;
}

template <typename T>
VarId Graph<T>::global_avg_pool(VarId x) {
  require_3d(x, "global_avg_pool");
  const Shape& s = shape(x);
  const int HW = s[0] * s[1], C = s[2];
  VarId out = make(Shape{1, C}, needs_grad(x));
  const T* in = vals(x);
  T* y = node(out).store.data();
  std::fill(y, y + C, T(0));
  for (int i = 0; i < HW; ++i) K.add(y, in + std::size_t(i) * C, y, C);
  K.scale(y, T(1) / static_cast<T>(HW), y, C);
  if (node(out).needs_grad)
    node(out).back = [x, out, HW, C](Graph& g) {
      const T* go = g.node(out).grad.data();
      T* gx = g.gradbuf(x);
      const T inv = T(1) / static_cast<T>(HW);
      for (int i = 0; i < HW; ++i) g.K.axpy(inv, go, gx + std::size_t(i) * C, C);
    };
  return out;
}

template <typename T>
VarId Graph<T>::layernorm_ch(VarId x, VarId gamma, VarId beta, T eps) {
  const Shape& s = shape(x);
  if (s.empty()) throw ShapeError("layernorm_ch: scalar input");
  const int C = s.back();
  const int rows = static_cast<int>(size(x)) / C;
  if (static_cast<int>(size(gamma)) != C || static_cast<int>(size(beta)) != C)
    throw ShapeError("layernorm_ch: affine size mismatch");
  bool ng = needs_grad(x) || needs_grad(gamma) || needs_grad(beta);
  VarId out = make(s, ng);
  auto xhat = std::make_shared<std::vector<T>>(size(x));
  auto inv_std = std::make_shared<std::vector<T>>(rows);
  K.layernorm_fwd(vals(x), rows, C, vals(gamma), vals(beta), eps,
                  node(out).store.data(), xhat->data(), inv_std->data());
  if (ng)
    node(out).back = [x, gamma, beta, out, rows, C, xhat, inv_std](Graph& g) {
      const T* go = g.node(out).grad.data();
      // layernorm_bwd needs a writable gx even if x itself is a constant
      std::vector<T> scratch;
      T* gx;
      if (g.needs_grad(x)) {
        gx = g.gradbuf(x);
      } else {
        scratch.assign(std::size_t(rows) * C, T(0));
        gx = scratch.data();
      }
      g.K.layernorm_bwd_acc(xhat->data(), inv_std->data(), g.vals(gamma), go,
                            rows, C, gx,
                            g.needs_grad(gamma) ? g.gradbuf(gamma) : nullptr,
                            g.needs_grad(beta) ? g.gradbuf(beta) : nullptr);
    };
  return out;
}

template <typename T>
VarId Graph<T>::residual_extract(VarId x) {
  require_3d(x, "residual_extract");
  const Shape& s = shape(x);
  if (s[2] != 3)
    throw ShapeError("residual_extract: expected a 3-channel image, got " + shape_str(s));
  const int HW = s[0] * s[1];
  VarId out = make(Shape{s[0], s[1], 1}, needs_grad(x));
  auto idx = std::make_shared<std::vector<unsigned char>>(std::size_t(HW));
  const T* in = vals(x);
  T* y = node(out).store.data();
  for (int i = 0; i < HW; ++i) {
    const T* px = in + std::size_t(i) * 3;
    int amax = 0, amin = 0;
    for (int c = 1; c < 3; ++c) {
      if (px[c] > px[amax]) amax = c;
      if (px[c] < px[amin]) amin = c;
    }
    y[i] = px[amax] - px[amin];
    (*idx)[i] = static_cast<unsigned char>(amax * 4 + amin);
  }
  if (node(out).needs_grad)
    node(out).back = [x, out, HW, idx](Graph& g) {
      const T* go = g.node(out).grad.data();
      T* gx = g.gradbuf(x);
      for (int i = 0; i < HW; ++i) {
        const int amax = (*idx)[i] / 4, amin = (*idx)[i] % 4;
        gx[std::size_t(i) * 3 + amax] += go[i];
        gx[std::size_t(i) * 3 + amin] -= go[i];
      }
    };
  return out;
}

// ---------------------------------------------------------------------------
// backward

template <typename T>
void Graph<T>::backward(VarId loss) {
  if (ran_backward_) throw Error("backward called twice on one graph");
  ran_backward_ = true;
  if (size(loss) != 1) throw ShapeError("backward: loss must be scalar");
  if (!node(loss).needs_grad)
    throw Error("backward: loss does not depend on any differentiable input");
  gradbuf(loss)[0] = T(1);
  for (VarId id = static_cast<VarId>(nodes_.size()) - 1; id >= 0; --id) {
    Node& nd = node(id);
    if (nd.grad.empty() || !nd.back) continue;
    nd.back(*this);
  }
  for (auto& [p, id] : leaf_cache_) {
    Node& nd = node(id);
    if (nd.grad.empty() || !nd.param || !nd.param->trainable) continue;
    if (nd.param->grad.size() != nd.n) nd.param->grad.assign(nd.n, T(0));
    K.axpy(T(1), nd.grad.data(), nd.param->grad.data(), nd.n);
  }
}

template class Graph<float>;
template class Graph<double>;

}  // namespace cyclir
