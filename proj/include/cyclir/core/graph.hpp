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

#ifndef CYCLIR_CORE_GRAPH_HPP
#define CYCLIR_CORE_GRAPH_HPP

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "cyclir/core/param.hpp"
#include "cyclir/core/tensor.hpp"
#include "cyclir/kernels/kernels.hpp"

namespace cyclir {

/// Index of a node inside a Graph. -1 means "no tensor".
using VarId = int;
inline constexpr VarId kNoVar = -1;

/// Eager tape autograd over dense tensors. Each op computes its value
/// immediately and records a backward closure; backward() replays the tape
/// in reverse creation order (which is a topological order by construction).
///
/// Feature maps are [H,W,C] row-major with channels innermost, matrices
/// [rows,cols]. A graph is built per forward pass and discarded; parameters
/// live outside in a ParamStore and receive accumulated gradients when
/// backward() finishes.
template <typename T>
class Graph {
 public:
  Graph();

  // ---- node creation -------------------------------------------------
  VarId constant(Shape s, std::vector<T> data);
  /// External memory; the caller keeps it alive for the graph's lifetime.
  VarId constant_view(Shape s, const T* data);
  VarId input(Shape s, std::vector<T> data, bool needs_grad);
  VarId zeros(Shape s, bool needs_grad = false);
  /// Parameter leaf. Repeated calls with the same parameter return the same
  /// node so shared weights accumulate gradients from every use.
  VarId leaf(Param<T>& p);

  // ---- accessors ------------------------------------------------------
  const Shape& shape(VarId id) const;
  std::size_t size(VarId id) const;
  const T* vals(VarId id) const;
  T value0(VarId id) const { return vals(id)[0]; }
  std::vector<T> copy_values(VarId id) const;
  /// Gradient of the last backward() w.r.t. this node (empty if untouched).
  const std::vector<T>& grad(VarId id) const;
  bool needs_grad(VarId id) const;
  std::size_t node_count() const { return nodes_.size(); }

  /// Throws NumericError if any entry is NaN/Inf.
  void check_finite(VarId id, const char* label) const;

  // ---- elementwise ----------------------------------------------------
  VarId add(VarId a, VarId b);
  VarId sub(VarId a, VarId b);
  VarId mul(VarId a, VarId b);
  VarId scale(VarId a, T s);
  VarId add_scalar(VarId a, T s);
  VarId abs_val(VarId a);
  VarId gelu(VarId a);
  VarId sigmoid(VarId a);
  /// Clamp to [0,1]; gradient passes through on the closed interval.
  VarId clamp01(VarId a);
  /// alpha ⊙ x + beta, all same shape.
  VarId modulate(VarId x, VarId alpha, VarId beta);
  VarId detach(VarId a);

  // ---- reductions -----------------------------------------------------
  VarId sum_all(VarId a);
  VarId mean_all(VarId a);

  // ---- matrices ---------------------------------------------------------
  VarId matmul(VarId a, VarId b);     // [m,k]x[k,n]
  VarId matmul_tn(VarId a, VarId b);  // a:[k,m] -> aᵀb
  VarId matmul_nt(VarId a, VarId b);  // b:[n,k] -> abᵀ
  VarId transpose(VarId a);
  VarId add_rowvec(VarId x, VarId v);  // broadcast v over rows
  VarId mul_rowvec(VarId x, VarId v);
  VarId softmax_rows(VarId a);
  /// Row-wise L2 normalization; rows with norm < 1e-12 map to zero.
  VarId l2norm_rows(VarId a);

  // ---- shape ----------------------------------------------------------
  VarId reshape(VarId a, Shape s);
  VarId concat_rows(const std::vector<VarId>& parts);
  VarId slice_rows(VarId a, int r0, int r1);
  VarId repeat_rows(VarId a, int n);
  VarId concat_channels(VarId a, VarId b);
  std::vector<VarId> split_channels(VarId a, const std::vector<int>& sizes);

  // ---- image / conv ----------------------------------------------------
  /// Dense conv, zero padding k/2. x:[H,W,Cin], w:[k,k,Cin,Cout], b:[Cout]
  /// or kNoVar.
  VarId conv2d(VarId x, VarId w, VarId b, int k, int stride);
  /// Depthwise conv, stride 1, zero padding k/2. w:[k,k,C], b:[C] or kNoVar.
  VarId dwconv(VarId x, VarId w, VarId b, int k);
  /// [H,W,4C] -> [2H,2W,C]
  VarId pixel_shuffle2(VarId x);
  /// Area-averaging resample to Ho x Wo (exact box integration).
  VarId area_resize(VarId x, int Ho, int Wo);
  VarId global_avg_pool(VarId x);  // [H,W,C] -> [1,C]
  /// Per-position layer norm over the channel dim. x:[...,C]; gamma,beta:[C].
  VarId layernorm_ch(VarId x, VarId gamma, VarId beta, T eps = T(1e-6));
  /// Per-pixel max(RGB) - min(RGB). x:[H,W,3] -> [H,W,1].
  VarId residual_extract(VarId x);

  // ---- backward ---------------------------------------------------------
  /// Accumulates into Param::grad for every trainable leaf. `loss` must be
  /// scalar. One backward per graph.
  void backward(VarId loss);

 private:
  struct Node {
    Shape shape;
    std::size_t n = 0;
    std::vector<T> store;
    const T* vptr = nullptr;
    std::vector<T> grad;
    bool needs_grad = false;
    std::function<void(Graph&)> back;
    Param<T>* param = nullptr;
  };

  Node& node(VarId id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(VarId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  VarId make(Shape s, bool needs_grad);
  T* gradbuf(VarId id);
  void add_grad(VarId id, const T* g, std::size_t n);

  // shape helpers
  void require_2d(VarId a, const char* who) const;
  void require_3d(VarId a, const char* who) const;
  int rows2(VarId a) const { return shape(a)[0]; }
  int cols2(VarId a) const { return shape(a)[1]; }

  std::deque<Node> nodes_;
  std::map<const Param<T>*, VarId> leaf_cache_;
  const kernels::KernelSet<T>& K;
  bool ran_backward_ = false;
};

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace cyclir

#endif  // CYCLIR_CORE_GRAPH_HPP
