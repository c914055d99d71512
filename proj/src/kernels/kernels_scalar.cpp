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

// Scalar reference kernels. These define the semantics that the SIMD
// variants are equivalence-tested against.

#include <cmath>
#include <cstring>

#include "cyclir/kernels/kernels.hpp"

namespace cyclir::kernels {
namespace {

template <typename T>
void gemm_ref(const T* A, const T* B, T* C, int m, int k, int n, bool acc) {
  const std::size_t work = std::size_t(m) * k * n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (work > 200000)
#endif
  for (int i = 0; i < m; ++i) {
    T* c = C + std::size_t(i) * n;
    if (!acc)
      for (int j = 0; j < n; ++j) c[j] = T(0);
    const T* a = A + std::size_t(i) * k;
    for (int p = 0; p < k; ++p) {
      const T ap = a[p];
      const T* b = B + std::size_t(p) * n;
      for (int j = 0; j < n; ++j) c[j] += ap * b[j];
    }
  }
}

template <typename T>
void gemm_tn_ref(const T* A, const T* B, T* C, int m, int k, int n, bool acc) {
  const std::size_t work = std::size_t(m) * k * n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (work > 200000)
#endif
  for (int i = 0; i < m; ++i) {
    T* c = C + std::size_t(i) * n;
    if (!acc)
      for (int j = 0; j < n; ++j) c[j] = T(0);
    for (int r = 0; r < k; ++r) {
      const T a = A[std::size_t(r) * m + i];
      const T* b = B + std::size_t(r) * n;
      for (int j = 0; j < n; ++j) c[j] += a * b[j];
    }
  }
}

template <typename T>
void gemm_nt_ref(const T* A, const T* B, T* C, int m, int k, int n, bool acc) {
  const std::size_t work = std::size_t(m) * k * n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (work > 200000)
#endif
  for (int i = 0; i < m; ++i) {
    const T* a = A + std::size_t(i) * k;
    T* c = C + std::size_t(i) * n;
    for (int j = 0; j < n; ++j) {
      const T* b = B + std::size_t(j) * k;
      T s = T(0);
      for (int p = 0; p < k; ++p) s += a[p] * b[p];
      c[j] = acc ? c[j] + s : s;
    }
  }
}

template <typename T>
void add_ref(const T* x, const T* y, T* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + y[i];
}

template <typename T>
void sub_ref(const T* x, const T* y, T* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] - y[i];
}

template <typename T>
void mul_ref(const T* x, const T* y, T* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

template <typename T>
void mul_acc_ref(T* dst, const T* x, const T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += x[i] * y[i];
}

template <typename T>
void axpy_ref(T a, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
void scale_ref(const T* x, T a, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
}

template <typename T>
void affine3_ref(const T* a, const T* x, const T* b, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * x[i] + b[i];
}

template <typename T>
T dot_ref(const T* x, const T* y, std::size_t n) {
  T s = T(0);
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

template <typename T>
T sum_ref(const T* x, std::size_t n) {
  T s = T(0);
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

// tanh-form gelu; the same formula is used by every kernel variant so the
// float and double instantiations agree up to rounding
template <typename T>
inline T gelu_one(T x) {
  const T c0 = T(0.7978845608028654);
  const T c1 = T(0.044715);
  const T t = std::tanh(c0 * (x + c1 * x * x * x));
  return T(0.5) * x * (T(1) + t);
}

template <typename T>
inline T gelu_grad_one(T x) {
  const T c0 = T(0.7978845608028654);
  const T c1 = T(0.044715);
  const T t = std::tanh(c0 * (x + c1 * x * x * x));
  const T du = c0 * (T(1) + T(3) * c1 * x * x);
  return T(0.5) * (T(1) + t) + T(0.5) * x * (T(1) - t * t) * du;
}

template <typename T>
void gelu_fwd_ref(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = gelu_one(x[i]);
}

template <typename T>
void gelu_bwd_acc_ref(const T* x, const T* gy, T* gx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) gx[i] += gy[i] * gelu_grad_one(x[i]);
}

template <typename T>
void sigmoid_fwd_ref(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = T(1) / (T(1) + std::exp(-x[i]));
}

template <typename T>
void sigmoid_bwd_acc_ref(const T* y, const T* gy, T* gx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) gx[i] += gy[i] * y[i] * (T(1) - y[i]);
}

template <typename T>
void dwconv_fwd_ref(const T* x, int H, int W, int C, const T* w, int k,
                    const T* bias, T* y) {
  const int p = k / 2;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (std::size_t(H) * W * C * k * k > 200000)
#endif
  for (int oy = 0; oy < H; ++oy) {
    for (int ox = 0; ox < W; ++ox) {
      T* out = y + (std::size_t(oy) * W + ox) * C;
      if (bias)
        std::memcpy(out, bias, sizeof(T) * C);
      else
        for (int c = 0; c < C; ++c) out[c] = T(0);
      for (int dy = 0; dy < k; ++dy) {
        const int iy = oy + dy - p;
        if (iy < 0 || iy >= H) continue;
        for (int dx = 0; dx < k; ++dx) {
          const int ix = ox + dx - p;
          if (ix < 0 || ix >= W) continue;
          const T* in = x + (std::size_t(iy) * W + ix) * C;
          const T* wt = w + (std::size_t(dy) * k + dx) * C;
          for (int c = 0; c < C; ++c) out[c] += in[c] * wt[c];
        }
      }
    }
  }
}

template <typename T>
void dwconv_bwd_data_acc_ref(const T* gy, int H, int W, int C, const T* w,
                             int k, T* gx) {
  const int p = k / 2;
  // gx[iy,ix] += sum over taps of gy[oy,ox] * w, with iy = oy+dy-p
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (std::size_t(H) * W * C * k * k > 200000)
#endif
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      T* gin = gx + (std::size_t(iy) * W + ix) * C;
      for (int dy = 0; dy < k; ++dy) {
        const int oy = iy - dy + p;
        if (oy < 0 || oy >= H) continue;
        for (int dx = 0; dx < k; ++dx) {
          const int ox = ix - dx + p;
          if (ox < 0 || ox >= W) continue;
          const T* gout = gy + (std::size_t(oy) * W + ox) * C;
          const T* wt = w + (std::size_t(dy) * k + dx) * C;
          for (int c = 0; c < C; ++c) gin[c] += gout[c] * wt[c];
        }
      }
    }
  }
}

template <typename T>
void dwconv_bwd_wb_acc_ref(const T* x, const T* gy, int H, int W, int C, int k,
                           T* gw, T* gb) {
  const int p = k / 2;
  for (int oy = 0; oy < H; ++oy) {
    for (int ox = 0; ox < W; ++ox) {
      const T* gout = gy + (std::size_t(oy) * W + ox) * C;
      if (gb)
        for (int c = 0; c < C; ++c) gb[c] += gout[c];
      if (!gw) continue;
      for (int dy = 0; dy < k; ++dy) {
        const int iy = oy + dy - p;
        if (iy < 0 || iy >= H) continue;
        for (int dx = 0; dx < k; ++dx) {
          const int ix = ox + dx - p;
          if (ix < 0 || ix >= W) continue;
          const T* in = x + (std::size_t(iy) * W + ix) * C;
          T* gwt = gw + (std::size_t(dy) * k + dx) * C;
          for (int c = 0; c < C; ++c) gwt[c] += gout[c] * in[c];
        }
      }
    }
  }
}

template <typename T>
void layernorm_fwd_ref(const T* x, int rows, int C, const T* gamma,
                       const T* beta, T eps, T* y, T* xhat, T* inv_std) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (std::size_t(rows) * C > 100000)
#endif
  for (int r = 0; r < rows; ++r) {
    const T* xr = x + std::size_t(r) * C;
    T* yr = y + std::size_t(r) * C;
    T* xh = xhat + std::size_t(r) * C;
    T mean = T(0);
    for (int c = 0; c < C; ++c) mean += xr[c];
    mean /= T(C);
    T var = T(0);
    for (int c = 0; c < C; ++c) {
      const T d = xr[c] - mean;
      var += d * d;
    }
    var /= T(C);
    const T inv = T(1) / std::sqrt(var + eps);
    inv_std[r] = inv;
    for (int c = 0; c < C; ++c) {
      xh[c] = (xr[c] - mean) * inv;
      yr[c] = xh[c] * gamma[c] + beta[c];
    }
  }
}

template <typename T>
void layernorm_bwd_acc_ref(const T* xhat, const T* inv_std, const T* gamma,
                           const T* gy, int rows, int C, T* gx, T* ggamma,
                           T* gbeta) {
  for (int r = 0; r < rows; ++r) {
    const T* xh = xhat + std::size_t(r) * C;
    const T* g = gy + std::size_t(r) * C;
    T* gxr = gx + std::size_t(r) * C;
    T sum_g = T(0), sum_gx = T(0);
    for (int c = 0; c < C; ++c) {
      const T gh = g[c] * gamma[c];
      sum_g += gh;
      sum_gx += gh * xh[c];
    }
    const T inv = inv_std[r];
    const T invC = T(1) / T(C);
    for (int c = 0; c < C; ++c) {
      const T gh = g[c] * gamma[c];
      gxr[c] += inv * (gh - invC * sum_g - xh[c] * invC * sum_gx);
    }
    if (ggamma)
      for (int c = 0; c < C; ++c) ggamma[c] += g[c] * xh[c];
    if (gbeta)
      for (int c = 0; c < C; ++c) gbeta[c] += g[c];
  }
}

template <typename T>
KernelSet<T> make_scalar_set() {
  KernelSet<T> ks;
  ks.name = "scalar";
  ks.gemm = &gemm_ref<T>;
  ks.gemm_tn = &gemm_tn_ref<T>;
  ks.gemm_nt = &gemm_nt_ref<T>;
  ks.add = &add_ref<T>;
  ks.sub = &sub_ref<T>;
  ks.mul = &mul_ref<T>;
  ks.mul_acc = &mul_acc_ref<T>;
  ks.axpy = &axpy_ref<T>;
  ks.scale = &scale_ref<T>;
  ks.affine3 = &affine3_ref<T>;
  ks.dot = &dot_ref<T>;
  ks.sum = &sum_ref<T>;
  ks.gelu_fwd = &gelu_fwd_ref<T>;
  ks.gelu_bwd_acc = &gelu_bwd_acc_ref<T>;
  ks.sigmoid_fwd = &sigmoid_fwd_ref<T>;
  ks.sigmoid_bwd_acc = &sigmoid_bwd_acc_ref<T>;
  ks.dwconv_fwd = &dwconv_fwd_ref<T>;
  ks.dwconv_bwd_data_acc = &dwconv_bwd_data_acc_ref<T>;
  ks.dwconv_bwd_wb_acc = &dwconv_bwd_wb_acc_ref<T>;
  ks.layernorm_fwd = &layernorm_fwd_ref<T>;
  ks.layernorm_bwd_acc = &layernorm_bwd_acc_ref<T>;
  return ks;
}

}  // namespace

template <typename T>
const KernelSet<T>& scalar_set() {
  static const KernelSet<T> ks = make_scalar_set<T>();
  return ks;
}

template const KernelSet<float>& scalar_set<float>();
template const KernelSet<double>& scalar_set<double>();

}  // namespace cyclir::kernels
