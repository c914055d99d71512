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

#ifndef CYCLIR_KERNELS_KERNELS_HPP
#define CYCLIR_KERNELS_KERNELS_HPP

#include <cstddef>
#include <string>

namespace cyclir::kernels {

/// Table of arithmetic inner-loop kernels. There is a scalar reference
/// implementation for every entry and an AVX2 variant for float; the active
/// table is picked once at startup (see select()) so a whole run uses one
/// consistent accumulation order, keeping seeded runs bit-reproducible.
///
/// Conventions:
///   - matrices are dense row-major
///   - `acc == false` overwrites the destination, `acc == true` adds into it
///   - `_acc` suffixed entries always accumulate (gradient sinks)
template <typename T>
struct KernelSet {
  const char* name;

  // C[m,n] = A[m,k] * B[k,n]
  void (*gemm)(const T* A, const T* B, T* C, int m, int k, int n, bool acc);
  // C[m,n] = A[k,m]^T * B[k,n]
  void (*gemm_tn)(const T* A, const T* B, T* C, int m, int k, int n, bool acc);
  // C[m,n] = A[m,k] * B[n,k]^T
  void (*gemm_nt)(const T* A, const T* B, T* C, int m, int k, int n, bool acc);

  void (*add)(const T* x, const T* y, T* z, std::size_t n);   // z = x + y
  void (*sub)(const T* x, const T* y, T* z, std::size_t n);   // z = x - y
  void (*mul)(const T* x, const T* y, T* z, std::size_t n);   // z = x ⊙ y
  void (*mul_acc)(T* dst, const T* x, const T* y, std::size_t n);  // dst += x ⊙ y
  void (*axpy)(T a, const T* x, T* y, std::size_t n);         // y += a·x
  void (*scale)(const T* x, T a, T* y, std::size_t n);        // y = a·x
  // y = a ⊙ x + b  (elementwise affine modulation)
  void (*affine3)(const T* a, const T* x, const T* b, T* y, std::size_t n);
  T (*dot)(const T* x, const T* y, std::size_t n);
  T (*sum)(const T* x, std::size_t n);

  void (*gelu_fwd)(const T* x, T* y, std::size_t n);
  void (*gelu_bwd_acc)(const T* x, const T* gy, T* gx, std::size_t n);
  void (*sigmoid_fwd)(const T* x, T* y, std::size_t n);
  // gx += gy ⊙ y ⊙ (1-y), from the forward output y
  void (*sigmoid_bwd_acc)(const T* y, const T* gy, T* gx, std::size_t n);

  // Depthwise conv, stride 1, zero padding k/2, NHWC layout, weights [k,k,C].
  void (*dwconv_fwd)(const T* x, int H, int W, int C, const T* w, int k,
                     const T* bias, T* y);
  void (*dwconv_bwd_data_acc)(const T* gy, int H, int W, int C, const T* w,
                              int k, T* gx);
  void (*dwconv_bwd_wb_acc)(const T* x, const T* gy, int H, int W, int C,
                            int k, T* gw, T* gb);

  // Layer norm over the innermost dimension, one row per spatial position.
  // xhat and inv_std are saved for the backward pass.
  void (*layernorm_fwd)(const T* x, int rows, int C, const T* gamma,
                        const T* beta, T eps, T* y, T* xhat, T* inv_std);
  void (*layernorm_bwd_acc)(const T* xhat, const T* inv_std, const T* gamma,
                            const T* gy, int rows, int C, T* gx, T* ggamma,
                            T* gbeta);
};

template <typename T>
const KernelSet<T>& scalar_set();

/// AVX2 float table; null-named stub when built without AVX2 support.
const KernelSet<float>& avx2_set();
bool cpu_supports_avx2();

enum class Choice { Auto, Scalar, Avx2 };

/// Selects the process-wide float kernel table. Auto picks AVX2 when the CPU
/// supports it. The CYCLIR_KERNELS env var (scalar|avx2|auto) overrides Auto.
void select(Choice choice);
Choice parse_choice(const std::string& name);

template <typename T>
const KernelSet<T>& active();

const char* active_name();

}  // namespace cyclir::kernels

#endif  // CYCLIR_KERNELS_KERNELS_HPP
