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

// AVX2/FMA float kernels. Semantics match the scalar reference set up to
// floating-point reassociation; tests/test_kernels.cpp pins the tolerance.

#include <cmath>
#include <cstring>

#include "cyclir/kernels/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace cyclir::kernels {
namespace {

inline float hsum8(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 sh = _mm_movehdup_ps(lo);
  __m128 s = _mm_add_ps(lo, sh);
  sh = _mm_movehl_ps(sh, s);
  s = _mm_add_ss(s, sh);
  return _mm_cvtss_f32(s);
}

// Cephes-style single precision exp, |rel err| ~ 1e-7 on [-87, 88].
inline __m256 exp256(__m256 x) {
  const __m256 hi = _mm256_set1_ps(88.3762626647950f);
  const __m256 lo = _mm256_set1_ps(-88.3762626647949f);
  const __m256 log2e = _mm256_set1_ps(1.44269504088896341f);
  const __m256 c1 = _mm256_set1_ps(0.693359375f);
  const __m256 c2 = _mm256_set1_ps(-2.12194440e-4f);
  const __m256 one = _mm256_set1_ps(1.0f);

  x = _mm256_max_ps(_mm256_min_ps(x, hi), lo);
  __m256 fx = _mm256_fmadd_ps(x, log2e, _mm256_set1_ps(0.5f));
  fx = _mm256_floor_ps(fx);
  x = _mm256_fnmadd_ps(fx, c1, x);
  x = _mm256_fnmadd_ps(fx, c2, x);

  __m256 y = _mm256_set1_ps(1.9875691500e-4f);
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.3981999507e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(8.3334519073e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(4.1665795894e-2f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.6666665459e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(5.0000001201e-1f));
  const __m256 z = _mm256_mul_ps(x, x);
  y = _mm256_fmadd_ps(y, z, _mm256_add_ps(x, one));

  __m256i e = _mm256_cvttps_epi32(fx);
  e = _mm256_add_epi32(e, _mm256_set1_epi32(0x7f));
  e = _mm256_slli_epi32(e, 23);
  return _mm256_mul_ps(y, _mm256_castsi256_ps(e));
}

// tanh(u) = 1 - 2 / (exp(2u) + 1)
inline __m256 tanh256(__m256 u) {
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 two = _mm256_set1_ps(2.0f);
  const __m256 e = exp256(_mm256_mul_ps(u, two));
  return _mm256_sub_ps(one, _mm256_div_ps(two, _mm256_add_ps(e, one)));
}

void gemm_avx2(const float* A, const float* B, float* C, int m, int k, int n,
               bool acc) {
  const std::size_t work = std::size_t(m) * k * n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (work > 200000)
#endif
  for (int i = 0; i < m; ++i) {
    float* c = C + std::size_t(i) * n;
    if (!acc) std::memset(c, 0, sizeof(float) * n);
    const float* a = A + std::size_t(i) * k;
    for (int p = 0; p < k; ++p) {
      const __m256 ap = _mm256_set1_ps(a[p]);
      const float* b = B + std::size_t(p) * n;
      int j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 cv = _mm256_loadu_ps(c + j);
        cv = _mm256_fmadd_ps(ap, _mm256_loadu_ps(b + j), cv);
        _mm256_storeu_ps(c + j, cv);
      }
      for (; j < n; ++j) c[j] += a[p] * b[j];
    }
  }
}

void gemm_tn_avx2(const float* A, const float* B, float* C, int m, int k,
                  int n, bool acc) {
  const std::size_t work = std::size_t(m) * k * n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (work > 200000)
#endif
  for (int i = 0; i < m; ++i) {
    float* c = C + std::size_t(i) * n;
    if (!acc) std::memset(c, 0, sizeof(float) * n);
    for (int r = 0; r < k; ++r) {
      const __m256 a = _mm256_set1_ps(A[std::size_t(r) * m + i]);
      const float* b = B + std::size_t(r) * n;
      int j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 cv = _mm256_loadu_ps(c + j);
        cv = _mm256_fmadd_ps(a, _mm256_loadu_ps(b + j), cv);
        _mm256_storeu_ps(c + j, cv);
      }
      for (; j < n; ++j) c[j] += A[std::size_t(r) * m + i] * b[j];
    }
  }
}

void gemm_nt_avx2(const float* A, const float* B, float* C, int m, int k,
                  int n, bool acc) {
  const std::size_t work = std::size_t(m) * k * n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (work > 200000)
#endif
  for (int i = 0; i < m; ++i) {
    const float* a = A + std::size_t(i) * k;
    float* c = C + std::size_t(i) * n;
    for (int j = 0; j < n; ++j) {
      const float* b = B + std::size_t(j) * k;
      __m256 accv = _mm256_setzero_ps();
      int p = 0;
      for (; p + 8 <= k; p += 8)
        accv = _mm256_fmadd_ps(_mm256_loadu_ps(a + p), _mm256_loadu_ps(b + p), accv);
      float s = hsum8(accv);
      for (; p < k; ++p) s += a[p] * b[p];
      c[j] = acc ? c[j] + s : s;
    }
  }
}

void add_avx2(const float* x, const float* y, float* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(z + i, _mm256_add_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) z[i] = x[i] + y[i];
}

void sub_avx2(const float* x, const float* y, float* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(z + i, _mm256_sub_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) z[i] = x[i] - y[i];
}

void mul_avx2(const float* x, const float* y, float* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(z + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

void mul_acc_avx2(float* dst, const float* x, const float* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 d = _mm256_loadu_ps(dst + i);
    d = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), d);
    _mm256_storeu_ps(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += x[i] * y[i];
}

void axpy_avx2(float a, const float* x, float* y, std::size_t n) {
  const __m256 av = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 yv = _mm256_loadu_ps(y + i);
    yv = _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), yv);
    _mm256_storeu_ps(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(const float* x, float a, float* y, std::size_t n) {
  const __m256 av = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_mul_ps(av, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) y[i] = a * x[i];
}

void affine3_avx2(const float* a, const float* x, const float* b, float* y,
                  std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(x + i),
                               _mm256_loadu_ps(b + i));
    _mm256_storeu_ps(y + i, v);
  }
  for (; i < n; ++i) y[i] = a[i] * x[i] + b[i];
}

float dot_avx2(const float* x, const float* y, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc);
  float s = hsum8(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

float sum_avx2(const float* x, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(x + i));
  float s = hsum8(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

inline __m256 gelu_u(__m256 x) {
  const __m256 c0 = _mm256_set1_ps(0.7978845608028654f);
  const __m256 c1 = _mm256_set1_ps(0.044715f);
  const __m256 x3 = _mm256_mul_ps(_mm256_mul_ps(x, x), x);
  return _mm256_mul_ps(c0, _mm256_fmadd_ps(c1, x3, x));
}

void gelu_fwd_avx2(const float* x, float* y, std::size_t n) {
  const __m256 half = _mm256_set1_ps(0.5f);
  const __m256 one = _mm256_set1_ps(1.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xv = _mm256_loadu_ps(x + i);
    const __m256 t = tanh256(gelu_u(xv));
    _mm256_storeu_ps(y + i, _mm256_mul_ps(_mm256_mul_ps(half, xv), _mm256_add_ps(one, t)));
  }
  for (; i < n; ++i) {
    const float xv = x[i];
    const float t = std::tanh(0.7978845608028654f * (xv + 0.044715f * xv * xv * xv));
    y[i] = 0.5f * xv * (1.0f + t);
  }
}

void gelu_bwd_acc_avx2(const float* x, const float* gy, float* gx, std::size_t n) {
  const __m256 half = _mm256_set1_ps(0.5f);
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 c0 = _mm256_set1_ps(0.7978845608028654f);
  const __m256 c3 = _mm256_set1_ps(3.0f * 0.044715f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xv = _mm256_loadu_ps(x + i);
    const __m256 t = tanh256(gelu_u(xv));
    const __m256 du = _mm256_mul_ps(c0, _mm256_fmadd_ps(c3, _mm256_mul_ps(xv, xv), one));
    const __m256 sech2 = _mm256_fnmadd_ps(t, t, one);  // 1 - t^2
    __m256 g = _mm256_mul_ps(half, _mm256_add_ps(one, t));
    g = _mm256_fmadd_ps(_mm256_mul_ps(half, xv), _mm256_mul_ps(sech2, du), g);
    __m256 acc = _mm256_loadu_ps(gx + i);
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(gy + i), g, acc);
    _mm256_storeu_ps(gx + i, acc);
  }
  for (; i < n; ++i) {
    const float xv = x[i];
    const float t = std::tanh(0.7978845608028654f * (xv + 0.044715f * xv * xv * xv));
    const float du = 0.7978845608028654f * (1.0f + 3.0f * 0.044715f * xv * xv);
    gx[i] += gy[i] * (0.5f * (1.0f + t) + 0.5f * xv * (1.0f - t * t) * du);
  }
}

void sigmoid_fwd_avx2(const float* x, float* y, std::size_t n) {
  const __m256 one = _mm256_set1_ps(1.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 e = exp256(_mm256_sub_ps(_mm256_setzero_ps(), _mm256_loadu_ps(x + i)));
    _mm256_storeu_ps(y + i, _mm256_div_ps(one, _mm256_add_ps(one, e)));
  }
  for (; i < n; ++i) y[i] = 1.0f / (1.0f + std::exp(-x[i]));
}

void sigmoid_bwd_acc_avx2(const float* y, const float* gy, float* gx, std::size_t n) {
  const __m256 one = _mm256_set1_ps(1.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 yv = _mm256_loadu_ps(y + i);
    const __m256 d = _mm256_mul_ps(yv, _mm256_sub_ps(one, yv));
    __m256 acc = _mm256_loadu_ps(gx + i);
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(gy + i), d, acc);
    _mm256_storeu_ps(gx + i, acc);
  }
  for (; i < n; ++i) gx[i] += gy[i] * y[i] * (1.0f - y[i]);
}

void dwconv_fwd_avx2(const float* x, int H, int W, int C, const float* w,
                     int k, const float* bias, float* y) {
  const int p = k / 2;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (std::size_t(H) * W * C * k * k > 200000)
#endif
  for (int oy = 0; oy < H; ++oy) {
    for (int ox = 0; ox < W; ++ox) {
      float* out = y + (std::size_t(oy) * W + ox) * C;
      if (bias)
        std::memcpy(out, bias, sizeof(float) * C);
      else
        std::memset(out, 0, sizeof(float) * C);
      for (int dy = 0; dy < k; ++dy) {
        const int iy = oy + dy - p;
        if (iy < 0 || iy >= H) continue;
        for (int dx = 0; dx < k; ++dx) {
          const int ix = ox + dx - p;
          if (ix < 0 || ix >= W) continue;
          const float* in = x + (std::size_t(iy) * W + ix) * C;
          const float* wt = w + (std::size_t(dy) * k + dx) * C;
          int c = 0;
          for (; c + 8 <= C; c += 8) {
            __m256 o = _mm256_loadu_ps(out + c);
            o = _mm256_fmadd_ps(_mm256_loadu_ps(in + c), _mm256_loadu_ps(wt + c), o);
            _mm256_storeu_ps(out + c, o);
          }
          for (; c < C; ++c) out[c] += in[c] * wt[c];
        }
      }
    }
  }
}

void dwconv_bwd_data_acc_avx2(const float* gy, int H, int W, int C,
                              const float* w, int k, float* gx) {
  const int p = k / 2;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (std::size_t(H) * W * C * k * k > 200000)
#endif
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      float* gin = gx + (std::size_t(iy) * W + ix) * C;
      for (int dy = 0; dy < k; ++dy) {
        const int oy = iy - dy + p;
        if (oy < 0 || oy >= H) continue;
        for (int dx = 0; dx < k; ++dx) {
          const int ox = ix - dx + p;
          if (ox < 0 || ox >= W) continue;
          const float* gout = gy + (std::size_t(oy) * W + ox) * C;
          const float* wt = w + (std::size_t(dy) * k + dx) * C;
          int c = 0;
          for (; c + 8 <= C; c += 8) {
            __m256 g = _mm256_loadu_ps(gin + c);
            g = _mm256_fmadd_ps(_mm256_loadu_ps(gout + c), _mm256_loadu_ps(wt + c), g);
            _mm256_storeu_ps(gin + c, g);
          }
          for (; c < C; ++c) gin[c] += gout[c] * wt[c];
        }
      }
    }
  }
}

void dwconv_bwd_wb_acc_avx2(const float* x, const float* gy, int H, int W,
                            int C, int k, float* gw, float* gb) {
  const int p = k / 2;
  for (int oy = 0; oy < H; ++oy) {
    for (int ox = 0; ox < W; ++ox) {
      const float* gout = gy + (std::size_t(oy) * W + ox) * C;
      if (gb) {
        int c = 0;
        for (; c + 8 <= C; c += 8)
          _mm256_storeu_ps(gb + c, _mm256_add_ps(_mm256_loadu_ps(gb + c),
                                                 _mm256_loadu_ps(gout + c)));
        for (; c < C; ++c) gb[c] += gout[c];
      }
      for (int dy = 0; dy < k; ++dy) {
        const int iy = oy + dy - p;
        if (iy < 0 || iy >= H) continue;
        for (int dx = 0; dx < k; ++dx) {
          const int ix = ox + dx - p;
          if (ix < 0 || ix >= W) continue;
          const float* in = x + (std::size_t(iy) * W + ix) * C;
          float* gwt = gw + (std::size_t(dy) * k + dx) * C;
          int c = 0;
          for (; c + 8 <= C; c += 8) {
            __m256 g = _mm256_loadu_ps(gwt + c);
            g = _mm256_fmadd_ps(_mm256_loadu_ps(gout + c), _mm256_loadu_ps(in + c), g);
            _mm256_storeu_ps(gwt + c, g);
          }
          for (; c < C; ++c) gwt[c] += gout[c] * in[c];
        }
      }
    }
  }
}

void layernorm_fwd_avx2(const float* x, int rows, int C, const float* gamma,
                        const float* beta, float eps, float* y, float* xhat,
                        float* inv_std) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (std::size_t(rows) * C > 100000)
#endif
  for (int r = 0; r < rows; ++r) {
    const float* xr = x + std::size_t(r) * C;
    float* yr = y + std::size_t(r) * C;
    float* xh = xhat + std::size_t(r) * C;
    const float mean = sum_avx2(xr, std::size_t(C)) / float(C);
    __m256 acc = _mm256_setzero_ps();
    const __m256 mv = _mm256_set1_ps(mean);
    int c = 0;
    for (; c + 8 <= C; c += 8) {
      const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(xr + c), mv);
      acc = _mm256_fmadd_ps(d, d, acc);
    }
    float var = hsum8(acc);
    for (; c < C; ++c) {
      const float d = xr[c] - mean;
      var += d * d;
    }
    var /= float(C);
    const float inv = 1.0f / std::sqrt(var + eps);
    inv_std[r] = inv;
    const __m256 iv = _mm256_set1_ps(inv);
    c = 0;
    for (; c + 8 <= C; c += 8) {
      const __m256 h = _mm256_mul_ps(_mm256_sub_ps(_mm256_loadu_ps(xr + c), mv), iv);
      _mm256_storeu_ps(xh + c, h);
      _mm256_storeu_ps(yr + c, _mm256_fmadd_ps(h, _mm256_loadu_ps(gamma + c),
                                               _mm256_loadu_ps(beta + c)));
    }
    for (; c < C; ++c) {
      xh[c] = (xr[c] - mean) * inv;
      yr[c] = xh[c] * gamma[c] + beta[c];
    }
  }
}

void layernorm_bwd_acc_avx2(const float* xhat, const float* inv_std,
                            const float* gamma, const float* gy, int rows,
                            int C, float* gx, float* ggamma, float* gbeta) {
  for (int r = 0; r < rows; ++r) {
    const float* xh = xhat + std::size_t(r) * C;
    const float* g = gy + std::size_t(r) * C;
    float* gxr = gx + std::size_t(r) * C;
    __m256 sg = _mm256_setzero_ps();
    __m256 sgx = _mm256_setzero_ps();
    int c = 0;
    for (; c + 8 <= C; c += 8) {
      const __m256 gh = _mm256_mul_ps(_mm256_loadu_ps(g + c), _mm256_loadu_ps(gamma + c));
      sg = _mm256_add_ps(sg, gh);
      sgx = _mm256_fmadd_ps(gh, _mm256_loadu_ps(xh + c), sgx);
    }
    float sum_g = hsum8(sg), sum_gx = hsum8(sgx);
    for (; c < C; ++c) {
      const float gh = g[c] * gamma[c];
      sum_g += gh;
      sum_gx += gh * xh[c];
    }
    const float inv = inv_std[r];
    const float invC = 1.0f / float(C);
    const __m256 a = _mm256_set1_ps(inv);
    const __m256 b1 = _mm256_set1_ps(invC * sum_g);
    const __m256 b2 = _mm256_set1_ps(invC * sum_gx);
    c = 0;
    for (; c + 8 <= C; c += 8) {
      const __m256 gh = _mm256_mul_ps(_mm256_loadu_ps(g + c), _mm256_loadu_ps(gamma + c));
      __m256 t = _mm256_sub_ps(gh, b1);
      t = _mm256_fnmadd_ps(_mm256_loadu_ps(xh + c), b2, t);
      __m256 o = _mm256_loadu_ps(gxr + c);
      _mm256_storeu_ps(gxr + c, _mm256_fmadd_ps(a, t, o));
    }
    for (; c < C; ++c) {
      const float gh = g[c] * gamma[c];
      gxr[c] += inv * (gh - invC * sum_g - xh[c] * invC * sum_gx);
    }
    if (ggamma) {
      c = 0;
      for (; c + 8 <= C; c += 8) {
        __m256 o = _mm256_loadu_ps(ggamma + c);
        o = _mm256_fmadd_ps(_mm256_loadu_ps(g + c), _mm256_loadu_ps(xh + c), o);
        _mm256_storeu_ps(ggamma + c, o);
      }
      for (; c < C; ++c) ggamma[c] += g[c] * xh[c];
    }
    if (gbeta) {
      c = 0;
      for (; c + 8 <= C; c += 8)
        _mm256_storeu_ps(gbeta + c, _mm256_add_ps(_mm256_loadu_ps(gbeta + c),
                                                  _mm256_loadu_ps(g + c)));
      for (; c < C; ++c) gbeta[c] += g[c];
    }
  }
}

KernelSet<float> make_avx2_set() {
  KernelSet<float> ks;
  ks.name = "avx2";
  ks.gemm = &gemm_avx2;
  ks.gemm_tn = &gemm_tn_avx2;
  ks.gemm_nt = &gemm_nt_avx2;
  ks.add = &add_avx2;
  ks.sub = &sub_avx2;
  ks.mul = &mul_avx2;
  ks.mul_acc = &mul_acc_avx2;
  ks.axpy = &axpy_avx2;
  ks.scale = &scale_avx2;
  ks.affine3 = &affine3_avx2;
  ks.dot = &dot_avx2;
  ks.sum = &sum_avx2;
  ks.gelu_fwd = &gelu_fwd_avx2;
  ks.gelu_bwd_acc = &gelu_bwd_acc_avx2;
  ks.sigmoid_fwd = &sigmoid_fwd_avx2;
  ks.sigmoid_bwd_acc = &sigmoid_bwd_acc_avx2;
  ks.dwconv_fwd = &dwconv_fwd_avx2;
  ks.dwconv_bwd_data_acc = &dwconv_bwd_data_acc_avx2;
  ks.dwconv_bwd_wb_acc = &dwconv_bwd_wb_acc_avx2;
  ks.layernorm_fwd = &layernorm_fwd_avx2;
  ks.layernorm_bwd_acc = &layernorm_bwd_acc_avx2;
  return ks;
}

}  // namespace

const KernelSet<float>& avx2_set() {
  static const KernelSet<float> ks = make_avx2_set();
  return ks;
}

}  // namespace cyclir::kernels

#else  // no AVX2 at compile time: fall back to the scalar table

namespace cyclir::kernels {

const KernelSet<float>& avx2_set() { return scalar_set<float>(); }

}  // namespace cyclir::kernels

#endif
