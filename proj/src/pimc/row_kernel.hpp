#pragma once

// With AVX-512 the inverse distance is rsqrt14 refined by one Newton step
// (relative error below 1e-8), evaluated identically in every code path.

#include <algorithm>
#include <cmath>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace polaron::pimc::detail {

// 1/max(|p - x_b|, cap) for b < n, written to out; returns sum_b w[b]*(out[b] - old[b]).
// old may be null, in which case the weighted sum of out is returned.
inline double inverse_row(double px, double py, double pz, const double* x, const double* y,
                          const double* z, int n, double cap, const double* w, const double* old,
                          double* out) {
#if defined(__AVX512F__)
  const __m512d vx = _mm512_set1_pd(px);
  const __m512d vy = _mm512_set1_pd(py);
  const __m512d vz = _mm512_set1_pd(pz);
  const __m512d c2 = _mm512_set1_pd(cap * cap);
  const __m512d half = _mm512_set1_pd(0.5);
  const __m512d three_half = _mm512_set1_pd(1.5);
  __m512d acc = _mm512_setzero_pd();
  for (int b = 0; b < n; b += 8) {
    const int left = n - b;
    const __mmask8 m = left >= 8 ? __mmask8(0xff) : __mmask8((1u << left) - 1u);
    const __m512d dx = _mm512_sub_pd(_mm512_maskz_loadu_pd(m, x + b), vx);
    const __m512d dy = _mm512_sub_pd(_mm512_maskz_loadu_pd(m, y + b), vy);
    const __m512d dz = _mm512_sub_pd(_mm512_maskz_loadu_pd(m, z + b), vz);
    __m512d r2 = _mm512_fmadd_pd(dz, dz, _mm512_fmadd_pd(dy, dy, _mm512_mul_pd(dx, dx)));
    r2 = _mm512_max_pd(r2, c2);
    const __m512d h = _mm512_mul_pd(half, r2);
    __m512d inv = _mm512_rsqrt14_pd(r2);
    inv = _mm512_mul_pd(inv, _mm512_fnmadd_pd(h, _mm512_mul_pd(inv, inv), three_half));
    _mm512_mask_storeu_pd(out + b, m, inv);
    __m512d d = inv;
    if (old) d = _mm512_sub_pd(inv, _mm512_maskz_loadu_pd(m, old + b));
    acc = _mm512_mask3_fmadd_pd(_mm512_maskz_loadu_pd(m, w + b), d, acc, m);
  }
  return _mm512_reduce_add_pd(acc);
#else
  const double c2 = cap * cap;
  double acc = 0.0;
  for (int b = 0; b < n; ++b) {
    const double dx = x[b] - px, dy = y[b] - py, dz = z[b] - pz;
    const double inv = 1.0 / std::sqrt(std::max(dx * dx + dy * dy + dz * dz, c2));
    out[b] = inv;
    acc += w[b] * (old ? inv - old[b] : inv);
  }
  return acc;
#endif
}

// sum_b w[b] * (1/max(|pn - x_b|, cap) - 1/max(|po - x_b|, cap)).
inline double inverse_row_delta(const double* pn, const double* po, const double* x,
                                const double* y, const double* z, int n, double cap,
                                const double* w) {
#if defined(__AVX512F__)
  const __m512d nx = _mm512_set1_pd(pn[0]), ny = _mm512_set1_pd(pn[1]), nz = _mm512_set1_pd(pn[2]);
  const __m512d ox = _mm512_set1_pd(po[0]), oy = _mm512_set1_pd(po[1]), oz = _mm512_set1_pd(po[2]);
  const __m512d c2 = _mm512_set1_pd(cap * cap);
  const __m512d half = _mm512_set1_pd(0.5);
  const __m512d three_half = _mm512_set1_pd(1.5);
  auto inv_sqrt = [&](__m512d r2) {
    r2 = _mm512_max_pd(r2, c2);
    const __m512d h = _mm512_mul_pd(half, r2);
    __m512d v = _mm512_rsqrt14_pd(r2);
    return _mm512_mul_pd(v, _mm512_fnmadd_pd(h, _mm512_mul_pd(v, v), three_half));
  };
  __m512d acc = _mm512_setzero_pd();
  for (int b = 0; b < n; b += 8) {
    const int left = n - b;
    const __mmask8 m = left >= 8 ? __mmask8(0xff) : __mmask8((1u << left) - 1u);
    const __m512d xb = _mm512_maskz_loadu_pd(m, x + b);
    const __m512d yb = _mm512_maskz_loadu_pd(m, y + b);
    const __m512d zb = _mm512_maskz_loadu_pd(m, z + b);
    __m512d dx = _mm512_sub_pd(xb, nx), dy = _mm512_sub_pd(yb, ny), dz = _mm512_sub_pd(zb, nz);
    const __m512d a = inv_sqrt(_mm512_fmadd_pd(dz, dz, _mm512_fmadd_pd(dy, dy, _mm512_mul_pd(dx, dx))));
    dx = _mm512_sub_pd(xb, ox);
    dy = _mm512_sub_pd(yb, oy);
    dz = _mm512_sub_pd(zb, oz);
    const __m512d o = inv_sqrt(_mm512_fmadd_pd(dz, dz, _mm512_fmadd_pd(dy, dy, _mm512_mul_pd(dx, dx))));
    acc = _mm512_mask3_fmadd_pd(_mm512_maskz_loadu_pd(m, w + b), _mm512_sub_pd(a, o), acc, m);
  }
  return _mm512_reduce_add_pd(acc);
#else
  const double c2 = cap * cap;
  double acc = 0.0;
  for (int b = 0; b < n; ++b) {
    double dx = x[b] - pn[0], dy = y[b] - pn[1], dz = z[b] - pn[2];
    const double a = 1.0 / std::sqrt(std::max(dx * dx + dy * dy + dz * dz, c2));
    dx = x[b] - po[0];
    dy = y[b] - po[1];
    dz = z[b] - po[2];
    const double o = 1.0 / std::sqrt(std::max(dx * dx + dy * dy + dz * dz, c2));
    acc += w[b] * (a - o);
  }
  return acc;
#endif
}

// Scalar counterpart of the vector lanes above.
inline double capped_inverse(double dx, double dy, double dz, double cap) {
#if defined(__AVX512F__)
  const __m128d r2 = _mm_set_sd(std::max(dx * dx + dy * dy + dz * dz, cap * cap));
  double v = _mm_cvtsd_f64(_mm_rsqrt14_sd(r2, r2));
  const double h = 0.5 * _mm_cvtsd_f64(r2);
  return v * (1.5 - h * v * v);
#else
  return 1.0 / std::sqrt(std::max(dx * dx + dy * dy + dz * dz, cap * cap));
#endif
}

}  // namespace polaron::pimc::detail
