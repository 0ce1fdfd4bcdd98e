// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 only (no -mfma): every lane performs exactly the
// scalar operation sequence so the distance kernels match bit for bit.

#include "contrail/simd/kernels.hpp"

#include <immintrin.h>

#include <limits>

namespace contrail::simd::avx2 {

namespace {

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_min_sd(lo, hi));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, hi));
}

template <bool ThreeD>
inline __m256d sq_dist4(const CoordsView& p, std::size_t i, __m256d qx, __m256d qy, __m256d qz) {
  const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(p.x + i), qx);
  const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(p.y + i), qy);
  __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
  if constexpr (ThreeD) {
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(p.z + i), qz);
    d = _mm256_add_pd(d, _mm256_mul_pd(dz, dz));
  }
  return d;
}

template <bool ThreeD, bool Min>
double extreme_sq_distance(CoordsView p, double qx, double qy, double qz) {
  const __m256d vx = _mm256_set1_pd(qx);
  const __m256d vy = _mm256_set1_pd(qy);
  const __m256d vz = _mm256_set1_pd(qz);
  const double init = Min ? std::numeric_limits<double>::infinity() : 0.0;
  __m256d acc = _mm256_set1_pd(init);
  const std::size_t end = p.n & ~std::size_t{3};
  for (std::size_t i = 0; i < end; i += 4) {
    const __m256d d = sq_dist4<ThreeD>(p, i, vx, vy, vz);
    acc = Min ? _mm256_min_pd(acc, d) : _mm256_max_pd(acc, d);
  }
  double best = Min ? hmin(acc) : hmax(acc);
  for (std::size_t i = end; i < p.n; ++i) {
    const double dx = p.x[i] - qx;
    const double dy = p.y[i] - qy;
    double d = dx * dx + dy * dy;
    if constexpr (ThreeD) {
      const double dz = p.z[i] - qz;
      d = d + dz * dz;
    }
    if (Min ? d < best : d > best) best = d;
  }
  return best;
}

}  // namespace

double min_sq_distance(CoordsView pts, double qx, double qy, double qz) {
  return pts.z ? extreme_sq_distance<true, true>(pts, qx, qy, qz)
               : extreme_sq_distance<false, true>(pts, qx, qy, qz);
}

double max_sq_distance(CoordsView pts, double qx, double qy, double qz) {
  return pts.z ? extreme_sq_distance<true, false>(pts, qx, qy, qz)
               : extreme_sq_distance<false, false>(pts, qx, qy, qz);
}

double sum_cubes(const double* d, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  const std::size_t end = n & ~std::size_t{7};
  for (std::size_t i = 0; i < end; i += 8) {
    const __m256d a = _mm256_loadu_pd(d + i);
    const __m256d b = _mm256_loadu_pd(d + i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_mul_pd(a, a), a));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_mul_pd(b, b), b));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (std::size_t i = end; i < n; ++i) s += d[i] * d[i] * d[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const std::size_t end = n & ~std::size_t{3};
  for (std::size_t i = 0; i < end; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (std::size_t i = end; i < n; ++i) y[i] += a * x[i];
}

}  // namespace contrail::simd::avx2
