// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Data-parallel inner loops shared by the geometry, similarity and volume
// code. Each kernel has a scalar reference implementation and, on x86-64, an
// AVX2 variant; the variant is chosen once at runtime from CPUID and can be
// pinned with CONTRAIL_SIMD=scalar|avx2.
//
// Distance kernels and axpy produce bitwise-identical results on every
// backend (same operation order, no FMA). Reductions that sum (sum_cubes)
// agree to rounding only.

#include <cstddef>
#include <string_view>

namespace contrail::simd {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend b) noexcept;

/// Structure-of-arrays view of a point set. `z` is null for planar sets.
struct CoordsView {
  const double* x = nullptr;
  const double* y = nullptr;
  const double* z = nullptr;
  std::size_t n = 0;
};

struct KernelTable {
  /// min over i of |p_i - q|^2
  double (*min_sq_distance)(CoordsView pts, double qx, double qy, double qz);
  /// max over i of |p_i - q|^2
  double (*max_sq_distance)(CoordsView pts, double qx, double qy, double qz);
  /// sum of d_i^3
  double (*sum_cubes)(const double* d, std::size_t n);
  /// y_i += a * x_i
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

namespace scalar {
double min_sq_distance(CoordsView pts, double qx, double qy, double qz);
double max_sq_distance(CoordsView pts, double qx, double qy, double qz);
double sum_cubes(const double* d, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double min_sq_distance(CoordsView pts, double qx, double qy, double qz);
double max_sq_distance(CoordsView pts, double qx, double qy, double qz);
double sum_cubes(const double* d, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace avx2

/// True when the AVX2 variants were compiled in and the CPU reports AVX2.
bool avx2_available() noexcept;

const KernelTable& table_for(Backend b);

/// The process-wide table (resolved on first use).
const KernelTable& kernels();
Backend active_backend();

/// Test hook: overrides the process-wide selection. Not thread-safe.
void force_backend(Backend b);

}  // namespace contrail::simd
