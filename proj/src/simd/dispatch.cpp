// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/simd/kernels.hpp"

#include <cstdlib>
#include <string>

#include "contrail/error.hpp"

namespace contrail::simd {

std::string_view to_string(Backend b) noexcept {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

bool avx2_available() noexcept {
#if defined(CONTRAIL_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

constexpr KernelTable kScalar{&scalar::min_sq_distance, &scalar::max_sq_distance, &scalar::sum_cubes,
                              &scalar::axpy};

#if defined(CONTRAIL_HAVE_AVX2)
constexpr KernelTable kAvx2{&avx2::min_sq_distance, &avx2::max_sq_distance, &avx2::sum_cubes, &avx2::axpy};
#endif

Backend detect() {
  if (const char* env = std::getenv("CONTRAIL_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Backend::scalar;
    if (want == "avx2" && avx2_available()) return Backend::avx2;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

Backend& selected() {
  static Backend b = detect();
  return b;
}

}  // namespace

const KernelTable& table_for(Backend b) {
  if (b == Backend::avx2) {
#if defined(CONTRAIL_HAVE_AVX2)
    if (avx2_available()) return kAvx2;
#endif
    throw Error(ErrorKind::InvalidArgument, "avx2 kernels unavailable on this host");
  }
  return kScalar;
}

const KernelTable& kernels() { return table_for(selected()); }

Backend active_backend() { return selected(); }

void force_backend(Backend b) {
  (void)table_for(b);
  selected() = b;
}

}  // namespace contrail::simd
