/* Copyright 2026 The concaflow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "concaflow/kernels.hpp"

#include <cstdlib>
#include <string>

#include "concaflow/common.hpp"

namespace concaflow::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(CONCAFLOW_HAVE_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend resolve_backend() {
  const char* env = std::getenv("CONCAFLOW_SIMD");
  const std::string mode = env ? env : "auto";
  if (mode == "scalar") return Backend::Scalar;
  if (mode == "avx2") {
#ifdef CONCAFLOW_HAVE_AVX2
    if (cpu_has_avx2()) return Backend::Avx2;
#endif
    throw ConfigError("CONCAFLOW_SIMD=avx2 requested but AVX2 is unavailable");
  }
  if (mode != "auto")
    throw ConfigError("CONCAFLOW_SIMD: expected scalar, avx2, or auto");
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend b = resolve_backend();
  return b;
}

const char* backend_name() {
  return active_backend() == Backend::Avx2 ? "avx2" : "scalar";
}

SweepResult concave_pair_sweep(const double* g, std::int64_t n,
                               std::int64_t gap) {
#ifdef CONCAFLOW_HAVE_AVX2
  if (active_backend() == Backend::Avx2)
    return avx2::concave_pair_sweep(g, n, gap);
#endif
  return scalar::concave_pair_sweep(g, n, gap);
}

SweepResult concave_pair_sweep_rel(const double* g, std::int64_t n,
                                   std::int64_t gap) {
#ifdef CONCAFLOW_HAVE_AVX2
  if (active_backend() == Backend::Avx2)
    return avx2::concave_pair_sweep_rel(g, n, gap);
#endif
  return scalar::concave_pair_sweep_rel(g, n, gap);
}

SweepResult quasi_pair_sweep(const double* u, std::int64_t n,
                             std::int64_t gap) {
#ifdef CONCAFLOW_HAVE_AVX2
  if (active_backend() == Backend::Avx2)
    return avx2::quasi_pair_sweep(u, n, gap);
#endif
  return scalar::quasi_pair_sweep(u, n, gap);
}

void convolve_taps(const double* src, std::int64_t n, const double* taps,
                   std::int64_t m, double* dst) {
#ifdef CONCAFLOW_HAVE_AVX2
  if (active_backend() == Backend::Avx2)
    return avx2::convolve_taps(src, n, taps, m, dst);
#endif
  return scalar::convolve_taps(src, n, taps, m, dst);
}

void outer_product(const double* a, std::int64_t na, const double* b,
                   std::int64_t nb, double* dst) {
#ifdef CONCAFLOW_HAVE_AVX2
  if (active_backend() == Backend::Avx2)
    return avx2::outer_product(a, na, b, nb, dst);
#endif
  return scalar::outer_product(a, na, b, nb, dst);
}

}  // namespace concaflow::kernels
