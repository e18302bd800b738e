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

#ifndef CONCAFLOW_KERNELS_HPP
#define CONCAFLOW_KERNELS_HPP

#include <cstdint>

// Hot inner loops of the concavity sweeps and the convolution solver.
// Every kernel has a scalar reference implementation and (on x86-64) an
// AVX2 variant selected at runtime; CONCAFLOW_SIMD=scalar|avx2|auto
// overrides the automatic choice.
//
// The pair-sweep kernels are compiled with floating-point contraction off
// in both variants and use the identical operation sequence, so their
// results are bitwise equal — verdicts must not depend on the machine.
// The convolution kernel uses FMA in the AVX2 variant and is equivalence-
// tested to a relative tolerance instead.

namespace concaflow::kernels {

struct SweepResult {
  double violation;    // max over candidates; -inf when no candidate
  std::int64_t index;  // first (lowest) candidate index attaining it, -1 if none
};

// Midpoint concavity sweep over a contiguous line g[0..n): for each
// i < n-2*gap the candidate is 0.5*(g[i]+g[i+2*gap]) - g[i+gap], with the
// conventions: either endpoint -inf => candidate -inf (the inequality holds
// automatically); midpoint -inf under finite endpoints => +inf (hard
// violation); midpoint +inf => -inf.  Positive candidates are concavity
// violations.
SweepResult concave_pair_sweep(const double* g, std::int64_t n,
                               std::int64_t gap);

// Same, with each candidate divided by the local scale max(1, |g[i+gap]|);
// used by the analytic J-window tests whose tolerance is relative.
SweepResult concave_pair_sweep_rel(const double* g, std::int64_t n,
                                   std::int64_t gap);

// Quasi-concavity sweep: candidate min(u[i], u[i+2*gap]) - u[i+gap] for
// finite nonnegative u.
SweepResult quasi_pair_sweep(const double* u, std::int64_t n,
                             std::int64_t gap);

// dst[i] = sum_{k=-m..m} src[i+k] * taps[m+k], treating src as zero outside
// [0, n).  dst and src must not alias.
void convolve_taps(const double* src, std::int64_t n, const double* taps,
                   std::int64_t m, double* dst);

// dst[i*nb + j] = a[i] * b[j].
void outer_product(const double* a, std::int64_t na, const double* b,
                   std::int64_t nb, double* dst);

enum class Backend { Scalar, Avx2 };

// Resolved once per process from CONCAFLOW_SIMD and CPU support.
Backend active_backend();
const char* backend_name();

// Direct access to both variants for equivalence tests.
namespace scalar {
SweepResult concave_pair_sweep(const double* g, std::int64_t n, std::int64_t gap);
SweepResult concave_pair_sweep_rel(const double* g, std::int64_t n, std::int64_t gap);
SweepResult quasi_pair_sweep(const double* u, std::int64_t n, std::int64_t gap);
void convolve_taps(const double* src, std::int64_t n, const double* taps,
                   std::int64_t m, double* dst);
void outer_product(const double* a, std::int64_t na, const double* b,
                   std::int64_t nb, double* dst);
}  // namespace scalar

#ifdef CONCAFLOW_HAVE_AVX2
namespace avx2 {
SweepResult concave_pair_sweep(const double* g, std::int64_t n, std::int64_t gap);
SweepResult concave_pair_sweep_rel(const double* g, std::int64_t n, std::int64_t gap);
SweepResult quasi_pair_sweep(const double* u, std::int64_t n, std::int64_t gap);
void convolve_taps(const double* src, std::int64_t n, const double* taps,
                   std::int64_t m, double* dst);
void outer_product(const double* a, std::int64_t na, const double* b,
                   std::int64_t nb, double* dst);
}  // namespace avx2
#endif

}  // namespace concaflow::kernels

#endif  // CONCAFLOW_KERNELS_HPP
