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

// Scalar reference kernels.  This translation unit is built with
// -ffp-contract=off; the pair sweeps are the ground truth the AVX2 variant
// must reproduce bit for bit.

#include <algorithm>
#include <cmath>
#include <limits>

#include "concaflow/kernels.hpp"

namespace concaflow::kernels::scalar {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

inline double concave_candidate(double gl, double gm, double gr) {
  if (gl == kNegInf || gr == kNegInf) return kNegInf;
  if (gm == kNegInf) return kPosInf;
  if (gm == kPosInf) return kNegInf;
  return 0.5 * (gl + gr) - gm;
}
}  // namespace

SweepResult concave_pair_sweep(const double* g, std::int64_t n,
                               std::int64_t gap) {
  SweepResult r{kNegInf, -1};
  const std::int64_t nc = n - 2 * gap;
  for (std::int64_t i = 0; i < nc; ++i) {
    const double c = concave_candidate(g[i], g[i + gap], g[i + 2 * gap]);
    if (c > r.violation) {
      r.violation = c;
      r.index = i;
    }
  }
  return r;
}

SweepResult concave_pair_sweep_rel(const double* g, std::int64_t n,
                                   std::int64_t gap) {
  SweepResult r{kNegInf, -1};
  const std::int64_t nc = n - 2 * gap;
  for (std::int64_t i = 0; i < nc; ++i) {
    const double gm = g[i + gap];
    double c = concave_candidate(g[i], gm, g[i + 2 * gap]);
    if (std::isfinite(c)) c /= std::max(1.0, std::fabs(gm));
    if (c > r.violation) {
      r.violation = c;
      r.index = i;
    }
  }
  return r;
}

SweepResult quasi_pair_sweep(const double* u, std::int64_t n,
                             std::int64_t gap) {
  SweepResult r{kNegInf, -1};
  const std::int64_t nc = n - 2 * gap;
  for (std::int64_t i = 0; i < nc; ++i) {
    const double lo = std::min(u[i], u[i + 2 * gap]);
    const double c = lo - u[i + gap];
    if (c > r.violation) {
      r.violation = c;
      r.index = i;
    }
  }
  return r;
}

void convolve_taps(const double* src, std::int64_t n, const double* taps,
                   std::int64_t m, double* dst) {
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t k0 = std::max<std::int64_t>(-m, -i);
    const std::int64_t k1 = std::min<std::int64_t>(m, n - 1 - i);
    double acc = 0.0;
    for (std::int64_t k = k0; k <= k1; ++k) acc += src[i + k] * taps[m + k];
    dst[i] = acc;
  }
}

void outer_product(const double* a, std::int64_t na, const double* b,
                   std::int64_t nb, double* dst) {
  for (std::int64_t i = 0; i < na; ++i) {
    const double ai = a[i];
    double* row = dst + i * nb;
    for (std::int64_t j = 0; j < nb; ++j) row[j] = ai * b[j];
  }
}

}  // namespace concaflow::kernels::scalar
