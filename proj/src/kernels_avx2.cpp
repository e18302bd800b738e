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

// AVX2 kernel variants.  Pair sweeps mirror the scalar operation sequence
// exactly (add, halve, subtract, compare — no FMA) and are bitwise equal to
// the reference; the tie-break across lanes picks the lowest index so the
// reported witness is machine-independent.  The convolution uses FMA and is
// tolerance-equivalent instead.

#ifdef CONCAFLOW_HAVE_AVX2

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "concaflow/kernels.hpp"

namespace concaflow::kernels::avx2 {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

inline double scalar_concave_candidate(double gl, double gm, double gr) {
  if (gl == kNegInf || gr == kNegInf) return kNegInf;
  if (gm == kNegInf) return kPosInf;
  if (gm == kPosInf) return kNegInf;
  return 0.5 * (gl + gr) - gm;
}

// Four concavity candidates with the -inf/+inf masking conventions.
inline __m256d candidate4(__m256d gl, __m256d gm, __m256d gr) {
  const __m256d ninf = _mm256_set1_pd(kNegInf);
  const __m256d pinf = _mm256_set1_pd(kPosInf);
  const __m256d half = _mm256_set1_pd(0.5);
  __m256d c = _mm256_sub_pd(_mm256_mul_pd(half, _mm256_add_pd(gl, gr)), gm);
  c = _mm256_blendv_pd(c, pinf, _mm256_cmp_pd(gm, ninf, _CMP_EQ_OQ));
  c = _mm256_blendv_pd(c, ninf, _mm256_cmp_pd(gm, pinf, _CMP_EQ_OQ));
  const __m256d end_ninf = _mm256_or_pd(_mm256_cmp_pd(gl, ninf, _CMP_EQ_OQ),
                                        _mm256_cmp_pd(gr, ninf, _CMP_EQ_OQ));
  return _mm256_blendv_pd(c, ninf, end_ninf);
}

// Merges 4 lane maxima into the global (value, first index) result; lanes
// hold index -1 where they never saw a candidate above -inf.
inline SweepResult merge_lanes(__m256d best, __m256i bestIdx,
                               SweepResult tail_seed) {
  alignas(32) double v[4];
  alignas(32) std::int64_t ix[4];
  _mm256_store_pd(v, best);
  _mm256_store_si256(reinterpret_cast<__m256i*>(ix), bestIdx);
  SweepResult r = tail_seed;
  for (int l = 0; l < 4; ++l) {
    if (v[l] > r.violation ||
        (v[l] == r.violation && ix[l] >= 0 &&
         (r.index < 0 || ix[l] < r.index))) {
      r.violation = v[l];
      r.index = ix[l];
    }
  }
  return r;
}

template <class CandFn, class ScalarFn>
SweepResult sweep_impl(const double* g, std::int64_t n, std::int64_t gap,
                       CandFn cand4, ScalarFn cand1) {
  SweepResult r{kNegInf, -1};
  const std::int64_t nc = n - 2 * gap;
  if (nc <= 0) return r;
  __m256d best = _mm256_set1_pd(kNegInf);
  __m256i bestIdx = _mm256_set1_epi64x(-1);
  const __m256i lane0 = _mm256_setr_epi64x(0, 1, 2, 3);
  std::int64_t i = 0;
  for (; i + 4 <= nc; i += 4) {
    const __m256d gl = _mm256_loadu_pd(g + i);
    const __m256d gm = _mm256_loadu_pd(g + i + gap);
    const __m256d gr = _mm256_loadu_pd(g + i + 2 * gap);
    const __m256d c = cand4(gl, gm, gr);
    const __m256d gt = _mm256_cmp_pd(c, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, c, gt);
    const __m256i idx = _mm256_add_epi64(_mm256_set1_epi64x(i), lane0);
    bestIdx = _mm256_castpd_si256(_mm256_blendv_pd(
        _mm256_castsi256_pd(bestIdx), _mm256_castsi256_pd(idx), gt));
  }
  // Tail candidates all carry larger indices than the vector part, so a
  // strictly-greater update preserves first-index semantics.
  SweepResult tail{kNegInf, -1};
  for (; i < nc; ++i) {
    const double c = cand1(g[i], g[i + gap], g[i + 2 * gap]);
    if (c > tail.violation) {
      tail.violation = c;
      tail.index = i;
    }
  }
  return merge_lanes(best, bestIdx, tail);
}

}  // namespace

SweepResult concave_pair_sweep(const double* g, std::int64_t n,
                               std::int64_t gap) {
  return sweep_impl(
      g, n, gap, [](__m256d gl, __m256d gm, __m256d gr) {
        return candidate4(gl, gm, gr);
      },
      [](double gl, double gm, double gr) {
        return scalar_concave_candidate(gl, gm, gr);
      });
}

SweepResult concave_pair_sweep_rel(const double* g, std::int64_t n,
                                   std::int64_t gap) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffll));
  return sweep_impl(
      g, n, gap,
      [one, absmask](__m256d gl, __m256d gm, __m256d gr) {
        const __m256d ninf = _mm256_set1_pd(kNegInf);
        const __m256d pinf = _mm256_set1_pd(kPosInf);
        const __m256d half = _mm256_set1_pd(0.5);
        const __m256d scale =
            _mm256_max_pd(one, _mm256_and_pd(gm, absmask));
        __m256d c = _mm256_div_pd(
            _mm256_sub_pd(_mm256_mul_pd(half, _mm256_add_pd(gl, gr)), gm),
            scale);
        c = _mm256_blendv_pd(c, pinf, _mm256_cmp_pd(gm, ninf, _CMP_EQ_OQ));
        c = _mm256_blendv_pd(c, ninf, _mm256_cmp_pd(gm, pinf, _CMP_EQ_OQ));
        const __m256d end_ninf =
            _mm256_or_pd(_mm256_cmp_pd(gl, ninf, _CMP_EQ_OQ),
                         _mm256_cmp_pd(gr, ninf, _CMP_EQ_OQ));
        return _mm256_blendv_pd(c, ninf, end_ninf);
      },
      [](double gl, double gm, double gr) {
        double c = scalar_concave_candidate(gl, gm, gr);
        if (std::isfinite(c)) c /= std::max(1.0, std::fabs(gm));
        return c;
      });
}

SweepResult quasi_pair_sweep(const double* u, std::int64_t n,
                             std::int64_t gap) {
  return sweep_impl(
      u, n, gap, [](__m256d ul, __m256d um, __m256d ur) {
        return _mm256_sub_pd(_mm256_min_pd(ul, ur), um);
      },
      [](double ul, double um, double ur) { return std::min(ul, ur) - um; });
}

void convolve_taps(const double* src, std::int64_t n, const double* taps,
                   std::int64_t m, double* dst) {
  const std::int64_t lo = std::min<std::int64_t>(m, n);
  const std::int64_t hi = std::max<std::int64_t>(lo, n - m);
  // Edge columns (truncated tap range) take the scalar path.
  auto scalar_at = [&](std::int64_t i) {
    const std::int64_t k0 = std::max<std::int64_t>(-m, -i);
    const std::int64_t k1 = std::min<std::int64_t>(m, n - 1 - i);
    double acc = 0.0;
    for (std::int64_t k = k0; k <= k1; ++k) acc += src[i + k] * taps[m + k];
    dst[i] = acc;
  };
  for (std::int64_t i = 0; i < lo; ++i) scalar_at(i);
  std::int64_t i = lo;
  for (; i + 4 <= hi; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::int64_t k = -m; k <= m; ++k) {
      const __m256d t = _mm256_set1_pd(taps[m + k]);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(src + i + k), t, acc);
    }
    _mm256_storeu_pd(dst + i, acc);
  }
  for (; i < hi; ++i) scalar_at(i);
  for (i = hi; i < n; ++i) scalar_at(i);
}

void outer_product(const double* a, std::int64_t na, const double* b,
                   std::int64_t nb, double* dst) {
  for (std::int64_t i = 0; i < na; ++i) {
    const __m256d ai = _mm256_set1_pd(a[i]);
    double* row = dst + i * nb;
    std::int64_t j = 0;
    for (; j + 4 <= nb; j += 4)
      _mm256_storeu_pd(row + j, _mm256_mul_pd(ai, _mm256_loadu_pd(b + j)));
    for (; j < nb; ++j) row[j] = a[i] * b[j];
  }
}

}  // namespace concaflow::kernels::avx2

#endif  // CONCAFLOW_HAVE_AVX2
