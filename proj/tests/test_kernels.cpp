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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "concaflow/common.hpp"
#include "concaflow/kernels.hpp"

using namespace concaflow;
namespace K = concaflow::kernels;

namespace {

// Plain reimplementation used as the oracle for the reference kernel.
K::SweepResult oracle_concave(const std::vector<double>& g, std::int64_t gap,
                              bool rel) {
  K::SweepResult r{-kInf, -1};
  for (std::int64_t i = 0; i + 2 * gap < static_cast<std::int64_t>(g.size());
       ++i) {
    const double gl = g[static_cast<std::size_t>(i)];
    const double gm = g[static_cast<std::size_t>(i + gap)];
    const double gr = g[static_cast<std::size_t>(i + 2 * gap)];
    double c;
    if (gl == -kInf || gr == -kInf) c = -kInf;
    else if (gm == -kInf) c = kInf;
    else if (gm == kInf) c = -kInf;
    else c = 0.5 * (gl + gr) - gm;
    if (rel && std::isfinite(c)) c /= std::fmax(1.0, std::fabs(gm));
    if (c > r.violation) {
      r.violation = c;
      r.index = i;
    }
  }
  return r;
}

std::vector<double> random_line(Rng& rng, int n, bool with_inf) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (auto& v : g) {
    const double u = rng.uniform();
    if (with_inf && u < 0.08) v = -kInf;
    else if (with_inf && u < 0.09) v = kInf;
    else v = rng.uniform(-3.0, 3.0);
  }
  return g;
}

bool bit_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

TEST_CASE("scalar pair sweeps match the oracle including infinities") {
  Rng rng(20260825);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = static_cast<int>(rng.integer(3, 160));
    const auto g = random_line(rng, n, true);
    const auto gap = rng.integer(1, std::max<std::int64_t>(1, (n - 1) / 2));
    const auto a = K::scalar::concave_pair_sweep(g.data(), n, gap);
    const auto b = oracle_concave(g, gap, false);
    CHECK(bit_equal(a.violation, b.violation));
    CHECK(a.index == b.index);
    const auto ar = K::scalar::concave_pair_sweep_rel(g.data(), n, gap);
    const auto br = oracle_concave(g, gap, true);
    CHECK(bit_equal(ar.violation, br.violation));
    CHECK(ar.index == br.index);
  }
}

TEST_CASE("quasi sweep finds the worst dip with the first index") {
  const std::vector<double> u{1.0, 2.0, 1.5, 2.0, 1.5, 2.0, 1.0};
  const auto r = K::scalar::quasi_pair_sweep(u.data(), 7, 1);
  CHECK(r.violation == doctest::Approx(0.5));
  CHECK(r.index == 1);  // min(2.0, 2.0) - 1.5 at the first of the two dips
  // Degenerate line: no candidates.
  const auto e = K::scalar::quasi_pair_sweep(u.data(), 2, 1);
  CHECK(e.index == -1);
  CHECK(e.violation == -kInf);
}

TEST_CASE("convolution and outer product match plain loops") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng.integer(1, 80));
    const int m = static_cast<int>(rng.integer(0, 30));
    std::vector<double> src(static_cast<std::size_t>(n)),
        taps(static_cast<std::size_t>(2 * m + 1));
    for (auto& v : src) v = rng.uniform(-1.0, 1.0);
    for (auto& v : taps) v = rng.uniform(0.0, 1.0);
    std::vector<double> got(static_cast<std::size_t>(n), 0.0),
        want(static_cast<std::size_t>(n), 0.0);
    K::scalar::convolve_taps(src.data(), n, taps.data(), m, got.data());
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = -m; k <= m; ++k) {
        if (i + k < 0 || i + k >= n) continue;
        acc += src[static_cast<std::size_t>(i + k)] *
               taps[static_cast<std::size_t>(m + k)];
      }
      want[static_cast<std::size_t>(i)] = acc;
    }
    for (int i = 0; i < n; ++i)
      CHECK(std::fabs(got[static_cast<std::size_t>(i)] -
                      want[static_cast<std::size_t>(i)]) <= 1e-15 * (2 * m + 1));
  }
  std::vector<double> a{1.0, 2.0, 3.0}, b{4.0, 5.0};
  std::vector<double> dst(6, 0.0);
  K::scalar::outer_product(a.data(), 3, b.data(), 2, dst.data());
  CHECK(dst == std::vector<double>{4.0, 5.0, 8.0, 10.0, 12.0, 15.0});
}

#ifdef CONCAFLOW_HAVE_AVX2

TEST_CASE("avx2 pair sweeps are bitwise equal to scalar") {
  if (K::active_backend() != K::Backend::Avx2) {
    MESSAGE("AVX2 not active on this machine; skipping");
    return;
  }
  Rng rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = static_cast<int>(rng.integer(3, 300));
    const bool with_inf = trial % 2 == 0;
    const auto g = random_line(rng, n, with_inf);
    const auto gap = rng.integer(1, std::max<std::int64_t>(1, (n - 1) / 2));

    const auto s1 = K::scalar::concave_pair_sweep(g.data(), n, gap);
    const auto v1 = K::avx2::concave_pair_sweep(g.data(), n, gap);
    CHECK(bit_equal(s1.violation, v1.violation));
    CHECK(s1.index == v1.index);

    const auto s2 = K::scalar::concave_pair_sweep_rel(g.data(), n, gap);
    const auto v2 = K::avx2::concave_pair_sweep_rel(g.data(), n, gap);
    CHECK(bit_equal(s2.violation, v2.violation));
    CHECK(s2.index == v2.index);

    const auto s3 = K::scalar::quasi_pair_sweep(g.data(), n, gap);
    const auto v3 = K::avx2::quasi_pair_sweep(g.data(), n, gap);
    if (!with_inf) {
      CHECK(bit_equal(s3.violation, v3.violation));
      CHECK(s3.index == v3.index);
    }
  }
}

TEST_CASE("avx2 ties resolve to the lowest index like scalar") {
  if (K::active_backend() != K::Backend::Avx2) return;
  // Identical candidates everywhere: first index must win in both variants.
  for (int n : {9, 16, 33, 64, 101}) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = (i % 2) ? 0.0 : 1.0;
    for (std::int64_t gap : {1, 2, 3}) {
      const auto s = K::scalar::concave_pair_sweep(g.data(), n, gap);
      const auto v = K::avx2::concave_pair_sweep(g.data(), n, gap);
      CHECK(s.index == v.index);
      CHECK(bit_equal(s.violation, v.violation));
    }
  }
}

TEST_CASE("avx2 convolution is tolerance-equivalent (FMA rounding differs)") {
  if (K::active_backend() != K::Backend::Avx2) return;
  Rng rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(rng.integer(1, 400));
    const int m = static_cast<int>(rng.integer(0, 60));
    std::vector<double> src(static_cast<std::size_t>(n)),
        taps(static_cast<std::size_t>(2 * m + 1));
    for (auto& v : src) v = rng.uniform(0.0, 2.0);
    for (auto& v : taps) v = rng.uniform(0.0, 0.05);
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    K::scalar::convolve_taps(src.data(), n, taps.data(), m, a.data());
    K::avx2::convolve_taps(src.data(), n, taps.data(), m, b.data());
    for (int i = 0; i < n; ++i)
      CHECK(std::fabs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) <=
            1e-13 * std::fmax(1.0, std::fabs(a[static_cast<std::size_t>(i)])));
    std::vector<double> oa(static_cast<std::size_t>(n) * 2), ob(static_cast<std::size_t>(n) * 2);
    std::vector<double> bb(2, 1.5);
    K::scalar::outer_product(src.data(), n, bb.data(), 2, oa.data());
    K::avx2::outer_product(src.data(), n, bb.data(), 2, ob.data());
    for (std::size_t i = 0; i < oa.size(); ++i) CHECK(bit_equal(oa[i], ob[i]));
  }
}

#endif  // CONCAFLOW_HAVE_AVX2

TEST_CASE("backend resolution reports a valid name") {
  const std::string name = K::backend_name();
  CHECK((name == "scalar" || name == "avx2"));
}
