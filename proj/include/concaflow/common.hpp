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

#ifndef CONCAFLOW_COMMON_HPP
#define CONCAFLOW_COMMON_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace concaflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Evaluations closer than this (times max(1,|endpoint|)) to an excluded
// interval endpoint are rejected instead of clamped; silent clamping would
// corrupt concavity verdicts near the boundary.
inline constexpr double kEndpointMargin = 1e-12;

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain of an evaluator.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Malformed configuration, file, or CLI input.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// A solver or search left its validated operating regime (instability,
// resolution failure, bracket failure, missing witness).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

// Uniform 1D sampling request: n points from lo to hi inclusive.
struct SamplingSpec {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;

  bool empty() const { return n <= 0; }
  double point(int i) const {
    return n <= 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  }
  std::vector<double> points() const {
    std::vector<double> p(static_cast<std::size_t>(n > 0 ? n : 0));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = point(i);
    return p;
  }
};

// Default evaluation window for an interval (lo, hi) that may be unbounded:
// infinite ends are capped at +/-50, then the window is inset by 1% of the
// capped span so excluded endpoints are never touched.  Every family's
// interesting behavior happens at moderate |z|.
inline SamplingSpec default_window(double lo, double hi, int n = 2001) {
  double clo = lo < -50.0 ? -50.0 : lo;
  double chi = hi > 50.0 ? 50.0 : hi;
  if (!(clo < chi)) throw DomainError("default_window: empty interval");
  const double span = chi - clo;
  return SamplingSpec{clo + 0.01 * span, chi - 0.01 * span, n};
}

// FNV-1a 64-bit hash; used for config fingerprints in reports.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

// Seeded RNG with explicitly pinned mappings so that streams are identical
// across standard libraries (distributions are not portable; these are).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform integer in [lo, hi] by rejection-free modular mapping; the bias
  // for our small ranges (< 2^32) is below 2^-32 and irrelevant here.
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(eng_() % span);
  }

 private:
  std::mt19937_64 eng_;
};

// Number of worker threads: CONCAFLOW_THREADS if set (clamped to >= 1),
// otherwise the hardware count.
int thread_count();

// Runs fn(begin, end, chunk_index) over a contiguous partition of [0, n)
// into at most thread_count() chunks.  Chunk boundaries depend only on n and
// the thread count, and callers merge per-chunk results in chunk order, so
// reductions built on top are deterministic.
void parallel_chunks(
    std::int64_t n,
    const std::function<void(std::int64_t, std::int64_t, int)>& fn);

}  // namespace concaflow

#endif  // CONCAFLOW_COMMON_HPP
