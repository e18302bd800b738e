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

#include "concaflow/hot.hpp"

#include <cmath>
#include <string>

#include "concaflow/common.hpp"

namespace concaflow {

namespace {

constexpr double kLogSqrt4Pi = 1.26551212348464539649;  // log(sqrt(4*pi))

// log h'(z); always finite.
double log_hot_h_prime(double z) { return -0.25 * z * z - kLogSqrt4Pi; }

}  // namespace

double hot_h(double z) {
  if (z < 0.0) return 0.5 * std::erfc(-0.5 * z);
  return 0.5 * (1.0 + std::erf(0.5 * z));
}

double hot_h_prime(double z) { return std::exp(log_hot_h_prime(z)); }

double log_hot_h(double z) {
  if (z >= 0.0) return std::log1p(-0.5 * std::erfc(0.5 * z));
  const double x = -0.5 * z;
  if (x <= 25.0) return std::log(0.5 * std::erfc(x));
  // erfc underflows around x = 26.6; continue with its asymptotic series
  //   erfc(x) ~ e^(-x^2)/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - ...).
  const double ix2 = 1.0 / (x * x);
  const double series =
      ix2 * (-0.5 + ix2 * (0.75 + ix2 * (-1.875 + ix2 * 6.5625)));
  return -x * x - std::log(x) - kLogSqrt4Pi + std::log1p(series);
}

namespace {

// Solves log h(z) = target on the left half line (target <= log(1/2)).
double solve_log_left(double target) {
  // Bracket: h is increasing, so we need L(lo) < target <= L(hi) = log(1/2).
  double hi = 0.0;
  double lo = target > -40.0 ? -13.0 : -2.0 * std::sqrt(-target) - 2.0;
  while (log_hot_h(lo) >= target) lo *= 1.5;  // cannot run long: L ~ -z^2/4
  double z = target > -3.0 ? -1.0 : -2.0 * std::sqrt(-target);
  if (z <= lo || z >= hi) z = 0.5 * (lo + hi);
  for (int it = 0; it < 120; ++it) {
    const double L = log_hot_h(z);
    const double resid = L - target;
    if (std::fabs(resid) <= 1e-15 * std::fmax(1.0, std::fabs(target))) break;
    if (resid > 0.0) hi = z; else lo = z;
    // Newton step with d/dz log h = h'/h, all in logs.
    const double step = resid * std::exp(L - log_hot_h_prime(z));
    double znew = z - step;
    if (!(znew > lo && znew < hi)) znew = 0.5 * (lo + hi);
    if (znew == z) break;
    z = znew;
  }
  return z;
}

}  // namespace

double hot_H(double y) {
  if (!(y > 0.0 && y < 1.0))
    throw DomainError("hot_H: argument " + std::to_string(y) +
                      " outside (0,1)");
  if (y == 0.5) return 0.0;
  if (y > 0.5) {
    // 1-y is exact for y in [0.5,1]; h(-z) = 1 - h(z).
    return -solve_log_left(std::log(1.0 - y));
  }
  return solve_log_left(std::log(y));
}

double hot_H_from_log(double logy) {
  if (!(logy < 0.0) || std::isinf(logy))
    throw DomainError("hot_H_from_log: log-argument must be finite negative");
  constexpr double kLogHalf = -0.6931471805599453;
  if (logy > kLogHalf) {
    const double onemy = -std::expm1(logy);  // 1 - y, accurately
    return -solve_log_left(std::log(onemy));
  }
  return solve_log_left(logy);
}

}  // namespace concaflow
