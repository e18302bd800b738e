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

#include <cmath>

#include "concaflow/common.hpp"
#include "concaflow/hot.hpp"

using namespace concaflow;

namespace {

// Independent quadrature oracle for h: the smoothed step
//   h(z) = (4 pi)^(-1/2) \int_0^\infty e^{-(z-w)^2/4} dw,
// integrated by composite Simpson on [0, 60] (integrand is below 1e-200
// beyond that for |z| <= 10).
double h_quadrature(double z) {
  const double w_hi = 60.0;
  const int n = 6000;  // even
  const double dw = w_hi / n;
  auto integrand = [z](double w) {
    const double d = z - w;
    return std::exp(-0.25 * d * d);
  };
  double acc = integrand(0.0) + integrand(w_hi);
  for (int k = 1; k < n; ++k)
    acc += integrand(k * dw) * (k % 2 ? 4.0 : 2.0);
  return acc * dw / 3.0 / std::sqrt(4.0 * std::acos(-1.0));
}

}  // namespace

TEST_CASE("h matches its defining quadrature") {
  for (double z : {-3.0, -1.0, -0.3, 0.0, 0.7, 1.0, 3.0, 6.0}) {
    CHECK(std::fabs(hot_h(z) - h_quadrature(z)) <= 1e-10);
  }
}

TEST_CASE("h anchor values and symmetry") {
  CHECK(hot_h(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::fabs(hot_h_prime(0.0) - 1.0 / std::sqrt(4.0 * std::acos(-1.0))) <=
        1e-15);
  for (double z : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0}) {
    CHECK(std::fabs(hot_h(z) + hot_h(-z) - 1.0) <= 1e-15);
  }
  // Strictly increasing on a sample.
  double prev = hot_h(-10.0);
  for (double z = -9.5; z <= 10.0; z += 0.5) {
    const double cur = hot_h(z);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("left-tail asymptotics: h'(z) ~ -(z/2) h(z)") {
  const double z = -30.0;
  const double ratio = hot_h_prime(z) / (-0.5 * z * hot_h(z));
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("log h agrees with log(h) at moderate z and stays accurate deep") {
  for (double z = -50.0; z <= 8.0; z += 0.37) {
    const double direct = std::log(hot_h(z));
    CHECK(std::fabs(log_hot_h(z) - direct) <=
          5e-16 + 2e-16 * std::fabs(direct));
  }
  // Deep tail: compare against the leading asymptotic -z^2/4 - log(-z ...),
  // which the continued branch must track to high relative accuracy.
  for (double z : {-60.0, -100.0, -300.0, -1000.0}) {
    const double x = -0.5 * z;
    const double lead = -x * x - std::log(x) - 0.5 * std::log(4.0 * std::acos(-1.0));
    const double got = log_hot_h(z);
    CHECK(std::isfinite(got));
    CHECK(std::fabs(got - lead) / std::fabs(lead) < 1e-3);
  }
  // Branch continuity where the asymptotic takes over (x = 25 <-> z = -50):
  // both sides pinned to 40-digit quadrature values of log(erfc(-z/2)/2).
  CHECK(std::fabs(log_hot_h(-49.999999) - (-629.4851613346637532)) <=
        1e-12 * 629.5);
  CHECK(std::fabs(log_hot_h(-50.000001) - (-629.4852113746000077)) <=
        1e-12 * 629.5);
}

TEST_CASE("H inverts h to 1e-12 over (0,1)") {
  // Geometric ladder toward both endpoints plus a uniform sweep.
  for (double y = 1e-12; y < 0.5; y *= 3.7) {
    CHECK(std::fabs(hot_h(hot_H(y)) - y) <= 1e-12);
    CHECK(std::fabs(hot_h(hot_H(1.0 - y)) - (1.0 - y)) <= 1e-12);
  }
  for (double y = 0.02; y < 1.0; y += 0.02) {
    CHECK(std::fabs(hot_h(hot_H(y)) - y) <= 1e-12);
  }
  CHECK(hot_H(0.5) == 0.0);
  CHECK(std::fabs(hot_H(hot_h(1.7)) - 1.7) <= 1e-10);
  CHECK(std::fabs(hot_H(0.99) - 3.2899527142663741) <= 1e-9);  // bisection oracle
}

TEST_CASE("H_from_log reaches below representable y") {
  // log y = -1e6 corresponds to y ~ 1e-434294, far below DBL_MIN.
  const double z = hot_H_from_log(-1e6);
  CHECK(std::isfinite(z));
  CHECK(std::fabs(log_hot_h(z) - (-1e6)) <= 1e-9 * 1e6);
  // Agreement with hot_H where both paths work.
  for (double y : {1e-300, 1e-30, 1e-3, 0.25, 0.75, 1.0 - 1e-9}) {
    CHECK(std::fabs(hot_H_from_log(std::log(y)) - hot_H(y)) <=
          1e-10 * std::fmax(1.0, std::fabs(hot_H(y))));
  }
}

TEST_CASE("domain errors outside (0,1)") {
  CHECK_THROWS_AS(hot_H(0.0), DomainError);
  CHECK_THROWS_AS(hot_H(1.0), DomainError);
  CHECK_THROWS_AS(hot_H(-0.1), DomainError);
  CHECK_THROWS_AS(hot_H(1.1), DomainError);
  CHECK_THROWS_AS(hot_H_from_log(0.0), DomainError);
  CHECK_THROWS_AS(hot_H_from_log(-kInf), DomainError);
}
