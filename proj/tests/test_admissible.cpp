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
#include <cstdio>
#include <vector>

#include "concaflow/admissible.hpp"
#include "concaflow/common.hpp"
#include "concaflow/hot.hpp"

using namespace concaflow;

namespace {

std::vector<AdmissibleFunction> all_test_families() {
  return {
      AdmissibleFunction::power(0.0),   AdmissibleFunction::power(2.0),
      AdmissibleFunction::power(0.5),   AdmissibleFunction::power(-1.0),
      AdmissibleFunction::power(-2.5),  AdmissibleFunction::power_log(0.0),
      AdmissibleFunction::power_log(0.5), AdmissibleFunction::power_log(1.0),
      AdmissibleFunction::power_log(2.0), AdmissibleFunction::power_log(-1.0),
      AdmissibleFunction::hot(1.0),     AdmissibleFunction::hot(2.0),
      AdmissibleFunction::hot(10.0),    AdmissibleFunction::hot(kInf),
  };
}

// Scalar bisection inverse used as the oracle for f = F^{-1}.
double invert_by_bisection(const AdmissibleFunction& F, double z, double rlo,
                           double rhi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (rlo + rhi);
    (F.F(mid) < z ? rlo : rhi) = mid;
  }
  return 0.5 * (rlo + rhi);
}

}  // namespace

TEST_CASE("power family anchors") {
  const auto p0 = AdmissibleFunction::power(0.0);
  CHECK(p0.F(1.0) == 0.0);
  CHECK(p0.f(0.0) == 1.0);
  CHECK(p0.limit_at_zero_is_minus_infinity());

  const auto p2 = AdmissibleFunction::power(2.0);
  CHECK(p2.F(3.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(p2.J_lo() == doctest::Approx(-0.5));
  CHECK(!p2.limit_at_zero_is_minus_infinity());

  const auto pm1 = AdmissibleFunction::power(-1.0);
  CHECK(pm1.J_hi() == doctest::Approx(1.0));
  CHECK(pm1.J_lo() == -kInf);
  // Solve (1/r - 1)/(-1) = 0.5 by the bisection oracle and against f.
  const double r_oracle = invert_by_bisection(pm1, 0.5, 1e-6, 1e6);
  CHECK(r_oracle == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(pm1.f(0.5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pm1.limit_at_zero_is_minus_infinity());
}

TEST_CASE("power-log family anchors") {
  // alpha = 1 collapses to 1 + log r (expand -Phi_1(-log r) by hand).
  const auto l1 = AdmissibleFunction::power_log(1.0);
  for (double r : {0.05, 0.3, 0.9, 0.99}) {
    CHECK(l1.F(r) == doctest::Approx(1.0 + std::log(r)).epsilon(1e-13));
  }
  CHECK(l1.f(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  const auto lh = AdmissibleFunction::power_log(0.5);
  CHECK(lh.J_hi() == doctest::Approx(2.0));
  for (double z : {-3.0, -1.0, 0.0, 1.0, 1.9}) {
    const double expect = std::exp(-(1.0 - 0.5 * z) * (1.0 - 0.5 * z));
    CHECK(lh.f(z) == doctest::Approx(expect).epsilon(1e-13));
  }
  // f(2 - eps) -> 1 following the closed form exp(-(eps/2)^2).
  const double eps = 1e-6;
  CHECK(lh.f(2.0 - eps) ==
        doctest::Approx(std::exp(-0.25 * eps * eps)).epsilon(1e-12));

  const auto l0 = AdmissibleFunction::power_log(0.0);
  CHECK(l0.f(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(l0.limit_at_zero_is_minus_infinity());
}

TEST_CASE("power-log with negative alpha has a finite limit at zero") {
  const auto lm1 = AdmissibleFunction::power_log(-1.0);
  CHECK(!lm1.limit_at_zero_is_minus_infinity());
  CHECK(lm1.J_lo() == doctest::Approx(-1.0));
  CHECK(lm1.J_hi() == kInf);
  // F(r) -> 1/alpha = -1 as r -> 0+; reachable only through log space.
  CHECK(std::fabs(lm1.F_from_log(-1e7) - (-1.0)) <= 1e-6);
  // Just above J_lo the inverse vanishes.
  CHECK(lm1.f(-1.0 + 1e-6) < 1e-100);
  CHECK_THROWS_AS(lm1.f(-1.0 - 0.1), DomainError);
}

TEST_CASE("hot family anchors") {
  const auto h1 = AdmissibleFunction::hot(1.0);
  CHECK(h1.f(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(h1.F(0.9) == doctest::Approx(hot_H(0.9)).epsilon(1e-13));

  const auto h2 = AdmissibleFunction::hot(2.0);
  CHECK(std::fabs(h2.F(1.0)) <= 1e-12);  // H(1/2) = 0

  const auto hinf = AdmissibleFunction::hot(kInf);
  CHECK(hinf.F(std::exp(2.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(hinf.f(2.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK(hinf.limit_at_zero_is_minus_infinity());
  CHECK(hinf.log_fprime_derivative(5.0) == 1.0);

  // Deep tail stays finite in log space.
  CHECK(std::isfinite(h1.log_f(-100.0)));
  CHECK(std::isfinite(h1.log_f_prime(-100.0)));
}

TEST_CASE("assigned endpoint values and domain errors") {
  for (const auto& F : all_test_families()) {
    INFO(F.spec_string());
    CHECK(F.F(0.0) == -kInf);
    CHECK(F.f(-kInf) == 0.0);
    CHECK(F.log_f(-kInf) == -kInf);
    CHECK_THROWS_AS(F.F(-0.5), DomainError);
    if (std::isfinite(F.a())) {
      CHECK_THROWS_AS(F.F(F.a()), DomainError);
      CHECK_THROWS_AS(F.F(F.a() * (1.0 + 1e-15)), DomainError);
    }
    if (std::isfinite(F.J_hi())) {
      CHECK_THROWS_AS(F.f(F.J_hi()), DomainError);
      CHECK_THROWS_AS(F.f(F.J_hi() + 1.0), DomainError);
    }
    if (std::isfinite(F.J_lo())) {
      CHECK_THROWS_AS(F.f(F.J_lo()), DomainError);
    }
  }
}

TEST_CASE("inverse round-trips at 1e-10 relative accuracy") {
  for (const auto& F : all_test_families()) {
    INFO(F.spec_string());
    const double rhi = std::isfinite(F.a()) ? F.a() * (1.0 - 1e-8) : 1e8;
    const double rlo = std::isfinite(F.a()) ? F.a() * 1e-8 : 1e-8;
    const double lr0 = std::log(rlo), lr1 = std::log(rhi);
    for (int k = 0; k < 200; ++k) {
      const double r = std::exp(lr0 + (lr1 - lr0) * k / 199.0);
      const double z = F.F(r);
      // Skip where z collapses onto a finite J endpoint in doubles (e.g.
      // tiny r under a positive-alpha power transform maps into the last
      // ulps above J_lo, where the inverse is no longer evaluable).
      if (std::isfinite(F.J_lo()) &&
          z - F.J_lo() <= 1e-9 * std::fmax(1.0, std::fabs(F.J_lo())))
        continue;
      if (std::isfinite(F.J_hi()) &&
          F.J_hi() - z <= 1e-9 * std::fmax(1.0, std::fabs(F.J_hi())))
        continue;
      const double back = F.f(z);
      // An ulp of z moves r by f'(z); budget for that conditioning (it
      // dominates for families whose J endpoint compresses a long r-tail,
      // e.g. negative-alpha power transforms at large r).
      const double tol = 1e-10 * std::fmax(1.0, r) +
                         1e-14 * std::fmax(1.0, std::fabs(z)) * F.f_prime(z);
      CHECK(std::fabs(back - r) <= tol);
    }
  }
}

TEST_CASE("forward round-trip F(f(z)) = z and monotonicity on the J-window") {
  for (const auto& F : all_test_families()) {
    INFO(F.spec_string());
    const double log_a = std::log(F.a());
    const auto w = F.default_J_window(401);
    double prev_z = -kInf, prev_f = -1.0, prev_F = -kInf;
    bool have_prev_F = false;
    for (int i = 0; i < w.n; ++i) {
      const double z = w.point(i);
      const double fv = F.f(z);
      const double lf = F.log_f(z);
      if (fv > 1e-20 && fv < F.a() * (1.0 - 1e-10)) {
        // The plain route loses accuracy exactly where a relative ulp of r
        // moves z a lot; budget for that conditioning on top of the target.
        const double cond = std::exp(lf - F.log_f_prime(z));
        CHECK(std::fabs(F.F(fv) - z) <=
              1e-10 * std::fmax(1.0, std::fabs(z)) + 1e-14 * cond);
      }
      // The log bridge has no such loss while log f stays below log a --
      // except when log a is a nonzero double, where forming
      // log a + log(f/a) rounds the saturation gap into log a's last ulps
      // and the information is gone for good.
      const bool gap_representable =
          log_a == 0.0 || !std::isfinite(log_a) || log_a - lf > 1e-5;
      if (lf < log_a && gap_representable) {
        const double Fv = F.F_from_log(lf);
        CHECK(std::fabs(Fv - z) <= 1e-10 * std::fmax(1.0, std::fabs(z)));
        if (have_prev_F) CHECK(Fv > prev_F);
        prev_F = Fv;
        have_prev_F = true;
      }
      if (i > 0) {
        CHECK(z > prev_z);
        // Strictly increasing away from the floating-point plateaus where f
        // underflows to 0 or saturates at a within one ulp.
        CHECK(fv >= prev_f);
        const bool saturated =
            std::isfinite(F.a()) && fv > F.a() * (1.0 - 1e-13);
        if (fv > 1e-280 && !saturated) CHECK(fv > prev_f);
      }
      prev_z = z;
      prev_f = fv;
    }
  }
}

TEST_CASE("log bridge is consistent with the plain evaluators") {
  for (const auto& F : all_test_families()) {
    INFO(F.spec_string());
    const auto w = F.default_J_window(101);
    for (int i = 0; i < w.n; ++i) {
      const double z = w.point(i);
      const double fv = F.f(z);
      if (fv > 1e-290) {
        CHECK(std::fabs(F.log_f(z) - std::log(fv)) <=
              1e-12 * std::fmax(1.0, std::fabs(std::log(fv))));
      }
      const double fp = F.f_prime(z);
      if (fp > 1e-290 && fp < 1e290) {
        CHECK(std::fabs(F.log_f_prime(z) - std::log(fp)) <=
              1e-11 * std::fmax(1.0, std::fabs(std::log(fp))));
      }
    }
  }
}

TEST_CASE("closed-form (log f')' matches central differences") {
  for (const auto& F : all_test_families()) {
    INFO(F.spec_string());
    const auto w = F.default_J_window(41);
    // Stay a little inside so the difference stencil cannot leave J.  The
    // step is small enough that the h^2/6 truncation stays under the
    // tolerance even where (log f')' grows like e^{|z|}.
    for (int i = 1; i + 1 < w.n; ++i) {
      const double z = w.point(i);
      const double h = 5e-4;
      const double numeric =
          (F.log_f_prime(z + h) - F.log_f_prime(z - h)) / (2.0 * h);
      CHECK(std::fabs(F.log_fprime_derivative(z) - numeric) <=
            1e-6 * std::fmax(1.0, std::fabs(numeric)));
    }
  }
}

TEST_CASE("known (log f')' values") {
  const auto h1 = AdmissibleFunction::hot(1.0);
  CHECK(h1.log_fprime_derivative(3.0) == doctest::Approx(-1.5).epsilon(1e-14));
  const auto p0 = AdmissibleFunction::power(0.0);
  CHECK(p0.log_fprime_derivative(-7.3) == 1.0);
  const auto lh = AdmissibleFunction::power_log(0.5);
  CHECK(lh.log_fprime_derivative(0.0) == doctest::Approx(0.5).epsilon(1e-13));
  const auto l0 = AdmissibleFunction::power_log(0.0);
  CHECK(l0.log_fprime_derivative(1.0) ==
        doctest::Approx(std::expm1(-1.0)).epsilon(1e-13));
}

TEST_CASE("f_second = (log f')' * f'") {
  for (const auto& F : all_test_families()) {
    const auto w = F.default_J_window(21);
    for (int i = 1; i + 1 < w.n; ++i) {
      const double z = w.point(i);
      const double h = 1e-5 * std::fmax(1.0, std::fabs(z));
      const double fp = F.f_prime(z);
      if (fp < 1e-12 || fp > 1e12) continue;
      const double numeric = (F.f_prime(z + h) - F.f_prime(z - h)) / (2.0 * h);
      CHECK(std::fabs(F.f_second(z) - numeric) <=
            1e-5 * std::fmax(1.0, std::fabs(numeric)));
    }
  }
}

TEST_CASE("alpha mean conventions") {
  CHECK(alpha_mean(4.0, 0.0, {1.0, 0.5}) == 0.0);
  CHECK(alpha_mean(0.0, 4.0, {-kInf, 0.5}) == 0.0);
  CHECK(alpha_mean(2.0, 8.0, {0.0, 0.5}) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(alpha_mean(1.0, 3.0, {-kInf, 0.7}) == 1.0);
  CHECK(alpha_mean(1.0, 3.0, {kInf, 0.7}) == 3.0);
  CHECK(alpha_mean(2.0, 4.0, {1.0, 0.25}) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(alpha_mean(2.0, 4.0, {-1.0, 0.5}) ==
        doctest::Approx(1.0 / (0.5 / 2.0 + 0.5 / 4.0)).epsilon(1e-14));
  CHECK_THROWS_AS(alpha_mean(1.0, 1.0, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(alpha_mean(1.0, 1.0, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(alpha_mean(-1.0, 1.0, {0.0, 0.5}), DomainError);
}

TEST_CASE("family spec grammar") {
  CHECK(AdmissibleFunction::parse("phi:0.5").spec_string() == "phi:0.5");
  CHECK(AdmissibleFunction::parse("lalpha:-1").spec_string() == "lalpha:-1");
  CHECK(AdmissibleFunction::parse("hot:2").spec_string() == "hot:2");
  CHECK(AdmissibleFunction::parse("hot:inf").family() == FamilyTag::Hot);
  CHECK(AdmissibleFunction::parse("hot:inf").a() == kInf);
  CHECK_THROWS_AS(AdmissibleFunction::parse("phi"), ConfigError);
  CHECK_THROWS_AS(AdmissibleFunction::parse("phi:abc"), ConfigError);
  CHECK_THROWS_AS(AdmissibleFunction::parse("nope:1"), ConfigError);
  CHECK_THROWS_AS(AdmissibleFunction::parse("hot:-1"), ConfigError);
}

TEST_CASE("tabulated family approximates its source and round-trips") {
  // Table sampled from log r at log-spaced knots (constant relative
  // spacing keeps the interpolation error uniform); declared to diverge at
  // zero.
  std::vector<double> r, Fv;
  for (int i = 0; i <= 240; ++i) {
    const double rv = 0.05 * std::pow(3.0 / 0.05, i / 240.0);
    r.push_back(rv);
    Fv.push_back(std::log(rv));
  }
  const auto T = AdmissibleFunction::tabulated(r, Fv, true);
  CHECK(T.family() == FamilyTag::Tabulated);
  CHECK(T.a() == doctest::Approx(3.0));
  CHECK(T.limit_at_zero_is_minus_infinity());
  for (double rv = 0.08; rv < 2.9; rv += 0.11) {
    CHECK(std::fabs(T.F(rv) - std::log(rv)) <= 2e-5);
    CHECK(std::fabs(T.f(T.F(rv)) - rv) <= 1e-9);
  }
  // f' = 1/F'(f) tracks the analytic r; (log f')' of log r is 1.
  for (double z : {-2.0, -1.0, 0.0, 0.5, 1.0}) {
    CHECK(std::fabs(T.f_prime(z) - std::exp(z)) <= 2e-3 * std::exp(z));
    CHECK(std::fabs(T.log_fprime_derivative(z) - 1.0) <= 2e-2);
  }
  CHECK_THROWS_AS(T.F(0.01), DomainError);  // below tabulated range
  CHECK(T.F(0.0) == -kInf);                 // assigned value still holds

  CHECK_THROWS_AS(AdmissibleFunction::tabulated({1, 2}, {1, 2}, false),
                  ConfigError);
  CHECK_THROWS_AS(
      AdmissibleFunction::tabulated({1, 2, 2, 3}, {1, 2, 3, 4}, false),
      ConfigError);
  CHECK_THROWS_AS(
      AdmissibleFunction::tabulated({1, 2, 3, 4}, {1, 2, 2, 4}, false),
      ConfigError);
}

TEST_CASE("tabulated file loading") {
  const char* path = "tab_family_test.txt";
  {
    std::FILE* f = std::fopen(path, "w");
    REQUIRE(f != nullptr);
    std::fputs("# r  F(r)\n0.5 -0.693\n1.0 0.0\n1.5 0.405\n2.0 0.693\n", f);
    std::fclose(f);
  }
  const auto T = AdmissibleFunction::tabulated_from_file(path, false);
  CHECK(T.a() == doctest::Approx(2.0));
  CHECK(!T.limit_at_zero_is_minus_infinity());
  CHECK(T.spec_string() == std::string("table:") + path);
  CHECK(std::fabs(T.F(1.0)) <= 1e-12);
  std::remove(path);
  CHECK_THROWS_AS(AdmissibleFunction::tabulated_from_file("missing_file.txt",
                                                          false),
                  ConfigError);
}

TEST_CASE("deep-window evaluations stay finite in log space") {
  // Small positive alpha: f and f' underflow far left of the window, but
  // the log forms must remain finite and ordered.
  const auto l025 = AdmissibleFunction::power_log(0.25);
  const double z = -49.0;
  CHECK(l025.f(z) == 0.0);  // underflow is expected here
  CHECK(std::isfinite(l025.log_f(z)));
  CHECK(std::isfinite(l025.log_f_prime(z)));
  // log f(-49) = -(1 + 49/4)^4 exactly for this family.
  CHECK(l025.log_f(z) ==
        doctest::Approx(-std::pow(13.25, 4)).epsilon(1e-12));
}
