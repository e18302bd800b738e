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

#ifndef CONCAFLOW_ADMISSIBLE_HPP
#define CONCAFLOW_ADMISSIBLE_HPP

#include <string>
#include <vector>

#include "concaflow/common.hpp"

namespace concaflow {

// Family of the transform, with its parameter:
//   Power    - F(r) = (r^alpha - 1)/alpha on [0,inf), log r at alpha = 0
//   PowerLog - F(r) = (1 - (-log r)^alpha)/alpha on [0,1), -log(-log r) at 0
//   Hot      - F(r) = H(r/a) on [0,a), H the inverse of the heat sigmoid h;
//              a = inf degenerates to the Power alpha = 0 transform
//   Tabulated- monotone-cubic interpolation of user-supplied (r, F) pairs
enum class FamilyTag { Power, PowerLog, Hot, Tabulated };

// A transform F that is continuous and strictly increasing on (0, a) with
// the assigned value F(0) = -inf, together with its inverse f = F^{-1} on
// J = F((0,a)) and the derived quantities every verdict needs.
//
// Values of f and f' can underflow badly inside perfectly legitimate
// windows (e.g. PowerLog with small positive alpha near the left edge), so
// alongside the plain evaluators the class exposes a log-space bridge:
// log_f, log_f_prime, and F_from_log.  Compositions such as F1(f2(z)) or
// F(kappa * f(z)) must be built from the bridge; they then stay finite and
// fully accurate where the direct forms lose all precision.
class AdmissibleFunction {
 public:
  static AdmissibleFunction power(double alpha);
  static AdmissibleFunction power_log(double alpha);
  static AdmissibleFunction hot(double a);  // a > 0, may be +inf
  // r strictly increasing with r.front() > 0, F strictly increasing and
  // finite, at least 4 points.  The right endpoint a is r.back() (excluded);
  // evaluations below r.front() are domain errors, never extrapolated.
  // Whether F(r) -> -inf as r -> 0+ cannot be inferred from samples and must
  // be declared by the caller.
  static AdmissibleFunction tabulated(std::vector<double> r,
                                      std::vector<double> F,
                                      bool limit_at_zero_minus_inf,
                                      std::string label = "table:<inline>");
  // Two-column whitespace-separated text file "r F(r)" per line; '#' starts
  // a comment.
  static AdmissibleFunction tabulated_from_file(const std::string& path,
                                                bool limit_at_zero_minus_inf);
  // Mini-grammar: "phi:<alpha>" | "lalpha:<alpha>" | "hot:<a|inf>" |
  // "table:<path>".  Tabulated specs get limit_at_zero = false unless the
  // caller passes table_limit_flag.
  static AdmissibleFunction parse(const std::string& spec,
                                  bool table_limit_flag = false);

  FamilyTag family() const { return tag_; }
  // alpha for Power/PowerLog, a for Hot; unused for Tabulated.
  double param() const { return param_; }
  double a() const { return a_; }
  double J_lo() const { return j_lo_; }
  double J_hi() const { return j_hi_; }
  bool limit_at_zero_is_minus_infinity() const { return limit_zero_; }
  // Canonical CLI/config spelling, e.g. "phi:0.5" or "hot:inf".
  const std::string& spec_string() const { return spec_; }

  // F(r).  F(0) = -inf by assignment; r < 0 or r at/above a (within the
  // near-endpoint margin) is a domain error.
  double F(double r) const;
  // F(exp(logr)) computed without forming exp(logr); logr = -inf gives
  // -inf.  Accepts any logr strictly below log a (no safety margin, unlike
  // F(r)): compositions near saturation land within an ulp of log a and are
  // still well defined.
  double F_from_log(double logr) const;
  // f(z) = F^{-1}(z), in [0, a); f(-inf) = 0 by assignment for every
  // family.  z at/over a finite J endpoint is a domain error.
  double f(double z) const;
  // log f(z); -inf exactly where f vanishes.
  double log_f(double z) const;
  double f_prime(double z) const;
  // log f'(z); finite on the open J-window for every closed-form family
  // even where f_prime underflows to zero.
  double log_f_prime(double z) const;
  // (log f')'(z) = f''/f', the quantity whose concavity decides
  // preservation.  Closed forms per family; Tabulated uses the documented
  // central difference with step max(1e-5, 1e-4 |z|).
  double log_fprime_derivative(double z) const;
  double f_second(double z) const;

  // Window defaults: J capped to [-50, 50] and inset by 1% per side.
  SamplingSpec default_J_window(int n = 2001) const {
    return default_window(j_lo_, j_hi_, n);
  }

 private:
  AdmissibleFunction() = default;
  void check_z(double z) const;          // open-J membership with margins
  double tab_F(double r) const;          // interpolant
  double tab_F_prime(double r) const;
  double tab_inverse(double z) const;

  FamilyTag tag_ = FamilyTag::Power;
  double param_ = 0.0;
  double a_ = kInf;
  double log_a_ = kInf;
  double j_lo_ = -kInf;
  double j_hi_ = kInf;
  bool limit_zero_ = true;
  std::string spec_;
  // Tabulated data: knots, values, Fritsch-Carlson tangents.
  std::vector<double> tr_, tF_, tm_;
};

// Parameters of the weighted alpha-mean M_alpha(x, y; lambda).
struct AlphaMeanParams {
  double alpha = 0.0;   // may be +/-inf (max / min branches)
  double lambda = 0.5;  // strictly inside (0,1)
};

// M_alpha(x,y;lambda) for nonnegative x,y with the convention that the mean
// is 0 whenever x*y = 0 (all alpha branches).
double alpha_mean(double x, double y, const AlphaMeanParams& p);

}  // namespace concaflow

#endif  // CONCAFLOW_ADMISSIBLE_HPP
