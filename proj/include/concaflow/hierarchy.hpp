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

#ifndef CONCAFLOW_HIERARCHY_HPP
#define CONCAFLOW_HIERARCHY_HPP

#include <utility>

#include "concaflow/admissible.hpp"
#include "concaflow/grid.hpp"

namespace concaflow {

// Ordering and equivalence tests between transforms.  "F1 is weaker than
// F2" means every F2-concave function is F1-concave; computationally, that
// the composition g = F1 o f2 is concave on the J-window of F2.

struct ComparisonWitness {
  double z = 0.0;       // left sample of the violating pair
  double w = 0.0;       // right sample
  double lambda = 0.5;  // combination weight (midpoint tests use 1/2)
};

// Outcome of a midpoint test along a line (ordering, closure, concavity of
// a derived profile); `holds` is true when no violation exceeds tolerance.
struct ComparisonResult {
  bool holds = false;
  double worst_violation = 0.0;  // scaled by max(1, |g|) at the midpoint
  bool has_witness = false;      // present exactly when holds is false
  ComparisonWitness witness{};
  double tolerance = 0.0;
  // Context the verdict should not lose: hypothesis-form caveats, automatic
  // window adjustments.  Empty for the plain ordering tests.
  std::string notes;
};

// Midpoint-concavity verdict of an explicitly sampled profile g over all
// even-gap pairs of its window, violations scaled by max(1, |g|) at the
// midpoint; the witness pair is attached when the verdict fails.  Shared by
// the ordering tests below and the preservation checks built on them.
ComparisonResult line_concavity(const std::vector<double>& g,
                                const SamplingSpec& window, double tol);

// Midpoint-concavity test of F1 o f2 over all even-gap sample pairs of the
// window (default: F2's J-window capped to the common range [0, min(a1,a2))).
// The composition runs through the log-space bridge, so windows may reach
// regions where f2 underflows.
ComparisonResult is_weaker(const AdmissibleFunction& F1,
                           const AdmissibleFunction& F2,
                           SamplingSpec window = {}, double tol = 1e-9);

// Forward comparison holds and the reverse shows a violation above 10x tol
// (the documented noise floor for claiming strictness).
bool strictly_weaker(const AdmissibleFunction& F1,
                     const AdmissibleFunction& F2, double tol = 1e-9);

struct EquivalenceResult {
  bool equivalent = false;
  double A = 0.0;  // fitted slope: F1 = A*F2 + B requires A > 0
  double B = 0.0;
  double max_residual = 0.0;
};

// Least-squares affine fit of F1(f2(z)) against z; equivalence requires a
// positive slope and max residual below tol * max(1, |g|) on the window.
EquivalenceResult equivalent(const AdmissibleFunction& F1,
                             const AdmissibleFunction& F2,
                             SamplingSpec window = {}, double tol = 1e-9);

// Concavity of z -> F(kappa * f(z)) on the window, the one-line witness of
// closure under multiplication by kappa in (0,1).
ComparisonResult scalar_closure(const AdmissibleFunction& F, double kappa,
                                SamplingSpec window = {}, double tol = 1e-9);

// Approximation of a positive log-concave grid function f (passed as log f,
// with -inf marking zeros; this argument deliberately carries log-domain
// values, not a nonnegative GridFunction) by a hot-concave one on [0, a):
// solves eps * h'(-2/eps) = 1/a by bracketed bisection, then maps nodewise
//   f_a = (sqrt(pi)/eps) e^(1/eps^2) (1 + erf(eps*logf/2 - 1/eps))
//       = a * h(eps*logf - 2/eps),
// the closed form of int_{-inf}^{logf} e^(w - eps^2 w^2/4) dw.  Returns the
// grid and eps_a.  Bracket failure (a below about 4e-3) raises NumericError.
std::pair<GridFunction, double> ha_approximant(double a,
                                               const GridFunction& logf,
                                               double epsilon_solver_tol = 1e-13);

// Consistency check of limit inheritance: if F1 is weaker than F2 on the
// default window and F2(0+) = -inf, then F1(0+) = -inf must hold too.
// Returns false exactly when that implication is violated.
bool limit_inheritance_check(const AdmissibleFunction& F1,
                             const AdmissibleFunction& F2);

}  // namespace concaflow

#endif  // CONCAFLOW_HIERARCHY_HPP
