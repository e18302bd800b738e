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

#ifndef CONCAFLOW_CRITERION_HPP
#define CONCAFLOW_CRITERION_HPP

#include <functional>
#include <string>
#include <vector>

#include "concaflow/admissible.hpp"
#include "concaflow/hierarchy.hpp"

namespace concaflow {

// Preservation verdicts: does the heat flow (or a reaction / variable-
// coefficient variant) keep F-concave data F-concave?  Each verdict is a
// conjunction of named conditions; failed conditions carry a witness.

struct CriterionCondition {
  std::string name;
  bool passed = false;
  double worst_violation = 0.0;
  bool has_witness = false;
  ComparisonWitness witness{};
};

struct CriterionVerdict {
  bool preserved = false;  // conjunction of all condition passes
  std::vector<CriterionCondition> conditions;
  std::string notes;
  // True when an analytic exponent condition held with equality; the
  // underlying inequalities are non-strict, so these are passes.
  bool at_boundary = false;
};

// The heat-flow preservation test.  Three conditions on the transform:
// (1) F(0+) = -inf (the declared limit flag);
// (2) f' > 0 across the window (equivalently F' > 0 on (0, a));
// (3) z -> (log f')'(z) is midpoint-concave on the J-window.
// An empty window means the transform's default J-window.  Tabulated
// transforms get a window-limited note: nothing is claimed beyond the
// samples.
CriterionVerdict dhf_criterion(const AdmissibleFunction& F,
                               SamplingSpec window = {}, double tol = 1e-8);

// Preservation under u_t = Laplace(u) + kappa |u|^{p-1} u with zero
// boundary data.  For kappa > 0 the verdict is an unconditional failure
// (no F-concavity survives a positive coupling; no numeric search is run).
// For kappa <= 0 the conditions are dhf_criterion's plus midpoint concavity
// of the reaction transform kappa * f^p / f' on the window.  p <= 1 is a
// domain error.
CriterionVerdict semilinear_criterion(const AdmissibleFunction& F,
                                      double kappa, double p,
                                      SamplingSpec window = {},
                                      double tol = 1e-8);

// Reaction term evaluator G(x, u, grad u) for the necessary-condition test.
using ReactionEvaluator = std::function<double(
    const std::vector<double>& x, double u, const std::vector<double>& grad)>;

// Necessary condition along the line z = <theta, x> + ell: the profile
//   Htilde(z) = G(x(z), f(z), f'(z) theta) / f'(z) + (f''/f')(z) |theta|^2
// must be midpoint-concave in z, with x(z) = ((z - ell)/|theta|^2) theta
// (for theta = 0 the constraint set is all of space; x = 0 is used and z
// remains the free variable).  Implemented without any slope assumption on
// F' at r = 0; the result notes record that form.  An empty window means
// the transform's default J-window, shrunk where f' underflows to zero so
// the quotient stays defined; an explicit window reaching underflow or
// leaving J is a domain error.
ComparisonResult necessary_Htilde(const AdmissibleFunction& F,
                                  const ReactionEvaluator& G,
                                  const std::vector<double>& theta, double ell,
                                  SamplingSpec line_window = {},
                                  double tol = 1e-8);

// Coefficient field of a second-order operator sum A^{ij} d_i d_j u +
// sum b^i d_i u + c u on a sampled axis-aligned box.
struct CoefficientField {
  int dim = 1;
  // Row-major dim x dim matrix; must be symmetric positive-definite at
  // every sample.
  std::function<std::vector<double>(const std::vector<double>&)> A;
  std::function<std::vector<double>(const std::vector<double>&)> b;
  std::function<double(const std::vector<double>&)> c;
};

// Preservation conditions for the variable-coefficient linear flow.
// With a transform F (c must vanish): joint midpoint concavity of
// (x, z) -> (log f')'(z) <A(x)theta, theta> over the documented theta set
// and direction set, affinity of every b^i, c = 0, plus dhf_criterion's
// conditions on F.  With F == nullptr the log-concavity variant is tested
// instead: A constant, b affine, c convex.  domain_samples gives the
// per-axis x-box (default [-2, 2] with 21 nodes per axis).
CriterionVerdict linear_vc_conditions(const CoefficientField& coeffs,
                                      const AdmissibleFunction* F,
                                      SamplingSpec domain_samples = {},
                                      double tol = 1e-8);

// Convexity of z -> f(z)/f'(z) on the window, the workable form of
// (-1)-concavity of (log f)'.  A necessary companion of preservation for
// the absorbing-reaction families.
ComparisonResult minus_one_concavity(const AdmissibleFunction& F,
                                     SamplingSpec window = {},
                                     double tol = 1e-8);

// Initial concavity rate for the porous-medium nonlinearity: the profile
//   g(z) = (m/alpha)(m/alpha - 1) z^{-1 + (m-1)/alpha}   (alpha != 0)
//   g(z) = m^2 e^{(m-1) z}                               (alpha = 0)
// is tested for midpoint concavity on a window inside (0, inf), alongside
// the analytic exponent condition 0 <= -1 + (m-1)/alpha <= 1 (never met at
// alpha = 0).  Equality cases set at_boundary.  m <= 1 is a domain error.
CriterionVerdict pm_initial_rate(double m, double alpha,
                                 SamplingSpec z_window = {}, double tol = 1e-8);

// Initial concavity rate for the p-Laplace operator: the profile
//   g(z) = ((p-1)/(|alpha|^{p-2} alpha)) ((1-alpha)/alpha)
//            * z^{(p-2)/alpha - (p-1)}                    (alpha != 0)
//   g(z) = (p-1) e^{(p-2) z}                              (alpha = 0)
// tested the same way; the analytic condition is alpha >= (p-2)/p, with
// equality flagged as a boundary pass.  p <= 2 is a domain error.
CriterionVerdict plaplace_initial_rate(double p, double alpha,
                                       SamplingSpec z_window = {},
                                       double tol = 1e-8);

}  // namespace concaflow

#endif  // CONCAFLOW_CRITERION_HPP
