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

#ifndef CONCAFLOW_CONCAVITY_HPP
#define CONCAFLOW_CONCAVITY_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "concaflow/admissible.hpp"
#include "concaflow/common.hpp"
#include "concaflow/grid.hpp"

namespace concaflow {

enum class ConcavityKind { FConcave, QuasiConcave, LogConcave };

// A violating sample triple: the two outer nodes and the combination
// weight; the tested combination node is (1-lambda) x + lambda y.  Node
// indices and physical coordinates are both kept so reports stay readable
// without the grid at hand.
struct ConcavityWitness {
  std::array<int, 2> x_node{0, 0};
  std::array<int, 2> y_node{0, 0};
  std::array<double, 2> x{0.0, 0.0};
  std::array<double, 2> y{0.0, 0.0};
  double lambda = 0.5;
};

struct ConcavityReport {
  ConcavityKind kind = ConcavityKind::QuasiConcave;
  std::string family;  // transform tag for F-concavity verdicts, else empty
  bool passed = false;
  double worst_violation = 0.0;  // max(0, worst deficit over all checks)
  double tolerance = 0.0;        // passed == (worst_violation <= tolerance)
  bool has_witness = false;      // recorded exactly when passed is false
  ConcavityWitness witness{};
  std::int64_t n_checks = 0;
};

// Midpoint F-concavity scan of a nonnegative grid function: transforms the
// values once (zeros map to -inf) and tests F(u_mid) >= (F(u_x)+F(u_y))/2
// over every axis- and diagonal-aligned node pair whose exact midpoint is a
// node (in 1D, every such pair), plus a seeded batch of random triples with
// weights in {1/4, 1/3, 3/4} whose combination point lands on a node.
// Pairs with a zero endpoint hold automatically (their right side is -inf);
// a zero at the combination node under positive endpoints is a hard
// violation, so the support must be convex.  Deficits are absolute, in
// transform units.
// Errors: values reaching the top of the admissible interval (within
// 1e-12).
ConcavityReport check_F_concavity(const GridFunction& u,
                                  const AdmissibleFunction& F, double tol);

// Same scan against the logarithm; equivalent to the power transform at
// alpha = 0 but reported under its own kind.
ConcavityReport check_log_concavity(const GridFunction& u, double tol);

// Same enumeration with the quasi-concavity predicate
// u_mid >= min(u_x, u_y).
ConcavityReport check_quasi_concavity(const GridFunction& u, double tol);

// Smallest F-concave grid function dominating u: transforms the positive
// nodes, takes the least concave majorant of the transformed point set (1D:
// upper hull by a monotone chain; 2D: upper convex hull of the lifted 3D
// points, evaluated at the nodes), and maps back.  Nodes outside the convex
// hull of the support come back as zero.  The result dominates u nodewise
// and no node can be lowered without breaking concavity of the hull.  tol
// is the internal domination-verification margin.
// Errors: values reaching the top of the admissible interval.
GridFunction f_concave_envelope(const GridFunction& u,
                                const AdmissibleFunction& F,
                                double tol = 1e-9);

// A mirrored profile that is F-concave but not log-concave on the left
// half-line, together with the violating pair that certifies it.
struct DisruptionDatum {
  GridFunction phi2;       // f_F(c - |z|) sampled on the z grid
  double zeta = 0.0;       // left sample of the log-concavity violation
  double omega = 0.0;      // right sample
  double lambda = 0.5;     // combination weight of the violation
  double c = 0.0;          // mirror anchor in transform coordinates, > omega
  double violation = 0.0;  // midpoint log-concavity deficit at the witness
};

// Finds a log-concavity violation of the profile f_F: scans 400 centers
// across the search window for the worst positive second difference of
// log f_F at the scan step, refines the center by golden-section search,
// and anchors the mirror at c = omega + (J_hi - omega)/4 (one unit past
// omega when J is unbounded above).  The returned profile is verified to
// pass the F-concavity scan and to fail the log-concavity scan on z <= 0.
// Preconditions: F(0+) = -inf, and F must not be at least as strong as
// log-concavity (otherwise no violation exists and the construction is
// refused).  Defaults: search window = the transform's J window at 400
// samples; z grid = [-8, 8] with 801 nodes.
DisruptionDatum build_disruption_datum(const AdmissibleFunction& F,
                                       SamplingSpec search_window = {},
                                       SamplingSpec z_spec = {});

// Solver-error budget for the product-evolution disruption experiments:
// C * (dx_w^2 + dx_z^2) with C calibrated once against the exact
// separated-variables heat solution and kept with headroom.  A disruption
// verdict only counts when the measured violation exceeds 10x this budget.
double disruption_budget(double dx_w, double dx_z);

struct DisruptionRun {
  DisruptionDatum datum;
  double budget = 0.0;
  std::vector<std::pair<double, ConcavityReport>> reports;
};

// The quasi-concavity disruption experiment: forms the 2D datum
// step(w) * phi2(z), evolves it by the separable whole-plane flow to each
// time in t_list, and scans every state for quasi-concavity with tolerance
// 10x the solver-error budget.  The w grid must contain w = 0 as a node so
// the jump sits exactly on the lattice.  With control = true the mirrored
// profile is replaced by the log-concave f_F(c) exp(-z^2/2) at the same
// peak; every control state should then stay quasi-concave, which bounds
// the discretization noise of the pipeline from above.
// Errors: those of build_disruption_datum and the flow, plus empty or
// non-increasing t_list and a w grid missing the zero node.
DisruptionRun run_disruption(const AdmissibleFunction& F,
                             const SamplingSpec& w_spec,
                             const SamplingSpec& z_spec,
                             const std::vector<double>& t_list,
                             bool control = false,
                             SamplingSpec search_window = {});

}  // namespace concaflow

#endif  // CONCAFLOW_CONCAVITY_HPP
