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

#ifndef CONCAFLOW_FLOW_HPP_
#define CONCAFLOW_FLOW_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "concaflow/grid.hpp"

namespace concaflow {

enum class SolverTag {
  ExactConvolution,
  CrankNicolson,
  ProductFlow,
  SemilinearIMEX,
};

const char* solver_tag_name(SolverTag tag);

// One recorded state of an evolution.  Snapshot values are clamped to zero
// where a solver undershoots by at most 1e-12 * max(1, ||phi||_inf); the
// number of clamped nodes is kept so reports can surface it.  Undershoot
// beyond that tolerance is a numeric error, never silently repaired.
struct FlowSnapshot {
  double t = 0.0;
  GridFunction u;
  SolverTag solver_tag = SolverTag::ExactConvolution;
  std::int64_t clamped = 0;
};

// Samples the unit step 1_{[0,inf)} on a uniform line grid.  A node landing
// exactly on 0 takes the value 1/2 (symmetric quadrature limits the bias of
// the jump; the evolved profile then matches the sigmoid h exactly at 0).
GridFunction step_line(double x0, double dx, int n);

// Whole-line heat evolution by discrete Gaussian convolution with trapezoid
// weights.  The kernel is truncated at radius r* = 2 sqrt(t ln 1e16) per
// side, where its tail drops below 1e-16 of the peak; kernel mass must not
// exceed 1 + 1e-8.  The datum is extended by zero beyond the grid, so
// results are only faithful where the truncated kernel fits inside it.
// Errors: t <= 0 (domain); r* exceeding 10x the grid length (resolution).
FlowSnapshot heat_line(const GridFunction& phi, double t);

// Separable plane evolution: the outer product of the two 1D evolutions,
// which equals the full 2D convolution of phi1 (x) phi2 up to
// discretization error.  Preconditions and errors are those of heat_line
// applied to each factor.
FlowSnapshot product_flow_2d(const GridFunction& phi1,
                             const GridFunction& phi2, double t);

// Heat evolution with zero boundary values on an interval (1D) or an
// axis-aligned rectangle (2D): Crank-Nicolson stepping, tridiagonal direct
// solves in 1D and Peaceman-Rachford alternating-direction splitting
// (x-sweep then y-sweep) in 2D.  Snapshots are returned at the times in
// t_list (positive, strictly increasing); the step is shortened per segment
// so every requested time is hit exactly.  When dt is not given it defaults
// to min(dx, 0.01 * t_list.back()).  The solution is maximum-norm
// non-expansive up to 1e-10 and nonnegative up to the clamp tolerance; both
// are enforced, not assumed.
// Errors: datum not vanishing on the boundary (within 1e-12); dt <= 0;
// empty or non-increasing t_list.
std::vector<FlowSnapshot> dirichlet_cn(const GridFunction& phi,
                                       const std::vector<double>& t_list,
                                       std::optional<double> dt = {});

// Reaction-diffusion evolution u_t = Laplace u + kappa |u|^{p-1} u with zero
// boundary values: Crank-Nicolson diffusion plus an explicit reaction step.
// Snapshots are returned at 10 evenly spaced times ending exactly at T.
// For kappa > 0, T must stay below the blow-up guard
// T* = ||phi||_inf^{-(p-1)} / (kappa (p-1)); every state is checked against
// the spatially flat comparison solution
// z(t) = ||phi||_inf (1 - kappa (p-1) t ||phi||_inf^{p-1})^{-1/(p-1)}
// within 1e-6, and exceeding 2 z(t) is reported as instability.
// Errors: as dirichlet_cn; p <= 1; T >= T* when kappa > 0.
std::vector<FlowSnapshot> semilinear_imex(const GridFunction& phi,
                                          double kappa, double p, double T,
                                          double dt);

}  // namespace concaflow

#endif  // CONCAFLOW_FLOW_HPP_
