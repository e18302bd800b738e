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

#include "concaflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "concaflow/common.hpp"
#include "concaflow/kernels.hpp"

namespace concaflow {

namespace {

// Constant-coefficient symmetric tridiagonal [diag, off] solved by the
// Thomas algorithm; the elimination coefficients depend only on (diag, off,
// n) and are factored once per time-step size.
class ConstTridiag {
 public:
  void factor(double diag, double off, int n) {
    off_ = off;
    n_ = n;
    cp_.assign(static_cast<std::size_t>(n), 0.0);
    inv_.assign(static_cast<std::size_t>(n), 0.0);
    double den = diag;
    for (int i = 0; i < n; ++i) {
      inv_[static_cast<std::size_t>(i)] = 1.0 / den;
      cp_[static_cast<std::size_t>(i)] = off * inv_[static_cast<std::size_t>(i)];
      den = diag - off * cp_[static_cast<std::size_t>(i)];
    }
  }
  void solve(double* x) const {
    x[0] *= inv_[0];
    for (int i = 1; i < n_; ++i)
      x[i] = (x[i] - off_ * x[i - 1]) * inv_[static_cast<std::size_t>(i)];
    for (int i = n_ - 2; i >= 0; --i)
      x[i] -= cp_[static_cast<std::size_t>(i)] * x[i + 1];
  }

 private:
  double off_ = 0.0;
  int n_ = 0;
  std::vector<double> cp_, inv_;
};

void zero_boundary(const GridFunction& phi, std::vector<double>& v) {
  if (phi.dims == 1) {
    v.front() = 0.0;
    v.back() = 0.0;
    return;
  }
  const int nx = phi.shape[0], ny = phi.shape[1];
  for (int j = 0; j < ny; ++j) {
    v[static_cast<std::size_t>(j)] = 0.0;
    v[static_cast<std::size_t>((nx - 1) * ny + j)] = 0.0;
  }
  for (int i = 0; i < nx; ++i) {
    v[static_cast<std::size_t>(i * ny)] = 0.0;
    v[static_cast<std::size_t>(i * ny + ny - 1)] = 0.0;
  }
}

void check_boundary_zero(const GridFunction& phi) {
  auto offend = [](double v) { return std::fabs(v) > 1e-12; };
  bool bad = false;
  if (phi.dims == 1) {
    bad = offend(phi.values.front()) || offend(phi.values.back());
  } else {
    const int nx = phi.shape[0], ny = phi.shape[1];
    for (int j = 0; j < ny && !bad; ++j)
      bad = offend(phi.at(0, j)) || offend(phi.at(nx - 1, j));
    for (int i = 0; i < nx && !bad; ++i)
      bad = offend(phi.at(i, 0)) || offend(phi.at(i, ny - 1));
  }
  if (bad)
    throw ConfigError(
        "zero-boundary solver: datum must vanish on the grid boundary "
        "(within 1e-12)");
}

// One Crank-Nicolson step on an interval with pinned zero endpoints.
void cn_step_1d(std::vector<double>& u, std::vector<double>& rhs,
                const ConstTridiag& tri, double beta, int n) {
  for (int i = 1; i + 1 < n; ++i)
    rhs[static_cast<std::size_t>(i - 1)] =
        u[static_cast<std::size_t>(i)] +
        beta * (u[static_cast<std::size_t>(i - 1)] -
                2.0 * u[static_cast<std::size_t>(i)] +
                u[static_cast<std::size_t>(i + 1)]);
  tri.solve(rhs.data());
  for (int i = 1; i + 1 < n; ++i)
    u[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i - 1)];
}

// One Peaceman-Rachford step on a rectangle: implicit x-sweep against the
// explicit y-operator, then the roles swapped.  Boundary values stay zero.
void adi_step_2d(std::vector<double>& u, std::vector<double>& mid,
                 std::vector<double>& line, const ConstTridiag& trix,
                 const ConstTridiag& triy, double bx, double by, int nx,
                 int ny) {
  auto id = [ny](int i, int j) { return static_cast<std::size_t>(i * ny + j); };
  std::fill(mid.begin(), mid.end(), 0.0);
  for (int j = 1; j + 1 < ny; ++j) {
    for (int i = 1; i + 1 < nx; ++i)
      line[static_cast<std::size_t>(i - 1)] =
          u[id(i, j)] * (1.0 - 2.0 * by) +
          by * (u[id(i, j - 1)] + u[id(i, j + 1)]);
    trix.solve(line.data());
    for (int i = 1; i + 1 < nx; ++i) mid[id(i, j)] = line[static_cast<std::size_t>(i - 1)];
  }
  for (int i = 1; i + 1 < nx; ++i) {
    for (int j = 1; j + 1 < ny; ++j)
      line[static_cast<std::size_t>(j - 1)] =
          mid[id(i, j)] * (1.0 - 2.0 * bx) +
          bx * (mid[id(i - 1, j)] + mid[id(i + 1, j)]);
    triy.solve(line.data());
    for (int j = 1; j + 1 < ny; ++j) u[id(i, j)] = line[static_cast<std::size_t>(j - 1)];
  }
}

struct ReactionSpec {
  double kappa = 0.0;
  double p = 2.0;
  double norm0 = 0.0;  // ||phi||_inf, fixed at the start of the march
};

// Flat comparison solution of w' = kappa w^p, w(0) = ||phi||_inf.
double ode_bound(const ReactionSpec& rs, double t) {
  const double arg =
      1.0 - rs.kappa * (rs.p - 1.0) * t * std::pow(rs.norm0, rs.p - 1.0);
  return rs.norm0 * std::pow(arg, -1.0 / (rs.p - 1.0));
}

FlowSnapshot make_snapshot(const GridFunction& phi,
                           const std::vector<double>& state, double t,
                           SolverTag tag, double clamp_tol) {
  FlowSnapshot snap;
  snap.t = t;
  snap.solver_tag = tag;
  snap.u = phi;
  snap.u.values = state;
  for (auto& v : snap.u.values) {
    if (v < 0.0) {
      if (v < -clamp_tol)
        throw NumericError(
            "solver produced a negative value beyond the clamp tolerance: " +
            std::to_string(v));
      v = 0.0;
      ++snap.clamped;
    }
  }
  return snap;
}

std::vector<FlowSnapshot> march_cn(const GridFunction& phi,
                                   const std::vector<double>& t_list,
                                   std::optional<double> dt_opt,
                                   const ReactionSpec* reaction,
                                   SolverTag tag) {
  phi.validate();
  check_boundary_zero(phi);
  if (t_list.empty())
    throw ConfigError("zero-boundary solver: empty list of snapshot times");
  double prev = 0.0;
  for (double t : t_list) {
    if (!(t > prev))
      throw ConfigError(
          "zero-boundary solver: snapshot times must be positive and "
          "strictly increasing");
    prev = t;
  }
  const double min_dx =
      phi.dims == 1 ? phi.spacing[0] : std::fmin(phi.spacing[0], phi.spacing[1]);
  const double dt =
      dt_opt ? *dt_opt : std::fmin(min_dx, 0.01 * t_list.back());
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("zero-boundary solver: dt must be positive");

  const double norm0 = phi.max_value();
  const double clamp_tol = 1e-12 * std::fmax(1.0, norm0);

  const int nx = phi.shape[0], ny = phi.shape[1];
  if (nx < 3 || (phi.dims == 2 && ny < 3))
    throw ConfigError(
        "zero-boundary solver: need at least 3 nodes along each axis");
  std::vector<double> state = phi.values;
  zero_boundary(phi, state);
  std::vector<double> rhs(static_cast<std::size_t>(std::max(nx, ny)), 0.0);
  std::vector<double> mid;
  if (phi.dims == 2) mid.assign(state.size(), 0.0);

  std::vector<FlowSnapshot> out;
  out.reserve(t_list.size());
  double cur = 0.0;
  ConstTridiag trix, triy;
  for (double target : t_list) {
    const double span = target - cur;
    const int steps =
        std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
    const double h = span / steps;
    double bx = 0.0, by = 0.0;
    if (phi.dims == 1) {
      bx = 0.5 * h / (phi.spacing[0] * phi.spacing[0]);
      trix.factor(1.0 + 2.0 * bx, -bx, nx - 2);
    } else {
      bx = 0.5 * h / (phi.spacing[0] * phi.spacing[0]);
      by = 0.5 * h / (phi.spacing[1] * phi.spacing[1]);
      trix.factor(1.0 + 2.0 * bx, -bx, nx - 2);
      triy.factor(1.0 + 2.0 * by, -by, ny - 2);
    }
    for (int s = 0; s < steps; ++s) {
      if (phi.dims == 1)
        cn_step_1d(state, rhs, trix, bx, nx);
      else
        adi_step_2d(state, mid, rhs, trix, triy, bx, by, nx, ny);
      if (reaction && reaction->kappa != 0.0) {
        const double q = reaction->p - 1.0;
        for (auto& v : state)
          v += h * reaction->kappa * std::pow(std::fabs(v), q) * v;
      }
      if (reaction) {
        const double t_now = cur + (s + 1) * h;
        const double z = ode_bound(*reaction, t_now);
        double peak = 0.0;
        for (double v : state) peak = std::fmax(peak, std::fabs(v));
        if (peak > 2.0 * z)
          throw NumericError(
              "semilinear step unstable: values exceed twice the flat "
              "comparison solution");
        if (peak > z + 1e-6)
          throw NumericError(
              "semilinear step violates the flat comparison bound");
      }
    }
    cur = target;
    if (!reaction) {
      double peak = 0.0;
      for (double v : state) peak = std::fmax(peak, std::fabs(v));
      if (peak > norm0 + 1e-10)
        throw NumericError(
            "zero-boundary solver is not maximum-norm non-expansive here");
    }
    out.push_back(make_snapshot(phi, state, target, tag, clamp_tol));
  }
  return out;
}

}  // namespace

const char* solver_tag_name(SolverTag tag) {
  switch (tag) {
    case SolverTag::ExactConvolution: return "exact_convolution";
    case SolverTag::CrankNicolson: return "crank_nicolson";
    case SolverTag::ProductFlow: return "product_flow";
    case SolverTag::SemilinearIMEX: return "semilinear_imex";
  }
  return "unknown";
}

GridFunction step_line(double x0, double dx, int n) {
  GridFunction g = GridFunction::line(x0, dx, n);
  for (int i = 0; i < n; ++i) {
    const double x = g.x(i);
    const double v = x > 0.0 ? 1.0 : 0.0;
    g.values[static_cast<std::size_t>(i)] = x == 0.0 ? 0.5 : v;
  }
  g.zero_outside = false;  // the right tail continues as 1
  return g;
}

FlowSnapshot heat_line(const GridFunction& phi, double t) {
  phi.validate();
  if (phi.dims != 1)
    throw ConfigError("heat_line: expected a 1D grid function");
  if (!(t > 0.0) || !std::isfinite(t))
    throw DomainError("heat_line: t must be positive and finite");

  const double dx = phi.spacing[0];
  const int n = phi.shape[0];
  const double radius = 2.0 * std::sqrt(t * std::log(1e16));
  const double length = (n - 1) * dx;
  if (radius > 10.0 * length)
    throw ConfigError(
        "heat_line: kernel support exceeds 10x the grid length; the grid "
        "cannot resolve this time");

  const auto m = static_cast<std::int64_t>(std::floor(radius / dx));
  std::vector<double> taps(static_cast<std::size_t>(2 * m + 1));
  const double scale = dx / std::sqrt(4.0 * std::acos(-1.0) * t);
  double mass = 0.0;
  for (std::int64_t k = -m; k <= m; ++k) {
    const double s = static_cast<double>(k) * dx;
    const double w = scale * std::exp(-s * s / (4.0 * t));
    taps[static_cast<std::size_t>(k + m)] = w;
    mass += w;
  }
  if (mass > 1.0 + 1e-8)
    throw NumericError("heat_line: truncated kernel mass exceeds 1 + 1e-8");

  // Trapezoid weights attach to the datum; beyond the grid it is zero.
  std::vector<double> src = phi.values;
  src.front() *= 0.5;
  src.back() *= 0.5;
  FlowSnapshot snap;
  snap.t = t;
  snap.solver_tag = SolverTag::ExactConvolution;
  snap.u = phi;
  kernels::convolve_taps(src.data(), n, taps.data(), m, snap.u.values.data());
  for (auto& v : snap.u.values) {
    if (v < 0.0) {  // cannot occur mathematically; keep the ledger honest
      v = 0.0;
      ++snap.clamped;
    }
  }
  return snap;
}

FlowSnapshot product_flow_2d(const GridFunction& phi1, const GridFunction& phi2,
                             double t) {
  const FlowSnapshot s1 = heat_line(phi1, t);
  const FlowSnapshot s2 = heat_line(phi2, t);
  FlowSnapshot snap;
  snap.t = t;
  snap.solver_tag = SolverTag::ProductFlow;
  snap.clamped = s1.clamped + s2.clamped;
  snap.u = GridFunction::rect(phi1.origin[0], phi1.spacing[0], phi1.shape[0],
                              phi2.origin[0], phi2.spacing[0], phi2.shape[0]);
  snap.u.zero_outside = phi1.zero_outside && phi2.zero_outside;
  kernels::outer_product(s1.u.values.data(), phi1.shape[0],
                         s2.u.values.data(), phi2.shape[0],
                         snap.u.values.data());
  return snap;
}

std::vector<FlowSnapshot> dirichlet_cn(const GridFunction& phi,
                                       const std::vector<double>& t_list,
                                       std::optional<double> dt) {
  return march_cn(phi, t_list, dt, nullptr, SolverTag::CrankNicolson);
}

std::vector<FlowSnapshot> semilinear_imex(const GridFunction& phi, double kappa,
                                          double p, double T, double dt) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw ConfigError("semilinear_imex: p must exceed 1");
  if (!(T > 0.0) || !std::isfinite(T))
    throw ConfigError("semilinear_imex: T must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("semilinear_imex: dt must be positive");
  phi.validate();
  ReactionSpec rs{kappa, p, phi.max_value()};
  if (kappa > 0.0) {
    const double guard =
        std::pow(rs.norm0, -(p - 1.0)) / (kappa * (p - 1.0));
    if (!(T < guard))
      throw ConfigError(
          "semilinear_imex: T reaches the blow-up guard "
          "||phi||^{-(p-1)}/(kappa (p-1)) = " +
          std::to_string(guard));
  }
  std::vector<double> checkpoints;
  const int n_check = 10;
  checkpoints.reserve(n_check);
  for (int k = 1; k < n_check; ++k) checkpoints.push_back(T * k / n_check);
  checkpoints.push_back(T);  // land on T exactly, no rounding residue
  return march_cn(phi, checkpoints, dt, &rs, SolverTag::SemilinearIMEX);
}

}  // namespace concaflow
