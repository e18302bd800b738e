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

#include "concaflow/hierarchy.hpp"

#include <cmath>
#include <vector>

#include "concaflow/hot.hpp"
#include "concaflow/kernels.hpp"

namespace concaflow {

namespace {

// Worst scaled midpoint violation over all even-gap pairs of a sampled line,
// with the witness pair of the maximum.
struct LineSweep {
  double worst = -kInf;
  std::int64_t left = -1;
  std::int64_t gap = 0;
};

LineSweep sweep_all_gaps(const std::vector<double>& g) {
  LineSweep out;
  const auto n = static_cast<std::int64_t>(g.size());
  for (std::int64_t gap = 1; 2 * gap < n; ++gap) {
    const auto r = kernels::concave_pair_sweep_rel(g.data(), n, gap);
    if (r.violation > out.worst) {
      out.worst = r.violation;
      out.left = r.index;
      out.gap = gap;
    }
  }
  return out;
}

// Right end of the default comparison window for F1(f2(z)): F2's J-window,
// capped so f2 stays a hair inside the common interval [0, min(a1, a2)).
// The 1e-9 log-space headroom keeps the composition representable even when
// a1 == a2, where f2 approaches F1's excluded endpoint within an ulp.
double composition_cap(const AdmissibleFunction& F1,
                       const AdmissibleFunction& F2) {
  double hi = F2.J_hi();
  if (std::isfinite(F1.a()) && F1.a() <= F2.a())
    hi = std::fmin(hi, F2.F_from_log(std::log(F1.a()) - 1e-9));
  return hi;
}

}  // namespace

ComparisonResult line_concavity(const std::vector<double>& g,
                                const SamplingSpec& window, double tol) {
  const LineSweep s = sweep_all_gaps(g);
  ComparisonResult res;
  res.tolerance = tol;
  res.worst_violation = s.worst == -kInf ? 0.0 : std::fmax(s.worst, 0.0);
  res.holds = res.worst_violation <= tol;
  if (!res.holds && s.left >= 0) {
    res.has_witness = true;
    res.witness = {window.point(static_cast<int>(s.left)),
                   window.point(static_cast<int>(s.left + 2 * s.gap)), 0.5};
  }
  return res;
}

ComparisonResult is_weaker(const AdmissibleFunction& F1,
                           const AdmissibleFunction& F2, SamplingSpec window,
                           double tol) {
  if (window.empty()) {
    window = default_window(F2.J_lo(), composition_cap(F1, F2));
  }
  if (window.n < 3) throw ConfigError("is_weaker: window needs >= 3 samples");
  std::vector<double> g(static_cast<std::size_t>(window.n));
  for (int i = 0; i < window.n; ++i)
    g[static_cast<std::size_t>(i)] = F1.F_from_log(F2.log_f(window.point(i)));
  return line_concavity(g, window, tol);
}

bool strictly_weaker(const AdmissibleFunction& F1, const AdmissibleFunction& F2,
                     double tol) {
  const ComparisonResult fwd = is_weaker(F1, F2, {}, tol);
  if (!fwd.holds) return false;
  const ComparisonResult rev = is_weaker(F2, F1, {}, tol);
  return rev.worst_violation > 10.0 * tol;
}

EquivalenceResult equivalent(const AdmissibleFunction& F1,
                             const AdmissibleFunction& F2, SamplingSpec window,
                             double tol) {
  if (window.empty()) {
    window = default_window(F2.J_lo(), composition_cap(F1, F2), 513);
  }
  if (window.n < 3)
    throw ConfigError("equivalent: need at least 3 window samples");
  const int n = window.n;
  std::vector<double> z(static_cast<std::size_t>(n)), g(static_cast<std::size_t>(n));
  double zm = 0.0, gm = 0.0;
  for (int i = 0; i < n; ++i) {
    z[static_cast<std::size_t>(i)] = window.point(i);
    g[static_cast<std::size_t>(i)] =
        F1.F_from_log(F2.log_f(window.point(i)));
    if (!std::isfinite(g[static_cast<std::size_t>(i)]))
      throw NumericError("equivalent: composition not finite on window");
    zm += z[static_cast<std::size_t>(i)];
    gm += g[static_cast<std::size_t>(i)];
  }
  zm /= n;
  gm /= n;
  double szz = 0.0, szg = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dz = z[static_cast<std::size_t>(i)] - zm;
    szz += dz * dz;
    szg += dz * (g[static_cast<std::size_t>(i)] - gm);
  }
  EquivalenceResult res;
  res.A = szg / szz;
  res.B = gm - res.A * zm;
  double scale = 1.0;
  for (int i = 0; i < n; ++i)
    scale = std::fmax(scale, std::fabs(g[static_cast<std::size_t>(i)]));
  for (int i = 0; i < n; ++i) {
    const double r = std::fabs(g[static_cast<std::size_t>(i)] -
                               (res.A * z[static_cast<std::size_t>(i)] + res.B));
    res.max_residual = std::fmax(res.max_residual, r);
  }
  res.equivalent = res.A > 0.0 && res.max_residual <= tol * scale;
  return res;
}

ComparisonResult scalar_closure(const AdmissibleFunction& F, double kappa,
                                SamplingSpec window, double tol) {
  if (!(kappa > 0.0 && kappa < 1.0 - 1e-9))
    throw DomainError("scalar_closure: kappa must lie in (0,1) with margin");
  if (window.empty()) window = F.default_J_window();
  if (window.n < 3)
    throw ConfigError("scalar_closure: window needs >= 3 samples");
  const double logk = std::log(kappa);
  std::vector<double> g(static_cast<std::size_t>(window.n));
  for (int i = 0; i < window.n; ++i)
    g[static_cast<std::size_t>(i)] =
        F.F_from_log(logk + F.log_f(window.point(i)));
  return line_concavity(g, window, tol);
}

std::pair<GridFunction, double> ha_approximant(double a,
                                               const GridFunction& logf,
                                               double epsilon_solver_tol) {
  if (!(a > 0.0) || std::isinf(a))
    throw DomainError("ha_approximant: a must be positive and finite");
  for (double v : logf.values)
    if (std::isnan(v) || v == kInf)
      throw ConfigError("ha_approximant: log-values must be finite or -inf");

  // eps * h'(-2/eps) is strictly increasing in eps (both factors are), so
  // bisection on a fixed bracket suffices; tiny a pushes the root above the
  // bracket and is reported, not extrapolated.
  const double target = 1.0 / a;
  auto q = [](double eps) { return eps * hot_h_prime(-2.0 / eps); };
  double lo = 1e-6, hi = 1e3;
  if (!(q(lo) < target && q(hi) > target))
    throw NumericError("ha_approximant: bracket failure solving for eps (a too small)");
  while (hi - lo > epsilon_solver_tol * std::fmax(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    (q(mid) < target ? lo : hi) = mid;
  }
  const double eps = 0.5 * (lo + hi);

  GridFunction out = logf;
  for (auto& v : out.values) {
    // a*h(eps*v - 2/eps): the overflow-safe spelling of the closed-form
    // integral; h(-inf) = 0 covers the zeros of f.
    v = v == -kInf ? 0.0 : a * hot_h(eps * v - 2.0 / eps);
  }
  return {std::move(out), eps};
}

bool limit_inheritance_check(const AdmissibleFunction& F1,
                             const AdmissibleFunction& F2) {
  if (!F2.limit_at_zero_is_minus_infinity()) return true;
  if (!is_weaker(F1, F2).holds) return true;
  return F1.limit_at_zero_is_minus_infinity();
}

}  // namespace concaflow
