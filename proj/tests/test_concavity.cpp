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

#include <algorithm>
#include <cmath>
#include <vector>

#include "concaflow/admissible.hpp"
#include "concaflow/common.hpp"
#include "concaflow/concavity.hpp"
#include "concaflow/flow.hpp"
#include "concaflow/grid.hpp"
#include "concaflow/hot.hpp"

using namespace concaflow;

namespace {

AdmissibleFunction phi(double alpha) { return AdmissibleFunction::power(alpha); }
AdmissibleFunction lal(double alpha) {
  return AdmissibleFunction::power_log(alpha);
}
AdmissibleFunction hot_f(double a) { return AdmissibleFunction::hot(a); }

double sup_diff(const GridFunction& a, const GridFunction& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    d = std::fmax(d, std::fabs(a.values[i] - b.values[i]));
  return d;
}

// Concave profile built as the minimum of a few random affine functions,
// shifted into the transform's useful window, with an optional zeroed tail.
GridFunction random_F_concave(const AdmissibleFunction& F, Rng& rng, int n) {
  const SamplingSpec win = F.default_J_window();
  const double wlo = std::max(win.lo, -30.0);
  double whi = std::min(win.hi, 30.0);
  // Keep values a safe distance below a finite top of the admissible range.
  if (std::isfinite(F.a()))
    while (whi > wlo + 0.5 &&
           std::exp(F.log_f(whi)) > F.a() * (1.0 - 1e-9))
      whi -= 0.25 * (whi - wlo);
  GridFunction u = GridFunction::line(0.0, 1.0 / (n - 1), n);
  std::vector<double> z(n, kInf);
  for (int k = 0; k < 3; ++k) {
    const double a = rng.uniform(wlo, whi);
    const double b = rng.uniform(-4.0, 4.0) * (whi - wlo);
    for (int i = 0; i < n; ++i)
      z[i] = std::min(z[i], a + b * (u.x(i) - 0.5));
  }
  const double zmin = *std::min_element(z.begin(), z.end());
  const double shift = zmin < wlo ? wlo - zmin : 0.0;
  for (int i = 0; i < n; ++i)
    u.values[i] = std::exp(F.log_f(std::min(z[i] + shift, whi)));
  if (rng.uniform(0.0, 1.0) < 0.5) {
    const int cut = static_cast<int>(rng.integer(0, n / 4));
    if (rng.uniform(0.0, 1.0) < 0.5)
      std::fill(u.values.begin(), u.values.begin() + cut, 0.0);
    else
      std::fill(u.values.end() - cut, u.values.end(), 0.0);
  }
  return u;
}

// Exhaustive 1D envelope oracle: best two-point combination over every
// support pair straddling the node, in transform coordinates.
GridFunction envelope_oracle_1d(const GridFunction& u,
                                const AdmissibleFunction& F) {
  const int n = u.shape[0];
  std::vector<double> y(n);
  int lo = n, hi = -1;
  for (int i = 0; i < n; ++i) {
    y[i] = u.values[i] == 0.0 ? -kInf : F.F(u.values[i]);
    if (y[i] != -kInf) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }
  GridFunction env = u;
  std::fill(env.values.begin(), env.values.end(), 0.0);
  if (hi < 0) return env;
  for (int k = lo; k <= hi; ++k) {
    double best = y[k];
    for (int i = lo; i <= k; ++i) {
      if (y[i] == -kInf) continue;
      for (int j = k; j <= hi; ++j) {
        if (y[j] == -kInf || i == j) continue;
        const double t = static_cast<double>(k - i) / (j - i);
        best = std::max(best, (1.0 - t) * y[i] + t * y[j]);
      }
    }
    env.values[k] =
        best == -kInf ? u.values[k] : std::max(F.f(best), u.values[k]);
  }
  return env;
}

// Exhaustive 2D envelope oracle: best one-, two-, or three-point barycentric
// combination of support points covering the node.
GridFunction envelope_oracle_2d(const GridFunction& u,
                                const AdmissibleFunction& F) {
  struct P {
    double x, y, h;
  };
  std::vector<P> s;
  for (int i = 0; i < u.shape[0]; ++i)
    for (int j = 0; j < u.shape[1]; ++j)
      if (u.at(i, j) > 0.0) s.push_back({u.x(i), u.y(j), F.F(u.at(i, j))});
  GridFunction env = u;
  std::fill(env.values.begin(), env.values.end(), 0.0);
  const int m = static_cast<int>(s.size());
  for (int i = 0; i < u.shape[0]; ++i)
    for (int j = 0; j < u.shape[1]; ++j) {
      const double qx = u.x(i), qy = u.y(j);
      double best = -kInf;
      for (int a = 0; a < m; ++a) {
        if (std::fabs(s[a].x - qx) < 1e-12 && std::fabs(s[a].y - qy) < 1e-12)
          best = std::max(best, s[a].h);
        for (int b = a + 1; b < m; ++b) {
          const double ex = s[b].x - s[a].x, ey = s[b].y - s[a].y;
          const double px = qx - s[a].x, py = qy - s[a].y;
          const double e2 = ex * ex + ey * ey;
          if (e2 > 0.0 && std::fabs(px * ey - py * ex) < 1e-12 * std::sqrt(e2)) {
            const double t = (px * ex + py * ey) / e2;
            if (t >= -1e-12 && t <= 1.0 + 1e-12)
              best = std::max(best, (1.0 - t) * s[a].h + t * s[b].h);
          }
          for (int c = b + 1; c < m; ++c) {
            const double det = (s[b].x - s[a].x) * (s[c].y - s[a].y) -
                               (s[b].y - s[a].y) * (s[c].x - s[a].x);
            if (std::fabs(det) < 1e-12) continue;
            const double lb =
                ((s[c].y - s[a].y) * px - (s[c].x - s[a].x) * py) / det;
            const double lc =
                ((s[a].y - s[b].y) * px + (s[b].x - s[a].x) * py) / det;
            const double la = 1.0 - lb - lc;
            if (la >= -1e-10 && lb >= -1e-10 && lc >= -1e-10)
              best = std::max(best, la * s[a].h + lb * s[b].h + lc * s[c].h);
          }
        }
      }
      if (best != -kInf) env.at(i, j) = std::max(F.f(best), u.at(i, j));
    }
  return env;
}

}  // namespace

TEST_CASE("transform-affine data passes the F-concavity scan") {
  // 1D: power(-1) has f(z) = 1/(1-z); feed it an affine z so F(u) is affine.
  const AdmissibleFunction F = phi(-1.0);
  GridFunction u = GridFunction::line(0.0, 0.01, 101);
  for (int i = 0; i < 101; ++i) u.values[i] = F.f(-2.0 + 2.0 * u.x(i));
  const ConcavityReport rep = check_F_concavity(u, F, 1e-9);
  CHECK(rep.passed);
  CHECK(rep.worst_violation <= 1e-10);
  CHECK(!rep.has_witness);
  CHECK(rep.kind == ConcavityKind::FConcave);

  // 2D: log-affine data is power(0)-concave.
  GridFunction v = GridFunction::rect(0.0, 0.05, 21, 0.0, 0.05, 21);
  for (int i = 0; i < 21; ++i)
    for (int j = 0; j < 21; ++j)
      v.at(i, j) = std::exp(0.3 - 0.8 * v.x(i) + 0.5 * v.y(j));
  const ConcavityReport rep2 = check_F_concavity(v, phi(0.0), 1e-9);
  CHECK(rep2.passed);
  CHECK(rep2.worst_violation <= 1e-10);
}

TEST_CASE("heat-kernel step profile is exactly hot(1)-concave") {
  GridFunction u = GridFunction::line(-6.0, 8.0 / 200, 201);
  for (int i = 0; i < 201; ++i) u.values[i] = hot_h(u.x(i));
  const ConcavityReport rep = check_F_concavity(u, hot_f(1.0), 1e-9);
  CHECK(rep.passed);
  const ConcavityReport quasi = check_quasi_concavity(u, 0.0);
  CHECK(quasi.passed);
}

TEST_CASE("two-sided exponential: log-concave but not concave") {
  GridFunction u = GridFunction::line(-3.0, 0.025, 241);
  for (int i = 0; i < 241; ++i) u.values[i] = std::exp(-std::fabs(u.x(i)));
  CHECK(check_log_concavity(u, 1e-12).passed);
  // power(1) demands plain concavity, which e^{-x} violates away from 0.
  const ConcavityReport rep = check_F_concavity(u, phi(1.0), 1e-9);
  CHECK(!rep.passed);
  CHECK(rep.has_witness);
  CHECK(rep.worst_violation > 1e-5);
  // The violating pair sits on a single exponential branch.
  CHECK(rep.witness.x[0] * rep.witness.y[0] >= -1e-12);
}

TEST_CASE("quasi-concavity: monotone and product profiles") {
  GridFunction u = GridFunction::line(-4.0, 0.1, 81);
  for (int i = 0; i < 81; ++i) u.values[i] = 1.0 / (1.0 + std::exp(-u.x(i)));
  CHECK(check_quasi_concavity(u, 0.0).passed);

  GridFunction v = GridFunction::rect(-0.5, 1.0 / 64, 65, -3.0, 6.0 / 64, 65);
  const GridFunction step = step_line(-0.5, 1.0 / 64, 65);
  for (int i = 0; i < 65; ++i)
    for (int j = 0; j < 65; ++j)
      v.at(i, j) = step.values[i] * std::exp(-0.5 * v.y(j) * v.y(j));
  const ConcavityReport rep = check_quasi_concavity(v, 0.0);
  CHECK(rep.passed);

  // A two-bump profile is caught.
  GridFunction w = GridFunction::line(-2.0, 0.025, 161);
  for (int i = 0; i < 161; ++i) {
    const double x = w.x(i);
    w.values[i] = std::exp(-4.0 * (x - 1.0) * (x - 1.0)) +
                  std::exp(-4.0 * (x + 1.0) * (x + 1.0));
  }
  const ConcavityReport bump = check_quasi_concavity(w, 1e-6);
  CHECK(!bump.passed);
  CHECK(bump.has_witness);
}

TEST_CASE("zero values: convex support holds, a hole is a hard violation") {
  // Compactly supported slice of an admissible profile for power(2).
  const AdmissibleFunction F = phi(2.0);
  GridFunction u = GridFunction::line(0.0, 0.01, 101);
  for (int i = 0; i < 101; ++i) {
    const double x = u.x(i);
    u.values[i] = (x >= 0.3 && x <= 0.7) ? F.f(-0.4 + 0.5 * x) : 0.0;
  }
  CHECK(check_F_concavity(u, F, 1e-10).passed);

  // Positive values on a disc: still fine in 2D.
  GridFunction d = GridFunction::rect(-1.0, 0.05, 41, -1.0, 0.05, 41);
  for (int i = 0; i < 41; ++i)
    for (int j = 0; j < 41; ++j) {
      const double r2 = d.x(i) * d.x(i) + d.y(j) * d.y(j);
      d.at(i, j) = r2 <= 0.81 ? std::exp(-r2) : 0.0;
    }
  CHECK(check_F_concavity(d, phi(0.0), 1e-10).passed);

  // A zero gap between positive values can never be F-concave.
  GridFunction hole = GridFunction::line(0.0, 0.01, 101);
  for (int i = 0; i < 101; ++i) {
    const double x = hole.x(i);
    hole.values[i] = (x < 0.3 || x > 0.7) ? 1.0 : 0.0;
  }
  const ConcavityReport rep = check_F_concavity(hole, phi(0.0), 1e10);
  CHECK(!rep.passed);
  CHECK(std::isinf(rep.worst_violation));
  CHECK(rep.has_witness);
}

TEST_CASE("random concave constructions pass, and imply quasi-concavity") {
  const AdmissibleFunction fams[] = {phi(0.0), phi(-1.0), phi(0.5), lal(0.75),
                                     hot_f(1.0)};
  Rng rng(0xc0ffee01u);
  for (const AdmissibleFunction& F : fams) {
    for (int rep = 0; rep < 10; ++rep) {
      const GridFunction u = random_F_concave(F, rng, 161);
      const ConcavityReport fr = check_F_concavity(u, F, 1e-10);
      CHECK(fr.passed);
      CHECK(fr.n_checks >= 2000);
      CHECK(check_quasi_concavity(u, 0.0).passed);
    }
  }
}

TEST_CASE("values at the top of the admissible interval are rejected") {
  GridFunction u = GridFunction::line(0.0, 0.1, 11);
  std::fill(u.values.begin(), u.values.end(), 0.5);
  u.values[5] = 1.0;
  CHECK_THROWS_AS(check_F_concavity(u, hot_f(1.0), 1e-9), DomainError);
}

TEST_CASE("1D envelope: fixed points, bridging, and the exhaustive oracle") {
  const AdmissibleFunction F = phi(0.0);

  // Log-concave input is its own envelope.
  GridFunction g = GridFunction::line(-2.0, 0.04, 101);
  for (int i = 0; i < 101; ++i) g.values[i] = std::exp(-g.x(i) * g.x(i));
  CHECK(sup_diff(f_concave_envelope(g, F), g) <= 1e-12);

  // A bimodal profile gets bridged; verify against the all-pairs oracle.
  GridFunction b = GridFunction::line(-2.0, 4.0 / 128, 129);
  for (int i = 0; i < 129; ++i) {
    const double x = b.x(i);
    b.values[i] = std::exp(-6.0 * (x - 1.0) * (x - 1.0)) +
                  0.7 * std::exp(-6.0 * (x + 1.0) * (x + 1.0));
  }
  const GridFunction be = f_concave_envelope(b, F);
  CHECK(sup_diff(be, envelope_oracle_1d(b, F)) <= 1e-8);
  CHECK(!check_log_concavity(b, 1e-8).passed);
  CHECK(check_log_concavity(be, 1e-8).passed);

  // Idempotence and domination.
  const GridFunction be2 = f_concave_envelope(be, F);
  CHECK(sup_diff(be2, be) <= 1e-10);
  for (int i = 0; i < 129; ++i) CHECK(be.values[i] >= b.values[i]);

  // Constant and all-zero inputs are fixed points.
  GridFunction c = GridFunction::line(0.0, 0.1, 21);
  std::fill(c.values.begin(), c.values.end(), 0.75);
  CHECK(sup_diff(f_concave_envelope(c, phi(-1.0)), c) <= 1e-10);
  std::fill(c.values.begin(), c.values.end(), 0.0);
  CHECK(sup_diff(f_concave_envelope(c, phi(-1.0)), c) == 0.0);
}

TEST_CASE("1D envelope: random instances against the oracle") {
  const AdmissibleFunction fams[] = {phi(0.0), phi(-1.0), lal(0.75), hot_f(1.0),
                                     phi(0.5)};
  Rng rng(0xe57a7e02u);
  int done = 0;
  while (done < 10) {
    const AdmissibleFunction& F = fams[done % 5];
    GridFunction u = GridFunction::line(0.0, 1.0 / 64, 65);
    const double zlo = std::max(F.J_lo() + 0.3, -30.0);
    const double zhi = std::min(F.J_hi() - 0.6, 30.0);
    for (int i = 0; i < 65; ++i) {
      const double z = rng.uniform(-6.0, -0.5) +
                       2.0 * std::sin(7.0 * u.x(i) + static_cast<double>(done));
      u.values[i] = rng.uniform(0.0, 1.0) < 0.15
                        ? 0.0
                        : std::exp(F.log_f(std::clamp(z, zlo, zhi)));
    }
    const GridFunction env = f_concave_envelope(u, F);
    CHECK(sup_diff(env, envelope_oracle_1d(u, F)) <= 1e-8);
    CHECK(sup_diff(f_concave_envelope(env, F), env) <= 1e-10);
    for (int i = 0; i < 65; ++i) CHECK(env.values[i] >= u.values[i]);
    ++done;
  }
}

TEST_CASE("2D envelope: oracle agreement on small random grids") {
  const AdmissibleFunction F = phi(0.0);
  Rng rng(0xba5e2d03u);
  for (int rep = 0; rep < 4; ++rep) {
    GridFunction u = GridFunction::rect(0.0, 0.125, 9, 0.0, 0.125, 9);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        u.at(i, j) = rng.uniform(0.0, 1.0) < 0.2
                         ? 0.0
                         : std::exp(rng.uniform(-2.0, 0.0));
    const GridFunction env = f_concave_envelope(u, F);
    CHECK(sup_diff(env, envelope_oracle_2d(u, F)) <= 1e-8);
    for (std::size_t k = 0; k < u.values.size(); ++k)
      CHECK(env.values[k] >= u.values[k]);
  }
}

TEST_CASE("2D envelope: fixed points and degenerate supports") {
  const AdmissibleFunction F = phi(0.0);

  // Strictly log-concave dome: every support point is a hull vertex.
  GridFunction dome = GridFunction::rect(-1.0, 0.125, 17, -1.0, 0.125, 17);
  for (int i = 0; i < 17; ++i)
    for (int j = 0; j < 17; ++j)
      dome.at(i, j) =
          std::exp(-(dome.x(i) * dome.x(i) + 2.0 * dome.y(j) * dome.y(j)));
  CHECK(sup_diff(f_concave_envelope(dome, F), dome) <= 1e-10);

  // Idempotence and domination on a noisy grid.
  Rng rng(0x2d04u);
  GridFunction noisy = GridFunction::rect(0.0, 1.0 / 16, 17, 0.0, 1.0 / 16, 17);
  for (std::size_t k = 0; k < noisy.values.size(); ++k)
    noisy.values[k] = std::exp(rng.uniform(-3.0, 0.0));
  const GridFunction ne = f_concave_envelope(noisy, phi(-1.0));
  CHECK(sup_diff(f_concave_envelope(ne, phi(-1.0)), ne) <= 1e-10);
  for (std::size_t k = 0; k < noisy.values.size(); ++k)
    CHECK(ne.values[k] >= noisy.values[k]);

  // Log-affine data exercises the coplanar branch and is a fixed point.
  GridFunction aff = GridFunction::rect(0.0, 0.1, 11, 0.0, 0.1, 11);
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j)
      aff.at(i, j) = std::exp(-0.2 + 0.4 * aff.x(i) - 0.7 * aff.y(j));
  CHECK(sup_diff(f_concave_envelope(aff, F), aff) <= 1e-10);

  // Support confined to one row reduces to the 1D chain on that row.
  GridFunction row = GridFunction::rect(0.0, 0.1, 11, 0.0, 1.0 / 16, 17);
  for (int j = 0; j < 17; ++j) {
    const double y = row.y(j);
    row.at(3, j) = std::exp(-3.0 * (y - 0.3) * (y - 0.3)) +
                   0.5 * std::exp(-3.0 * (y - 0.9) * (y - 0.9));
  }
  const GridFunction renv = f_concave_envelope(row, F);
  GridFunction slice = GridFunction::line(0.0, 1.0 / 16, 17);
  for (int j = 0; j < 17; ++j) slice.values[j] = row.at(3, j);
  const GridFunction senv = f_concave_envelope(slice, F);
  for (int j = 0; j < 17; ++j)
    CHECK(std::fabs(renv.at(3, j) - senv.values[j]) <= 1e-10);
  for (int i = 0; i < 11; ++i)
    if (i != 3)
      for (int j = 0; j < 17; ++j) CHECK(renv.at(i, j) == 0.0);

  // A single support point stays a single point.
  GridFunction one = GridFunction::rect(0.0, 0.1, 11, 0.0, 0.1, 11);
  one.at(5, 4) = 0.8;
  const GridFunction oenv = f_concave_envelope(one, F);
  CHECK(oenv.at(5, 4) == 0.8);
  double total = 0.0;
  for (double v : oenv.values) total += v;
  CHECK(total == 0.8);
}

TEST_CASE("diffusion snapshots of hot(1)-concave data stay hot(1)-concave") {
  Rng rng(0x5eedf10au);
  for (int rep = 0; rep < 5; ++rep) {
    const double x0 = rng.uniform(0.35, 0.65);
    const double l0 = rng.uniform(-0.5, 1.5);
    const double mL = rng.uniform(1.0, 6.0);
    const double mR = rng.uniform(1.0, 6.0);
    const double sL = (l0 + 11.0 + mL) / (x0 * x0);
    const double sR = (l0 + 11.0 + mR) / ((1.0 - x0) * (1.0 - x0));
    GridFunction u = GridFunction::line(0.0, 1.0 / 256, 257);
    for (int i = 0; i < 257; ++i) {
      const double x = u.x(i);
      const double s = x < x0 ? sL : sR;
      u.values[i] = hot_h(l0 - s * (x - x0) * (x - x0));
    }
    const std::vector<FlowSnapshot> snaps =
        dirichlet_cn(u, {0.01, 0.05}, 2e-4);
    for (const FlowSnapshot& snap : snaps) {
      const ConcavityReport r = check_F_concavity(snap.u, hot_f(1.0), 1e-5);
      CHECK(r.passed);
    }
  }
}

TEST_CASE("disruption datum: anchors and rejections") {
  // Transforms with a finite limit at zero cannot carry the construction.
  CHECK_THROWS_AS(build_disruption_datum(phi(0.5)), ConfigError);
  // Transforms at least as strong as log-concavity have no violation.
  CHECK_THROWS_AS(build_disruption_datum(hot_f(1.0)), ConfigError);
  CHECK_THROWS_AS(build_disruption_datum(lal(1.0)), ConfigError);

  const DisruptionDatum dpm = build_disruption_datum(phi(-1.0));
  CHECK(dpm.violation > 0.0);
  CHECK(dpm.omega > dpm.zeta);
  CHECK(dpm.c > dpm.omega);
  CHECK(dpm.lambda == 0.5);
  CHECK(std::fabs(dpm.omega - 0.49) <= 1e-6);
  CHECK(std::fabs(dpm.c - 0.6175) <= 1e-6);
  CHECK(std::fabs(dpm.zeta - 0.2394737) <= 1e-4);
  // The datum itself scans clean for its own transform.
  CHECK(check_F_concavity(dpm.phi2, phi(-1.0), 1e-8).passed);

  const DisruptionDatum dl2 =
      build_disruption_datum(lal(2.0), {-5.0, 0.45, 400});
  CHECK(std::fabs(dl2.omega - 0.45) <= 1e-6);
  CHECK(std::fabs(dl2.c - 0.4625) <= 1e-6);
  CHECK(std::fabs(dl2.zeta - 0.422682) <= 1e-4);
  CHECK(dl2.violation > 0.0);
}

TEST_CASE("disruption run: violation appears, control stays clean") {
  const SamplingSpec w{-0.5, 0.5, 129};
  const SamplingSpec z{-3.0, 3.0, 129};
  const std::vector<double> times = {0.02, 0.05};

  const DisruptionRun run = run_disruption(phi(-1.0), w, z, times);
  REQUIRE(run.reports.size() == 2);
  CHECK(!run.reports[0].second.passed);
  CHECK(run.reports[0].second.worst_violation > 10.0 * run.budget);

  const DisruptionRun ctrl =
      run_disruption(phi(-1.0), w, z, times, /*control=*/true);
  for (const auto& [t, rep] : ctrl.reports) {
    CHECK(rep.passed);
    CHECK(rep.worst_violation <= ctrl.budget);
  }

  // The step axis must contain w = 0 as a node.
  CHECK_THROWS_AS(run_disruption(phi(-1.0), {-0.5, 0.5, 128}, z, times),
                  ConfigError);
  CHECK_THROWS_AS(run_disruption(phi(-1.0), w, z, {}), ConfigError);
  CHECK_THROWS_AS(run_disruption(phi(-1.0), w, z, {0.05, 0.02}), ConfigError);
}
