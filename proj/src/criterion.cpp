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

#include "concaflow/criterion.hpp"

#include <algorithm>
#include <cmath>

namespace concaflow {

namespace {

CriterionCondition cond_from(const std::string& name,
                             const ComparisonResult& r) {
  CriterionCondition c;
  c.name = name;
  c.passed = r.holds;
  c.worst_violation = r.worst_violation;
  c.has_witness = r.has_witness;
  c.witness = r.witness;
  return c;
}

CriterionCondition cond_value(const std::string& name, bool passed,
                              double violation, double witness_z) {
  CriterionCondition c;
  c.name = name;
  c.passed = passed;
  c.worst_violation = violation;
  if (!passed) {
    c.has_witness = true;
    c.witness = {witness_z, witness_z, 0.5};
  }
  return c;
}

void finalize(CriterionVerdict& v) {
  v.preserved = std::all_of(v.conditions.begin(), v.conditions.end(),
                            [](const CriterionCondition& c) { return c.passed; });
}

// The three transform-side conditions shared by the linear and reaction
// verdicts: vanishing limit at zero, positive slope, concave slope rate.
void append_transform_conditions(const AdmissibleFunction& F,
                                 const SamplingSpec& window, double tol,
                                 CriterionVerdict& v) {
  const bool lim = F.limit_at_zero_is_minus_infinity();
  const double lim_gap =
      lim ? 0.0 : (std::isfinite(F.J_lo()) ? std::fabs(F.J_lo()) : 1.0);
  v.conditions.push_back(
      cond_value("limit_at_zero", lim, lim_gap, F.J_lo()));

  bool slope_ok = true;
  double bad_z = 0.0;
  for (int i = 0; i < window.n && slope_ok; ++i) {
    const double lfp = F.log_f_prime(window.point(i));
    if (!(lfp > -kInf)) {  // -inf or NaN: slope vanished or is undefined
      slope_ok = false;
      bad_z = window.point(i);
    }
  }
  v.conditions.push_back(
      cond_value("positive_slope", slope_ok, slope_ok ? 0.0 : 1.0, bad_z));

  std::vector<double> g(static_cast<std::size_t>(window.n));
  for (int i = 0; i < window.n; ++i)
    g[static_cast<std::size_t>(i)] = F.log_fprime_derivative(window.point(i));
  v.conditions.push_back(
      cond_from("slope_rate_concave", line_concavity(g, window, tol)));
}

SamplingSpec resolve_window(const AdmissibleFunction& F, SamplingSpec window) {
  if (window.empty()) window = F.default_J_window();
  if (window.n < 3)
    throw ConfigError("criterion window needs at least 3 samples");
  return window;
}

void maybe_note_window_limited(const AdmissibleFunction& F,
                               CriterionVerdict& v) {
  if (F.family() == FamilyTag::Tabulated) {
    if (!v.notes.empty()) v.notes += "; ";
    v.notes +=
        "window-limited: tabulated transform, verdict certified only on the "
        "sampled window";
  }
}

// Unit directions for the joint (x, z) and x-only second-difference scans:
// the coordinate axes plus eight seeded pseudo-random directions.  The seed
// is fixed so verdicts are reproducible run to run.
std::vector<std::vector<double>> direction_set(int dim) {
  std::vector<std::vector<double>> dirs;
  for (int k = 0; k < dim; ++k) {
    std::vector<double> d(static_cast<std::size_t>(dim), 0.0);
    d[static_cast<std::size_t>(k)] = 1.0;
    dirs.push_back(d);
  }
  Rng rng(0x5eed0000u + static_cast<unsigned>(dim));
  for (int k = 0; k < 8; ++k) {
    std::vector<double> d(static_cast<std::size_t>(dim));
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& di : d) {
        di = rng.uniform(-1.0, 1.0);
        norm += di * di;
      }
    } while (norm < 1e-6);
    norm = std::sqrt(norm);
    for (auto& di : d) di /= norm;
    dirs.push_back(d);
  }
  return dirs;
}

struct ScanWorst {
  double violation = 0.0;
  std::vector<double> at;
};

}  // namespace

CriterionVerdict dhf_criterion(const AdmissibleFunction& F,
                               SamplingSpec window, double tol) {
  window = resolve_window(F, window);
  CriterionVerdict v;
  append_transform_conditions(F, window, tol, v);
  maybe_note_window_limited(F, v);
  finalize(v);
  return v;
}

CriterionVerdict semilinear_criterion(const AdmissibleFunction& F,
                                      double kappa, double p,
                                      SamplingSpec window, double tol) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw DomainError("semilinear_criterion: p must exceed 1");
  if (!std::isfinite(kappa))
    throw DomainError("semilinear_criterion: kappa must be finite");

  CriterionVerdict v;
  if (kappa > 0.0) {
    v.conditions.push_back(
        cond_value("nonpositive_coupling", false, kappa, 0.0));
    v.notes =
        "positive coupling: concavity of this kind is never preserved, for "
        "any admissible transform; the numeric conditions are not evaluated";
    finalize(v);
    return v;
  }

  window = resolve_window(F, window);
  append_transform_conditions(F, window, tol, v);

  // Reaction transform kappa * f^p / f', assembled in log space so the
  // deep-window underflow of f and f' cancels instead of poisoning it.
  std::vector<double> g(static_cast<std::size_t>(window.n));
  for (int i = 0; i < window.n; ++i) {
    const double z = window.point(i);
    g[static_cast<std::size_t>(i)] =
        kappa * std::exp(p * F.log_f(z) - F.log_f_prime(z));
  }
  v.conditions.push_back(
      cond_from("reaction_transform_concave", line_concavity(g, window, tol)));
  maybe_note_window_limited(F, v);
  finalize(v);
  return v;
}

ComparisonResult necessary_Htilde(const AdmissibleFunction& F,
                                  const ReactionEvaluator& G,
                                  const std::vector<double>& theta, double ell,
                                  SamplingSpec line_window, double tol) {
  if (!G) throw ConfigError("necessary_Htilde: missing reaction evaluator");
  if (theta.empty())
    throw ConfigError("necessary_Htilde: theta must have at least 1 entry");
  double t2 = 0.0;
  for (double th : theta) {
    if (!std::isfinite(th))
      throw ConfigError("necessary_Htilde: theta entries must be finite");
    t2 += th * th;
  }

  std::string note =
      "no positive slope limit of the transform at zero is assumed";
  if (line_window.empty()) {
    // Default: the transform's J-window, shrunk to where f' stays
    // representable so the quotient by f' is well defined.
    const SamplingSpec full = F.default_J_window();
    int first = -1, last = -1;
    for (int i = 0; i < full.n; ++i) {
      if (F.log_f_prime(full.point(i)) > -690.0) {
        if (first < 0) first = i;
        last = i;
      }
    }
    if (first < 0 || last - first < 2)
      throw NumericError(
          "necessary_Htilde: slope underflows across the whole window");
    line_window = SamplingSpec{full.point(first), full.point(last), full.n};
    if (first > 0 || last < full.n - 1)
      note += "; window shrunk to keep the slope representable";
  } else {
    if (!(line_window.lo > F.J_lo()) || !(line_window.hi < F.J_hi()))
      throw DomainError("necessary_Htilde: window leaves the J interval");
    if (line_window.n < 3)
      throw ConfigError("necessary_Htilde: window needs at least 3 samples");
  }

  const auto dim = theta.size();
  std::vector<double> x(dim, 0.0), grad(dim, 0.0);
  std::vector<double> g(static_cast<std::size_t>(line_window.n));
  for (int i = 0; i < line_window.n; ++i) {
    const double z = line_window.point(i);
    const double fp = std::exp(F.log_f_prime(z));
    if (fp == 0.0)
      throw DomainError(
          "necessary_Htilde: slope underflows inside the requested window");
    const double u = std::exp(F.log_f(z));
    if (t2 > 0.0) {
      for (std::size_t k = 0; k < dim; ++k) x[k] = (z - ell) / t2 * theta[k];
    }
    for (std::size_t k = 0; k < dim; ++k) grad[k] = fp * theta[k];
    const double gval = G(x, u, grad);
    if (std::isnan(gval))
      throw NumericError("necessary_Htilde: reaction evaluator returned NaN");
    g[static_cast<std::size_t>(i)] =
        gval / fp + F.log_fprime_derivative(z) * t2;
  }

  ComparisonResult res = line_concavity(g, line_window, tol);
  res.notes = note;
  return res;
}

CriterionVerdict linear_vc_conditions(const CoefficientField& coeffs,
                                      const AdmissibleFunction* F,
                                      SamplingSpec domain_samples, double tol) {
  const int dim = coeffs.dim;
  if (dim != 1 && dim != 2)
    throw ConfigError("linear_vc_conditions: dim must be 1 or 2");
  if (!coeffs.A || !coeffs.b || !coeffs.c)
    throw ConfigError("linear_vc_conditions: all three samplers are required");
  if (domain_samples.empty()) domain_samples = SamplingSpec{-2.0, 2.0, 21};
  if (!(domain_samples.lo < domain_samples.hi) || domain_samples.n < 5)
    throw ConfigError("linear_vc_conditions: degenerate domain samples");

  // Anchor grid per axis, coarsened so the direction scans stay bounded.
  const int m = std::min(domain_samples.n, 21);
  const SamplingSpec axis{domain_samples.lo, domain_samples.hi, m};
  const double span_x = domain_samples.hi - domain_samples.lo;

  std::vector<std::vector<double>> anchors;
  if (dim == 1) {
    for (int i = 0; i < m; ++i) anchors.push_back({axis.point(i)});
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        anchors.push_back({axis.point(i), axis.point(j)});
  }

  auto eval_A = [&](const std::vector<double>& x) {
    std::vector<double> a = coeffs.A(x);
    if (a.size() != static_cast<std::size_t>(dim * dim))
      throw ConfigError("linear_vc_conditions: A sample has the wrong shape");
    double scale = 0.0;
    for (double e : a) scale = std::fmax(scale, std::fabs(e));
    if (dim == 2 && std::fabs(a[1] - a[2]) > 1e-9 * std::fmax(1.0, scale))
      throw DomainError("linear_vc_conditions: A sample is not symmetric");
    const bool pd = dim == 1 ? a[0] > 0.0
                             : (a[0] > 0.0 && a[0] * a[3] - a[1] * a[2] > 0.0);
    if (!pd)
      throw DomainError(
          "linear_vc_conditions: A sample is not positive-definite");
    return a;
  };

  auto quad = [&](const std::vector<double>& a, const std::vector<double>& th) {
    if (dim == 1) return a[0] * th[0] * th[0];
    return a[0] * th[0] * th[0] + (a[1] + a[2]) * th[0] * th[1] +
           a[3] * th[1] * th[1];
  };

  CriterionVerdict v;
  const auto xdirs = direction_set(dim);

  // Drift affinity: every component's second differences vanish.
  {
    ScanWorst worst;
    const double step = 0.12 * span_x;
    std::vector<double> xl(static_cast<std::size_t>(dim)),
        xr(static_cast<std::size_t>(dim));
    for (const auto& anchor : anchors) {
      for (const auto& d : xdirs) {
        bool inside = true;
        for (int k = 0; k < dim; ++k) {
          xl[static_cast<std::size_t>(k)] =
              anchor[static_cast<std::size_t>(k)] -
              step * d[static_cast<std::size_t>(k)];
          xr[static_cast<std::size_t>(k)] =
              anchor[static_cast<std::size_t>(k)] +
              step * d[static_cast<std::size_t>(k)];
          inside = inside &&
                   xl[static_cast<std::size_t>(k)] >= domain_samples.lo &&
                   xr[static_cast<std::size_t>(k)] <= domain_samples.hi;
        }
        if (!inside) continue;
        const auto bl = coeffs.b(xl), bm = coeffs.b(anchor), br = coeffs.b(xr);
        if (bl.size() != static_cast<std::size_t>(dim) ||
            bm.size() != static_cast<std::size_t>(dim) ||
            br.size() != static_cast<std::size_t>(dim))
          throw ConfigError(
              "linear_vc_conditions: b sample has the wrong shape");
        for (int k = 0; k < dim; ++k) {
          const double dev =
              std::fabs(0.5 * (bl[static_cast<std::size_t>(k)] +
                               br[static_cast<std::size_t>(k)]) -
                        bm[static_cast<std::size_t>(k)]) /
              std::fmax(1.0, std::fabs(bm[static_cast<std::size_t>(k)]));
          if (dev > worst.violation) worst = {dev, anchor};
        }
      }
    }
    v.conditions.push_back(cond_value(
        "drift_affine", worst.violation <= tol, worst.violation,
        worst.at.empty() ? 0.0 : worst.at[0]));
  }

  if (F != nullptr) {
    // General transform: the zeroth-order coefficient must vanish, and the
    // slope-rate profile against the diffusion matrix must be jointly
    // concave in (x, z) for every probe theta.
    {
      double worst = 0.0, at = 0.0;
      for (const auto& anchor : anchors) {
        const double cv = std::fabs(coeffs.c(anchor));
        if (cv > worst) {
          worst = cv;
          at = anchor[0];
        }
      }
      v.conditions.push_back(
          cond_value("no_zeroth_order_term", worst <= tol, worst, at));
    }

    std::vector<std::vector<double>> thetas;
    if (dim == 1) {
      thetas = {{0.0}, {1.0}, {-1.0}, {3.0}};
    } else {
      const double r = 1.0 / std::sqrt(2.0);
      thetas = {{0.0, 0.0}, {1.0, 0.0},  {-1.0, 0.0}, {0.0, 1.0},
                {0.0, -1.0}, {r, r},     {3.0, 0.0}};
    }

    const SamplingSpec zwin = F->default_J_window(21);
    const double span_z = zwin.hi - zwin.lo;
    const auto jdirs = direction_set(dim + 1);

    ScanWorst worst;
    double worst_z = 0.0;
    std::vector<double> xl(static_cast<std::size_t>(dim)),
        xm(static_cast<std::size_t>(dim)), xr(static_cast<std::size_t>(dim));
    for (const auto& anchor : anchors) {
      for (int zi = 0; zi < zwin.n; ++zi) {
        const double z = zwin.point(zi);
        for (const auto& d : jdirs) {
          bool inside = true;
          for (int k = 0; k < dim; ++k) {
            const double dk = 0.12 * span_x * d[static_cast<std::size_t>(k)];
            xl[static_cast<std::size_t>(k)] =
                anchor[static_cast<std::size_t>(k)] - dk;
            xm[static_cast<std::size_t>(k)] =
                anchor[static_cast<std::size_t>(k)];
            xr[static_cast<std::size_t>(k)] =
                anchor[static_cast<std::size_t>(k)] + dk;
            inside = inside &&
                     xl[static_cast<std::size_t>(k)] >= domain_samples.lo &&
                     xr[static_cast<std::size_t>(k)] <= domain_samples.hi;
          }
          const double dz = 0.12 * span_z * d[static_cast<std::size_t>(dim)];
          const double zl = z - dz, zr = z + dz;
          inside = inside && zl >= zwin.lo && zr <= zwin.hi;
          if (!inside) continue;
          const auto al = eval_A(xl), am = eval_A(xm), ar = eval_A(xr);
          const double rl = F->log_fprime_derivative(zl);
          const double rm = F->log_fprime_derivative(z);
          const double rr = F->log_fprime_derivative(zr);
          for (const auto& th : thetas) {
            const double pl = rl * quad(al, th);
            const double pm = rm * quad(am, th);
            const double pr = rr * quad(ar, th);
            const double cand =
                (0.5 * (pl + pr) - pm) / std::fmax(1.0, std::fabs(pm));
            if (cand > worst.violation) {
              worst = {cand, anchor};
              worst_z = z;
            }
          }
        }
      }
    }
    CriterionCondition c = cond_value("diffusion_rate_joint_concave",
                                      worst.violation <= tol, worst.violation,
                                      worst.at.empty() ? 0.0 : worst.at[0]);
    if (!c.passed) c.witness.w = worst_z;  // (x1, z) of the violating anchor
    v.conditions.push_back(c);

    append_transform_conditions(*F, resolve_window(*F, {}), tol, v);
    maybe_note_window_limited(*F, v);
  } else {
    // Log-concavity variant: constant diffusion, affine drift (already
    // checked above), convex zeroth-order coefficient.
    {
      const auto ref = eval_A(anchors.front());
      double worst = 0.0, at = 0.0;
      double scale = 1.0;
      for (double e : ref) scale = std::fmax(scale, std::fabs(e));
      for (const auto& anchor : anchors) {
        const auto a = eval_A(anchor);
        for (std::size_t k = 0; k < a.size(); ++k) {
          const double dev = std::fabs(a[k] - ref[k]) / scale;
          if (dev > worst) {
            worst = dev;
            at = anchor[0];
          }
        }
      }
      v.conditions.push_back(
          cond_value("diffusion_constant", worst <= tol, worst, at));
    }
    {
      ScanWorst worst;
      const double step = 0.12 * span_x;
      std::vector<double> xl(static_cast<std::size_t>(dim)),
          xr(static_cast<std::size_t>(dim));
      for (const auto& anchor : anchors) {
        for (const auto& d : xdirs) {
          bool inside = true;
          for (int k = 0; k < dim; ++k) {
            xl[static_cast<std::size_t>(k)] =
                anchor[static_cast<std::size_t>(k)] -
                step * d[static_cast<std::size_t>(k)];
            xr[static_cast<std::size_t>(k)] =
                anchor[static_cast<std::size_t>(k)] +
                step * d[static_cast<std::size_t>(k)];
            inside = inside &&
                     xl[static_cast<std::size_t>(k)] >= domain_samples.lo &&
                     xr[static_cast<std::size_t>(k)] <= domain_samples.hi;
          }
          if (!inside) continue;
          const double cand = 0.5 * (coeffs.c(xl) + coeffs.c(xr)) -
                              coeffs.c(anchor);
          const double dev = std::fmax(0.0, -cand) /
                             std::fmax(1.0, std::fabs(coeffs.c(anchor)));
          if (dev > worst.violation) worst = {dev, anchor};
        }
      }
      v.conditions.push_back(cond_value(
          "zeroth_order_convex", worst.violation <= tol, worst.violation,
          worst.at.empty() ? 0.0 : worst.at[0]));
    }
    v.notes = "log-concavity variant: transform conditions not applicable";
  }

  finalize(v);
  return v;
}

ComparisonResult minus_one_concavity(const AdmissibleFunction& F,
                                     SamplingSpec window, double tol) {
  window = resolve_window(F, window);
  // Convexity of f/f' tested as concavity of its negation; the quotient is
  // built in log space so both factors may underflow freely.
  std::vector<double> g(static_cast<std::size_t>(window.n));
  for (int i = 0; i < window.n; ++i) {
    const double z = window.point(i);
    g[static_cast<std::size_t>(i)] = -std::exp(F.log_f(z) - F.log_f_prime(z));
  }
  return line_concavity(g, window, tol);
}

namespace {

SamplingSpec resolve_rate_window(SamplingSpec window) {
  if (window.empty()) window = default_window(0.0, kInf);
  if (!(window.lo > 0.0) || !(window.hi > window.lo) || window.n < 3)
    throw DomainError("initial-rate window must lie inside (0, inf)");
  return window;
}

}  // namespace

CriterionVerdict pm_initial_rate(double m, double alpha, SamplingSpec z_window,
                                 double tol) {
  if (!(m > 1.0) || !std::isfinite(m))
    throw DomainError("pm_initial_rate: m must exceed 1");
  if (!std::isfinite(alpha))
    throw DomainError("pm_initial_rate: alpha must be finite");
  z_window = resolve_rate_window(z_window);

  CriterionVerdict v;
  std::vector<double> g(static_cast<std::size_t>(z_window.n));
  if (alpha == 0.0) {
    for (int i = 0; i < z_window.n; ++i)
      g[static_cast<std::size_t>(i)] =
          m * m * std::exp((m - 1.0) * z_window.point(i));
  } else {
    const double coef = (m / alpha) * (m / alpha - 1.0);
    const double q = -1.0 + (m - 1.0) / alpha;
    for (int i = 0; i < z_window.n; ++i)
      g[static_cast<std::size_t>(i)] =
          coef * std::pow(z_window.point(i), q);
  }
  v.conditions.push_back(
      cond_from("profile_concave", line_concavity(g, z_window, tol)));

  if (alpha == 0.0) {
    // The profile grows like e^{(m-1)z}: no power exponent exists and the
    // growth rate m-1 > 0 is the recorded violation.
    v.conditions.push_back(
        cond_value("exponent_in_unit_range", false, m - 1.0, 0.0));
    v.notes = "alpha = 0: exponential profile, never concave";
  } else {
    const double q = -1.0 + (m - 1.0) / alpha;
    const double gap = std::fmax(0.0, std::fmax(-q, q - 1.0));
    const bool pass = gap <= 1e-12;
    v.conditions.push_back(
        cond_value("exponent_in_unit_range", pass, gap, q));
    v.at_boundary =
        pass && (std::fabs(q) <= 1e-12 || std::fabs(q - 1.0) <= 1e-12);
    if (v.at_boundary) v.notes = "exponent condition holds with equality";
  }
  finalize(v);
  return v;
}

CriterionVerdict plaplace_initial_rate(double p, double alpha,
                                       SamplingSpec z_window, double tol) {
  if (!(p > 2.0) || !std::isfinite(p))
    throw DomainError("plaplace_initial_rate: p must exceed 2");
  if (!std::isfinite(alpha))
    throw DomainError("plaplace_initial_rate: alpha must be finite");
  z_window = resolve_rate_window(z_window);

  CriterionVerdict v;
  std::vector<double> g(static_cast<std::size_t>(z_window.n));
  if (alpha == 0.0) {
    for (int i = 0; i < z_window.n; ++i)
      g[static_cast<std::size_t>(i)] =
          (p - 1.0) * std::exp((p - 2.0) * z_window.point(i));
  } else {
    const double coef = (p - 1.0) /
                        (std::pow(std::fabs(alpha), p - 2.0) * alpha) *
                        ((1.0 - alpha) / alpha);
    const double q = (p - 2.0) / alpha - (p - 1.0);
    for (int i = 0; i < z_window.n; ++i)
      g[static_cast<std::size_t>(i)] =
          coef * std::pow(z_window.point(i), q);
  }
  v.conditions.push_back(
      cond_from("profile_concave", line_concavity(g, z_window, tol)));

  const double threshold = (p - 2.0) / p;
  const double gap = std::fmax(0.0, threshold - alpha);
  const bool pass = gap <= 1e-12;
  v.conditions.push_back(
      cond_value("exponent_threshold", pass, gap, alpha));
  if (alpha != 0.0) {
    const double q = (p - 2.0) / alpha - (p - 1.0);
    v.at_boundary =
        pass && (std::fabs(q) <= 1e-12 || std::fabs(q - 1.0) <= 1e-12);
    if (v.at_boundary) v.notes = "exponent condition holds with equality";
  } else {
    v.notes = "alpha = 0: exponential profile, never concave";
  }
  finalize(v);
  return v;
}

}  // namespace concaflow
