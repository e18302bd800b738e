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

#include "concaflow/admissible.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "concaflow/hot.hpp"

namespace concaflow {

namespace {

constexpr double kLogSqrt4Pi = 1.26551212348464539649;

std::string fmt_param(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool near_excluded(double v, double endpoint) {
  if (std::isinf(endpoint)) return false;
  return std::fabs(v - endpoint) <=
         kEndpointMargin * std::fmax(1.0, std::fabs(endpoint));
}

}  // namespace

AdmissibleFunction AdmissibleFunction::power(double alpha) {
  if (!std::isfinite(alpha)) throw ConfigError("power family: alpha not finite");
  AdmissibleFunction F;
  F.tag_ = FamilyTag::Power;
  F.param_ = alpha;
  F.a_ = kInf;
  F.log_a_ = kInf;
  if (alpha > 0.0) {
    F.j_lo_ = -1.0 / alpha;
    F.j_hi_ = kInf;
  } else if (alpha < 0.0) {
    F.j_lo_ = -kInf;
    F.j_hi_ = -1.0 / alpha;
  } else {
    F.j_lo_ = -kInf;
    F.j_hi_ = kInf;
  }
  F.limit_zero_ = alpha <= 0.0;
  F.spec_ = "phi:" + fmt_param(alpha);
  return F;
}

AdmissibleFunction AdmissibleFunction::power_log(double alpha) {
  if (!std::isfinite(alpha))
    throw ConfigError("power_log family: alpha not finite");
  AdmissibleFunction F;
  F.tag_ = FamilyTag::PowerLog;
  F.param_ = alpha;
  F.a_ = 1.0;
  F.log_a_ = 0.0;
  if (alpha > 0.0) {
    F.j_lo_ = -kInf;
    F.j_hi_ = 1.0 / alpha;
  } else if (alpha < 0.0) {
    F.j_lo_ = 1.0 / alpha;  // finite limit at r -> 0+
    F.j_hi_ = kInf;
  } else {
    F.j_lo_ = -kInf;
    F.j_hi_ = kInf;
  }
  F.limit_zero_ = alpha >= 0.0;
  F.spec_ = "lalpha:" + fmt_param(alpha);
  return F;
}

AdmissibleFunction AdmissibleFunction::hot(double a) {
  if (!(a > 0.0)) throw ConfigError("hot family: a must be positive");
  AdmissibleFunction F;
  F.tag_ = FamilyTag::Hot;
  F.param_ = a;
  F.a_ = a;
  F.log_a_ = std::log(a);
  F.j_lo_ = -kInf;
  F.j_hi_ = kInf;
  F.limit_zero_ = true;
  F.spec_ = "hot:" + fmt_param(a);
  return F;
}

AdmissibleFunction AdmissibleFunction::tabulated(std::vector<double> r,
                                                 std::vector<double> F,
                                                 bool limit_at_zero_minus_inf,
                                                 std::string label) {
  if (r.size() != F.size() || r.size() < 4)
    throw ConfigError("tabulated family: need >= 4 matching (r, F) pairs");
  if (!(r.front() > 0.0))
    throw ConfigError("tabulated family: first r must be positive");
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(r[i]) || !std::isfinite(F[i]))
      throw ConfigError("tabulated family: non-finite table entry");
  for (std::size_t i = 1; i < n; ++i)
    if (!(r[i] > r[i - 1] && F[i] > F[i - 1]))
      throw ConfigError("tabulated family: columns must be strictly increasing");

  AdmissibleFunction A;
  A.tag_ = FamilyTag::Tabulated;
  A.a_ = r.back();
  A.log_a_ = std::log(r.back());
  A.j_lo_ = F.front();
  A.j_hi_ = F.back();
  A.limit_zero_ = limit_at_zero_minus_inf;
  A.spec_ = std::move(label);

  // Fritsch-Carlson tangents keep the Hermite interpolant monotone, so the
  // interpolated F stays strictly increasing and invertible.
  std::vector<double> d(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    d[i] = (F[i + 1] - F[i]) / (r[i + 1] - r[i]);
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) m[i] = 0.5 * (d[i - 1] + d[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double al = m[i] / d[i], be = m[i + 1] / d[i];
    const double s = al * al + be * be;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      m[i] = tau * al * d[i];
      m[i + 1] = tau * be * d[i];
    }
  }
  A.tr_ = std::move(r);
  A.tF_ = std::move(F);
  A.tm_ = std::move(m);
  return A;
}

AdmissibleFunction AdmissibleFunction::tabulated_from_file(
    const std::string& path, bool limit_at_zero_minus_inf) {
  std::ifstream in(path);
  if (!in) throw ConfigError("tabulated family: cannot open '" + path + "'");
  std::vector<double> r, F;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double rv, fv;
    if (ls >> rv >> fv) {
      r.push_back(rv);
      F.push_back(fv);
    }
  }
  return tabulated(std::move(r), std::move(F), limit_at_zero_minus_inf,
                   "table:" + path);
}

AdmissibleFunction AdmissibleFunction::parse(const std::string& spec,
                                             bool table_limit_flag) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ConfigError("family spec '" + spec +
                      "': expected <family>:<param> (phi:, lalpha:, hot:, "
                      "table:)");
  const std::string head = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (head == "table") {
    if (arg.empty()) throw ConfigError("family spec 'table:': missing path");
    return tabulated_from_file(arg, table_limit_flag);
  }
  if (head == "hot" && arg == "inf") return hot(kInf);
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(arg, &used);
    if (used != arg.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ConfigError("family spec '" + spec + "': bad numeric parameter");
  }
  if (head == "phi") return power(v);
  if (head == "lalpha") return power_log(v);
  if (head == "hot") return hot(v);
  throw ConfigError("family spec '" + spec + "': unknown family '" + head +
                    "'");
}

void AdmissibleFunction::check_z(double z) const {
  if (std::isnan(z)) throw DomainError(spec_ + ": z is NaN");
  if (z >= j_hi_ || near_excluded(z, j_hi_))
    throw DomainError(spec_ + ": z = " + std::to_string(z) +
                      " at or above J_hi");
  if (z <= j_lo_ || near_excluded(z, j_lo_))
    throw DomainError(spec_ + ": z = " + std::to_string(z) +
                      " at or below J_lo");
}

double AdmissibleFunction::F(double r) const {
  if (std::isnan(r) || r < 0.0)
    throw DomainError(spec_ + ": F argument negative");
  if (r == 0.0) return -kInf;  // assigned endpoint value
  if (r >= a_ || near_excluded(r, a_))
    throw DomainError(spec_ + ": F argument " + std::to_string(r) +
                      " at or above a");
  if (tag_ == FamilyTag::Tabulated) {
    if (r < tr_.front())
      throw DomainError(spec_ + ": F argument below tabulated range");
    return tab_F(r);
  }
  return F_from_log(std::log(r));
}

double AdmissibleFunction::F_from_log(double logr) const {
  if (std::isnan(logr)) throw DomainError(spec_ + ": log r is NaN");
  if (logr == -kInf) return -kInf;
  // Unlike F(r), any logr strictly below log a is accepted: compositions
  // evaluated near saturation legitimately produce log r within one ulp of
  // log a, and rejecting them would poison every wide-window sweep.
  if (logr >= log_a_)
    throw DomainError(spec_ + ": log r at or above log a");
  switch (tag_) {
    case FamilyTag::Power:
      if (param_ == 0.0) return logr;
      return std::expm1(param_ * logr) / param_;
    case FamilyTag::PowerLog: {
      const double w = -logr;  // in (0, inf)
      if (param_ == 0.0) return -std::log(w);
      return -std::expm1(param_ * std::log(w)) / param_;
    }
    case FamilyTag::Hot:
      if (std::isinf(a_)) return logr;
      return hot_H_from_log(logr - log_a_);
    case FamilyTag::Tabulated:
      return F(std::exp(logr));
  }
  return kNaN;  // unreachable
}

double AdmissibleFunction::f(double z) const {
  if (z == -kInf) return 0.0;  // assigned value, matching F(0) = -inf
  check_z(z);
  if (tag_ == FamilyTag::Tabulated) return tab_inverse(z);
  if (tag_ == FamilyTag::Hot && !std::isinf(a_)) return a_ * hot_h(z);
  return std::exp(log_f(z));
}

double AdmissibleFunction::log_f(double z) const {
  if (z == -kInf) return -kInf;
  check_z(z);
  switch (tag_) {
    case FamilyTag::Power:
      if (param_ == 0.0) return z;
      return std::log1p(param_ * z) / param_;
    case FamilyTag::PowerLog:
      if (param_ == 0.0) return -std::exp(-z);
      return -std::exp(std::log1p(-param_ * z) / param_);
    case FamilyTag::Hot:
      if (std::isinf(a_)) return z;
      return log_a_ + log_hot_h(z);
    case FamilyTag::Tabulated:
      return std::log(tab_inverse(z));
  }
  return kNaN;
}

double AdmissibleFunction::f_prime(double z) const {
  check_z(z);
  if (tag_ == FamilyTag::Tabulated) {
    const double r = tab_inverse(z);
    const double Fp = tab_F_prime(r);
    if (!(Fp > 0.0))
      throw NumericError(spec_ + ": interpolant derivative not positive");
    return 1.0 / Fp;
  }
  return std::exp(log_f_prime(z));
}

double AdmissibleFunction::log_f_prime(double z) const {
  check_z(z);
  switch (tag_) {
    case FamilyTag::Power:
      if (param_ == 0.0) return z;
      return (1.0 / param_ - 1.0) * std::log1p(param_ * z);
    case FamilyTag::PowerLog:
      if (param_ == 0.0) return -std::exp(-z) - z;
      return -std::exp(std::log1p(-param_ * z) / param_) +
             (1.0 / param_ - 1.0) * std::log1p(-param_ * z);
    case FamilyTag::Hot:
      if (std::isinf(a_)) return z;
      return log_a_ - 0.25 * z * z - kLogSqrt4Pi;
    case FamilyTag::Tabulated:
      return std::log(f_prime(z));
  }
  return kNaN;
}

double AdmissibleFunction::log_fprime_derivative(double z) const {
  check_z(z);
  switch (tag_) {
    case FamilyTag::Power:
      if (param_ == 0.0) return 1.0;
      return (1.0 - param_) / (1.0 + param_ * z);
    case FamilyTag::PowerLog: {
      if (param_ == 0.0) return std::expm1(-z);
      const double lt = std::log1p(-param_ * z);
      return (param_ - 1.0) / (1.0 - param_ * z) +
             std::exp((1.0 / param_ - 1.0) * lt);
    }
    case FamilyTag::Hot:
      if (std::isinf(a_)) return 1.0;
      return -0.5 * z;
    case FamilyTag::Tabulated: {
      const double h = std::fmax(1e-5, 1e-4 * std::fabs(z));
      return (log_f_prime(z + h) - log_f_prime(z - h)) / (2.0 * h);
    }
  }
  return kNaN;
}

double AdmissibleFunction::f_second(double z) const {
  return log_fprime_derivative(z) * f_prime(z);
}

double AdmissibleFunction::tab_F(double r) const {
  // Locate the knot interval, then evaluate the cubic Hermite piece.
  const auto it = std::upper_bound(tr_.begin(), tr_.end(), r);
  std::size_t i = static_cast<std::size_t>(it - tr_.begin());
  i = i == 0 ? 0 : i - 1;
  if (i >= tr_.size() - 1) i = tr_.size() - 2;
  const double hspan = tr_[i + 1] - tr_[i];
  const double t = (r - tr_[i]) / hspan;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * tF_[i] + (t3 - 2 * t2 + t) * hspan * tm_[i] +
         (-2 * t3 + 3 * t2) * tF_[i + 1] + (t3 - t2) * hspan * tm_[i + 1];
}

double AdmissibleFunction::tab_F_prime(double r) const {
  const auto it = std::upper_bound(tr_.begin(), tr_.end(), r);
  std::size_t i = static_cast<std::size_t>(it - tr_.begin());
  i = i == 0 ? 0 : i - 1;
  if (i >= tr_.size() - 1) i = tr_.size() - 2;
  const double hspan = tr_[i + 1] - tr_[i];
  const double t = (r - tr_[i]) / hspan;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * tF_[i] + (3 * t2 - 4 * t + 1) * hspan * tm_[i] +
          (-6 * t2 + 6 * t) * tF_[i + 1] + (3 * t2 - 2 * t) * hspan * tm_[i + 1]) /
         hspan;
}

double AdmissibleFunction::tab_inverse(double z) const {
  // Monotone interpolant, so bisection is safe; Newton accelerates it.
  double lo = tr_.front(), hi = tr_.back();
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double val = tab_F(r) - z;
    if (std::fabs(val) <= 1e-14 * std::fmax(1.0, std::fabs(z))) break;
    if (val > 0.0) hi = r; else lo = r;
    const double Fp = tab_F_prime(r);
    double rn = Fp > 0.0 ? r - val / Fp : 0.5 * (lo + hi);
    if (!(rn > lo && rn < hi)) rn = 0.5 * (lo + hi);
    if (rn == r) break;
    r = rn;
  }
  return r;
}

double alpha_mean(double x, double y, const AlphaMeanParams& p) {
  if (!(p.lambda > 0.0 && p.lambda < 1.0))
    throw DomainError("alpha_mean: lambda must lie strictly inside (0,1)");
  if (std::isnan(x) || std::isnan(y) || x < 0.0 || y < 0.0)
    throw DomainError("alpha_mean: arguments must be nonnegative");
  if (x == 0.0 || y == 0.0) return 0.0;  // convention for all branches
  const double lam = p.lambda;
  if (std::isinf(p.alpha)) return p.alpha > 0 ? std::fmax(x, y) : std::fmin(x, y);
  if (p.alpha == 0.0) return std::exp((1.0 - lam) * std::log(x) + lam * std::log(y));
  const double m = (1.0 - lam) * std::pow(x, p.alpha) + lam * std::pow(y, p.alpha);
  return std::pow(m, 1.0 / p.alpha);
}

}  // namespace concaflow
