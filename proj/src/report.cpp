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

#include "concaflow/report.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "concaflow/admissible.hpp"
#include "concaflow/concavity.hpp"
#include "concaflow/criterion.hpp"
#include "concaflow/flow.hpp"
#include "concaflow/hierarchy.hpp"
#include "concaflow/hot.hpp"

namespace concaflow {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ------------------------------------------------------------------
// Verdict serialization.

json witness_json(const ComparisonWitness& w) {
  return json{{"z", w.z}, {"w", w.w}, {"lambda", w.lambda}};
}

json criterion_json(const std::string& op, const std::string& family,
                    const CriterionVerdict& v) {
  json conds = json::array();
  for (const CriterionCondition& c : v.conditions) {
    json cj{{"name", c.name},
            {"passed", c.passed},
            {"worst_violation", c.worst_violation}};
    if (c.has_witness) cj["witness"] = witness_json(c.witness);
    conds.push_back(std::move(cj));
  }
  json j{{"module", "criterion"},
         {"operation", op},
         {"family", family},
         {"preserved", v.preserved},
         {"at_boundary", v.at_boundary},
         {"conditions", std::move(conds)}};
  if (!v.notes.empty()) j["notes"] = v.notes;
  return j;
}

json concavity_json(const ConcavityReport& r) {
  const char* kind = r.kind == ConcavityKind::FConcave    ? "F"
                     : r.kind == ConcavityKind::LogConcave ? "log"
                                                           : "quasi";
  json j{{"module", "concavity"}, {"operation", "check_concavity"},
         {"kind", kind},          {"family", r.family},
         {"passed", r.passed},    {"worst_violation", r.worst_violation},
         {"tolerance", r.tolerance}, {"n_checks", r.n_checks}};
  if (r.has_witness)
    j["witness"] = json{{"x", {r.witness.x[0], r.witness.x[1]}},
                        {"y", {r.witness.y[0], r.witness.y[1]}},
                        {"lambda", r.witness.lambda}};
  return j;
}

// ------------------------------------------------------------------
// Report assembly.

struct Builder {
  std::string command;
  const ExperimentSpec& spec;
  std::string out_dir;
  json verdicts = json::array();
  std::vector<std::string> artifacts;
  // key -> (expected-as-text, actual-as-text); filled by the command.
  std::vector<std::pair<std::string, std::pair<std::string, std::string>>>
      expectations;
  std::string summary;

  Builder(std::string cmd, const ExperimentSpec& s, std::string out)
      : command(std::move(cmd)), spec(s), out_dir(std::move(out)) {}

  bool emitting() const { return !out_dir.empty(); }

  std::string path_of(const std::string& rel) const {
    return out_dir + "/" + rel;
  }

  void add_grid(const std::string& rel, const GridFunction& u) {
    if (!emitting()) {
      artifacts.push_back(rel);
      return;
    }
    write_grid_text(path_of(rel), u);
    artifacts.push_back(rel);
  }

  void add_dat(const std::string& rel, const GridFunction& u) {
    if (!emitting()) {
      artifacts.push_back(rel);
      return;
    }
    write_plot_dat(path_of(rel), u);
    artifacts.push_back(rel);
  }

  // Registers an expectation check against the experiment's expect.<key>;
  // the command states the actual outcome as text.
  void expect(const std::string& key, const std::string& actual) {
    const std::string full = "expect." + key;
    if (spec.has(full))
      expectations.push_back({key, {spec.kv.at(full), actual}});
  }

  Report finish(const std::vector<std::string>& known_expect_keys) {
    // Unknown expect.* keys are a malformed expect block.
    for (const auto& [k, v] : spec.kv) {
      (void)v;
      if (k.rfind("expect.", 0) != 0) continue;
      const std::string bare = k.substr(7);
      if (std::find(known_expect_keys.begin(), known_expect_keys.end(),
                    bare) == known_expect_keys.end())
        throw ConfigError("malformed expect block: unknown key " + k);
    }
    bool matched = true;
    json exp = json::array();
    for (const auto& [key, ea] : expectations) {
      const bool ok = trim(ea.first) == ea.second;
      matched = matched && ok;
      exp.push_back(json{{"key", key},
                         {"expected", trim(ea.first)},
                         {"actual", ea.second},
                         {"matched", ok}});
    }

    json doc;
    doc["schema"] = "concaflow-report/1";
    doc["tool"] = json{{"name", "concaflow"}, {"version", "1.0.0"}};
    doc["command"] = command;
    json spec_echo;
    for (const auto& [k, v] : spec.kv) spec_echo[k] = v;
    doc["spec"] = std::move(spec_echo);
    doc["verdicts"] = verdicts;
    if (!exp.empty()) doc["expectations"] = exp;
    doc["artifacts"] = artifacts;

    // The hash covers everything above; the timestamp is deliberately
    // outside it so reruns of the same spec hash identically.
    const std::uint64_t h = fnv1a64(doc.dump());
    char hex[32];
    std::snprintf(hex, sizeof hex, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(h));
    doc["config_hash"] = hex;
    {
      std::time_t now = std::time(nullptr);
      std::tm tm{};
      gmtime_r(&now, &tm);
      char stamp[32];
      std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
      doc["timestamp"] = stamp;
    }

    Report rep;
    rep.exit_code = matched ? 0 : 1;
    rep.json_text = doc.dump(2) + "\n";
    rep.config_hash = hex;
    rep.artifacts = artifacts;
    rep.summary = summary;
    if (emitting()) {
      std::filesystem::create_directories(out_dir);
      // Re-emit artifacts now that the directory surely exists is not
      // needed; add_grid/add_dat created it on first write.
      std::ofstream rj(path_of("report.json"), std::ios::binary);
      rj << rep.json_text;
      std::ofstream mf(path_of("manifest.txt"), std::ios::binary);
      mf << "report.json\n";
      for (const std::string& a : artifacts) mf << a << "\n";
    }
    return rep;
  }
};

// ------------------------------------------------------------------
// Shared spec plumbing.

AdmissibleFunction family_of(const ExperimentSpec& spec) {
  const std::string fam = spec.get("family", "");
  if (fam.empty()) throw ConfigError("missing required key: family");
  return AdmissibleFunction::parse(fam,
                                   spec.get_bool("table.limit_flag", false));
}

std::vector<double> times_of(const ExperimentSpec& spec, bool required) {
  const std::vector<double> t = spec.get_list("times");
  if (t.empty()) {
    if (required) throw ConfigError("missing required key: times");
    return t;
  }
  for (std::size_t k = 0; k < t.size(); ++k)
    if (!std::isfinite(t[k]) || t[k] <= 0.0 || (k > 0 && t[k] <= t[k - 1]))
      throw ConfigError("times must be positive and strictly increasing");
  return t;
}

int grid_nodes(const ExperimentSpec& spec, int fallback) {
  const int n = spec.get_int("grid", fallback);
  if (n < 16) throw ConfigError("grid must have at least 16 nodes per axis");
  return n;
}

struct Interval {
  double x0 = 0.0, x1 = 1.0;
};

// domain: "line" (unit interval), "interval(a,b)", "plane", "rect".
std::pair<bool, Interval> domain_of(const ExperimentSpec& spec) {
  const std::string d = trim(spec.get("domain", "line"));
  if (d == "line") return {false, {0.0, 1.0}};
  if (d == "plane" || d.rfind("rect", 0) == 0) return {true, {}};
  if (d.rfind("interval(", 0) == 0 && d.back() == ')') {
    Interval iv;
    if (std::sscanf(d.c_str(), "interval(%lf,%lf)", &iv.x0, &iv.x1) == 2 &&
        iv.x1 > iv.x0)
      return {false, iv};
  }
  throw ConfigError("domain: expected line, interval(x0,x1), or plane; got " +
                    d);
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

// ------------------------------------------------------------------
// Initial data for evolve/envelope.

GridFunction build_datum_1d(const ExperimentSpec& spec,
                            const AdmissibleFunction* F, const Interval& iv,
                            int n) {
  const std::string kind = spec.get("datum", "hot_dome");
  GridFunction u = GridFunction::line(iv.x0, (iv.x1 - iv.x0) / (n - 1), n);
  const double mid = 0.5 * (iv.x0 + iv.x1);
  const double x0 = spec.get_num("datum.x0", mid);
  if (kind == "hot_dome") {
    const double l0 = spec.get_num("datum.l0", 0.5);
    const double m = spec.get_num("datum.margin", 3.0);
    const double sl = (l0 + 11.0 + m) / ((x0 - iv.x0) * (x0 - iv.x0));
    const double sr = (l0 + 11.0 + m) / ((iv.x1 - x0) * (iv.x1 - x0));
    for (int i = 0; i < n; ++i) {
      const double x = u.x(i);
      const double s = x < x0 ? sl : sr;
      u.values[i] = hot_h(l0 - s * (x - x0) * (x - x0));
    }
  } else if (kind == "gaussian") {
    const double amp = spec.get_num("datum.amplitude", 0.8);
    const double sigma = spec.get_num("datum.sigma", 0.1 * (iv.x1 - iv.x0));
    for (int i = 0; i < n; ++i) {
      const double x = u.x(i);
      u.values[i] = amp * std::exp(-0.5 * (x - x0) * (x - x0) /
                                   (sigma * sigma));
    }
  } else if (kind == "mirror") {
    if (F == nullptr)
      throw ConfigError("datum mirror needs a family to shape the profile");
    const double chi = std::isfinite(F->J_hi()) ? F->J_hi() : 2.0;
    const double c = spec.get_num("datum.c", chi - 0.25);
    const double scale = spec.get_num("datum.scale", 4.0);
    for (int i = 0; i < n; ++i)
      u.values[i] =
          std::exp(F->log_f(c - scale * std::fabs(u.x(i) - x0)));
  } else if (kind == "two_bumps") {
    const double a1 = spec.get_num("datum.amp1", 0.75);
    const double a2 = spec.get_num("datum.amp2", 0.5);
    const double k = spec.get_num("datum.sharpness", 40.0);
    const double c1 = iv.x0 + 0.3 * (iv.x1 - iv.x0);
    const double c2 = iv.x0 + 0.75 * (iv.x1 - iv.x0);
    for (int i = 0; i < n; ++i) {
      const double x = u.x(i);
      u.values[i] = a1 * std::exp(-k * (x - c1) * (x - c1)) +
                    a2 * std::exp(-k * (x - c2) * (x - c2));
    }
  } else {
    throw ConfigError("datum: expected hot_dome, gaussian, mirror, or "
                      "two_bumps; got " +
                      kind);
  }
  return u;
}

ConcavityReport run_check(const std::string& check, const GridFunction& u,
                          const AdmissibleFunction* F, double tol) {
  if (check == "quasi") return check_quasi_concavity(u, tol);
  if (check == "log") return check_log_concavity(u, tol);
  if (check == "F") {
    if (F == nullptr) throw ConfigError("check F needs a family");
    return check_F_concavity(u, *F, tol);
  }
  throw ConfigError("check: expected F, log, or quasi; got " + check);
}

// True when the disruption construction cannot exist for F: the transform
// keeps log-concavity (it is at least as strong) or has a finite zero
// limit.  Reported as a correct negative rather than an error.
bool disruption_impossible(const AdmissibleFunction& F, std::string* why) {
  if (!F.limit_at_zero_is_minus_infinity()) {
    *why = F.spec_string() + " has a finite limit at r = 0";
    return true;
  }
  if (is_weaker(AdmissibleFunction::power(0.0), F).holds) {
    *why = F.spec_string() +
           " is at least as strong as log-concavity; its profiles stay "
           "log-concave, hence quasi-concave";
    return true;
  }
  return false;
}

}  // namespace

// ------------------------------------------------------------------
// ExperimentSpec.

std::string ExperimentSpec::get(const std::string& key,
                                const std::string& fallback) const {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : trim(it->second);
}

double ExperimentSpec::get_num(const std::string& key, double fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const std::string v = trim(it->second);
  if (v == "inf") return kInf;
  if (v == "-inf") return -kInf;
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got " + v);
  }
  if (pos != v.size())
    throw ConfigError(key + ": expected a number, got " + v);
  return out;
}

int ExperimentSpec::get_int(const std::string& key, int fallback) const {
  const double v = get_num(key, static_cast<double>(fallback));
  const int i = static_cast<int>(std::llround(v));
  if (static_cast<double>(i) != v)
    throw ConfigError(key + ": expected an integer");
  return i;
}

bool ExperimentSpec::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const std::string v = trim(it->second);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got " + v);
}

std::vector<double> ExperimentSpec::get_list(const std::string& key) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return {};
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected comma-separated numbers");
    }
  }
  return out;
}

SamplingSpec ExperimentSpec::get_window(const std::string& prefix,
                                        SamplingSpec fallback) const {
  if (!has(prefix + ".lo") && !has(prefix + ".hi") && !has(prefix + ".n"))
    return fallback;
  SamplingSpec w;
  w.lo = get_num(prefix + ".lo", fallback.lo);
  w.hi = get_num(prefix + ".hi", fallback.hi);
  w.n = get_int(prefix + ".n", fallback.n > 0 ? fallback.n : 257);
  if (w.n < 3 || !(w.hi > w.lo))
    throw ConfigError(prefix + ": window needs hi > lo and n >= 3");
  return w;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  ExperimentSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    spec.kv[key] = trim(line.substr(eq + 1));
  }
  return spec;
}

// ------------------------------------------------------------------
// Serialization primitives.

void write_grid_text(const std::string& path, const GridFunction& u) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# concaflow-grid 1\n# dims " << u.dims << "\n";
  out << "# axis0 origin " << fmt_g17(u.origin[0]) << " spacing "
      << fmt_g17(u.spacing[0]) << " n " << u.shape[0] << "\n";
  if (u.dims == 2)
    out << "# axis1 origin " << fmt_g17(u.origin[1]) << " spacing "
        << fmt_g17(u.spacing[1]) << " n " << u.shape[1] << "\n";
  const int ny = u.dims == 2 ? u.shape[1] : u.shape[0];
  const int rows = u.dims == 2 ? u.shape[0] : 1;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (j) out << ' ';
      out << fmt_g17(u.values[static_cast<std::size_t>(i) * ny + j]);
    }
    out << '\n';
  }
}

GridFunction read_grid_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "# concaflow-grid 1")
    throw ConfigError(path + ": not a concaflow grid file");
  int dims = 0;
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "# dims %d", &dims) != 1 || dims < 1 ||
      dims > 2)
    throw ConfigError(path + ": bad dims header");
  double o0 = 0, s0 = 0, o1 = 0, s1 = 0;
  int n0 = 0, n1 = 0;
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "# axis0 origin %lf spacing %lf n %d", &o0,
                  &s0, &n0) != 3)
    throw ConfigError(path + ": bad axis0 header");
  if (dims == 2) {
    if (!std::getline(in, line) ||
        std::sscanf(line.c_str(), "# axis1 origin %lf spacing %lf n %d", &o1,
                    &s1, &n1) != 3)
      throw ConfigError(path + ": bad axis1 header");
  }
  GridFunction u = dims == 1 ? GridFunction::line(o0, s0, n0)
                             : GridFunction::rect(o0, s0, n0, o1, s1, n1);
  for (double& v : u.values)
    if (!(in >> v)) throw ConfigError(path + ": truncated value block");
  u.validate();
  return u;
}

void write_plot_dat(const std::string& path, const GridFunction& u) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  if (u.dims == 1) {
    for (int i = 0; i < u.shape[0]; ++i)
      out << fmt_g17(u.x(i)) << ' ' << fmt_g17(u.values[i]) << '\n';
    return;
  }
  for (int i = 0; i < u.shape[0]; ++i) {
    for (int j = 0; j < u.shape[1]; ++j)
      out << fmt_g17(u.x(i)) << ' ' << fmt_g17(u.y(j)) << ' '
          << fmt_g17(u.at(i, j)) << '\n';
    out << '\n';
  }
}

// ------------------------------------------------------------------
// Subcommands.

Report cmd_criterion(const ExperimentSpec& spec, const std::string& out_dir) {
  Builder b("criterion", spec, out_dir);
  const AdmissibleFunction F = family_of(spec);
  const SamplingSpec win = spec.get_window("window", {});
  const double tol = spec.get_num("tol.analytic", 1e-8);
  const bool semilinear = spec.get_bool("semilinear", false) ||
                          spec.has("kappa") || spec.has("p");
  CriterionVerdict v;
  std::string op;
  if (semilinear) {
    const double kappa = spec.get_num("kappa", -1.0);
    const double p = spec.get_num("p", 2.0);
    v = semilinear_criterion(F, kappa, p, win, tol);
    op = "semilinear_criterion";
  } else {
    v = dhf_criterion(F, win, tol);
    op = "dhf_criterion";
  }
  b.verdicts.push_back(criterion_json(op, F.spec_string(), v));
  b.expect("preserved", bool_text(v.preserved));
  b.summary = F.spec_string() + ": " +
              (v.preserved ? "preserved" : "not preserved") +
              (semilinear ? " (semilinear flow)" : " (heat flow)");
  return b.finish({"preserved"});
}

Report cmd_hierarchy(const ExperimentSpec& spec, const std::string& out_dir) {
  Builder b("hierarchy", spec, out_dir);
  std::vector<AdmissibleFunction> fams;
  {
    std::stringstream ss(spec.get("families", ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty())
        fams.push_back(AdmissibleFunction::parse(
            item, spec.get_bool("table.limit_flag", false)));
    }
  }
  if (fams.empty())
    throw ConfigError("hierarchy: families must name at least one family");
  const SamplingSpec win = spec.get_window("window", {});
  const double tol = spec.get_num("tol.analytic", 1e-9);

  // Order strongest to weakest: repeatedly take the first family that no
  // remaining family strictly dominates.
  std::vector<AdmissibleFunction> chain;
  std::vector<bool> used(fams.size(), false);
  for (std::size_t round = 0; round < fams.size(); ++round) {
    std::size_t pick = fams.size();
    for (std::size_t i = 0; i < fams.size() && pick == fams.size(); ++i) {
      if (used[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < fams.size() && !dominated; ++j)
        if (j != i && !used[j])
          dominated = strictly_weaker(fams[i], fams[j], tol);
      if (!dominated) pick = i;
    }
    if (pick == fams.size())  // cyclic comparisons cannot happen; be safe
      for (std::size_t i = 0; i < fams.size() && pick == fams.size(); ++i)
        if (!used[i]) pick = i;
    used[pick] = true;
    chain.push_back(fams[pick]);
  }

  json chain_j = json::array();
  for (const AdmissibleFunction& f : chain) chain_j.push_back(f.spec_string());
  b.verdicts.push_back(json{{"module", "hierarchy"},
                            {"operation", "chain_order"},
                            {"chain", chain_j}});
  bool all_strict = true;
  std::string pretty = chain.front().spec_string();
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    const ComparisonResult weaker = is_weaker(chain[k + 1], chain[k], win, tol);
    const bool strict = strictly_weaker(chain[k + 1], chain[k], tol);
    all_strict = all_strict && strict;
    json cj{{"module", "hierarchy"},
            {"operation", "is_weaker"},
            {"stronger", chain[k].spec_string()},
            {"weaker", chain[k + 1].spec_string()},
            {"holds", weaker.holds},
            {"strict", strict},
            {"worst_violation", weaker.worst_violation},
            {"tolerance", weaker.tolerance}};
    if (!weaker.notes.empty()) cj["notes"] = weaker.notes;
    b.verdicts.push_back(std::move(cj));
    pretty += std::string(strict ? " > " : " >= ") +
              chain[k + 1].spec_string();
  }
  std::string chain_text = chain.front().spec_string();
  for (std::size_t k = 1; k < chain.size(); ++k)
    chain_text += "," + chain[k].spec_string();
  b.expect("chain", chain_text);
  if (chain.size() > 1) b.expect("strict", bool_text(all_strict));
  b.summary = pretty;
  return b.finish({"chain", "strict"});
}

Report cmd_evolve(const ExperimentSpec& spec, const std::string& out_dir) {
  Builder b("evolve", spec, out_dir);
  const auto [plane, iv] = domain_of(spec);
  const std::vector<double> times = times_of(spec, /*required=*/true);
  std::optional<AdmissibleFunction> F;
  if (spec.has("family")) F = family_of(spec);

  bool all_pass = true;
  if (!plane) {
    const int n = grid_nodes(spec, 257);
    const std::string check =
        spec.get("check", F.has_value() ? "F" : "log");
    const double tol = spec.get_num("tol.analytic", 1e-5);
    const GridFunction u0 =
        build_datum_1d(spec, F.has_value() ? &*F : nullptr, iv, n);
    b.add_dat("initial.dat", u0);
    std::optional<double> dt;
    if (spec.has("dt")) dt = spec.get_num("dt", 0.0);
    const std::vector<FlowSnapshot> snaps = dirichlet_cn(u0, times, dt);
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      const ConcavityReport rep =
          run_check(check, snaps[k].u, F.has_value() ? &*F : nullptr, tol);
      all_pass = all_pass && rep.passed;
      json vj = concavity_json(rep);
      vj["t"] = snaps[k].t;
      vj["solver"] = snaps[k].solver_tag;
      b.verdicts.push_back(std::move(vj));
      b.add_dat("snapshot_" + std::to_string(k + 1) + ".dat", snaps[k].u);
    }
  } else {
    // Plane: separated step-times-profile datum driven by the family.
    if (!F.has_value())
      throw ConfigError("evolve on the plane needs a family for the datum");
    const std::string check = spec.get("check", "quasi");
    const SamplingSpec w = spec.get_window("w", {-0.5, 0.5, 129});
    const SamplingSpec z = spec.get_window("z", {-3.0, 3.0, 129});
    const SamplingSpec search = spec.get_window("search", {});
    const bool control = spec.get_bool("control", false);
    const DisruptionRun run =
        run_disruption(*F, w, z, times, control, search);
    b.add_dat("datum.dat", run.datum.phi2);
    for (std::size_t k = 0; k < run.reports.size(); ++k) {
      const auto& [t, rep] = run.reports[k];
      if (check == "quasi") {
        all_pass = all_pass && rep.passed;
        json vj = concavity_json(rep);
        vj["t"] = t;
        b.verdicts.push_back(std::move(vj));
      } else {
        throw ConfigError("evolve on the plane supports check = quasi");
      }
    }
  }
  b.expect("all_pass", bool_text(all_pass));
  b.summary = std::string("evolve: checks ") +
              (all_pass ? "passed at every time" : "failed at some time");
  return b.finish({"all_pass"});
}

Report cmd_disrupt(const ExperimentSpec& spec, const std::string& out_dir) {
  Builder b("disrupt", spec, out_dir);
  const AdmissibleFunction F = family_of(spec);

  std::string why;
  if (disruption_impossible(F, &why)) {
    b.verdicts.push_back(json{{"module", "concavity"},
                              {"operation", "run_disruption"},
                              {"family", F.spec_string()},
                              {"disrupted", false},
                              {"notes", why}});
    b.expect("disrupted", "false");
    b.summary = "no disruption possible: " + why;
    return b.finish({"disrupted"});
  }

  const SamplingSpec w = spec.get_window("w", {-0.5, 0.5, 129});
  const SamplingSpec z = spec.get_window("z", {-3.0, 3.0, 129});
  const SamplingSpec search = spec.get_window("search", {});
  std::vector<double> times = times_of(spec, /*required=*/false);
  if (times.empty()) times = {0.02, 0.035, 0.05};
  const bool control = spec.get_bool("control", false);

  const DisruptionRun run = run_disruption(F, w, z, times, control, search);
  b.add_dat("datum.dat", run.datum.phi2);
  bool disrupted = false;
  double worst_ratio = 0.0;
  json reports = json::array();
  for (std::size_t k = 0; k < run.reports.size(); ++k) {
    const auto& [t, rep] = run.reports[k];
    disrupted = disrupted || !rep.passed;
    const double ratio =
        run.budget > 0.0 ? rep.worst_violation / run.budget : 0.0;
    worst_ratio = std::max(worst_ratio, ratio);
    json rj = concavity_json(rep);
    rj["t"] = t;
    rj["violation_to_budget"] = ratio;
    reports.push_back(std::move(rj));
  }
  b.verdicts.push_back(json{
      {"module", "concavity"},
      {"operation", "run_disruption"},
      {"family", F.spec_string()},
      {"control", control},
      {"datum",
       json{{"zeta", run.datum.zeta},
            {"omega", run.datum.omega},
            {"lambda", run.datum.lambda},
            {"c", run.datum.c},
            {"violation", run.datum.violation}}},
      {"budget", run.budget},
      {"disrupted", disrupted},
      {"worst_violation_to_budget", worst_ratio},
      {"reports", std::move(reports)}});
  b.expect("disrupted", bool_text(disrupted));
  char ratio_text[64];
  std::snprintf(ratio_text, sizeof ratio_text, "%.3g", worst_ratio);
  b.summary = F.spec_string() + ": " +
              (disrupted ? "quasi-concavity disrupted" : "no disruption") +
              " (worst violation / budget = " + ratio_text + ")";
  return b.finish({"disrupted"});
}

Report cmd_envelope(const ExperimentSpec& spec, const std::string& out_dir) {
  Builder b("envelope", spec, out_dir);
  const AdmissibleFunction F = family_of(spec);
  const double tol = spec.get_num("tol.analytic", 1e-10);
  GridFunction u0;
  if (spec.has("input")) {
    u0 = read_grid_text(spec.get("input", ""));
  } else {
    const auto [plane, iv] = domain_of(spec);
    const int n = grid_nodes(spec, 129);
    if (!plane) {
      ExperimentSpec shaped = spec;
      if (!shaped.has("datum")) shaped.set("datum", "two_bumps");
      u0 = build_datum_1d(shaped, &F, iv, n);
    } else {
      const int n2 = std::min(n, 65);
      u0 = GridFunction::rect(0.0, 1.0 / (n2 - 1), n2, 0.0, 1.0 / (n2 - 1),
                              n2);
      for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) {
          const double x = u0.x(i) - 0.35, y = u0.y(j) - 0.4;
          const double x2 = u0.x(i) - 0.7, y2 = u0.y(j) - 0.75;
          u0.at(i, j) = 0.7 * std::exp(-30.0 * (x * x + y * y)) +
                        0.45 * std::exp(-30.0 * (x2 * x2 + y2 * y2));
        }
    }
  }
  const GridFunction env = f_concave_envelope(u0, F);
  const GridFunction env2 = f_concave_envelope(env, F);
  double fixed_gap = 0.0, idem_gap = 0.0, dom_gap = 0.0;
  for (std::size_t k = 0; k < u0.values.size(); ++k) {
    fixed_gap = std::max(fixed_gap, std::fabs(env.values[k] - u0.values[k]));
    idem_gap = std::max(idem_gap, std::fabs(env2.values[k] - env.values[k]));
    dom_gap = std::max(dom_gap, u0.values[k] - env.values[k]);
  }
  const bool fixed_point = fixed_gap <= tol;
  const ConcavityReport env_check = check_F_concavity(env, F, 1e-8);
  b.add_dat("input.dat", u0);
  b.add_dat("envelope.dat", env);
  if (u0.dims == 2) b.add_grid("envelope.txt", env);
  b.verdicts.push_back(json{{"module", "concavity"},
                            {"operation", "f_concave_envelope"},
                            {"family", F.spec_string()},
                            {"fixed_point", fixed_point},
                            {"fixed_point_gap", fixed_gap},
                            {"idempotence_gap", idem_gap},
                            {"domination_gap", dom_gap}});
  b.verdicts.push_back(concavity_json(env_check));
  b.expect("fixed_point", bool_text(fixed_point));
  b.summary = F.spec_string() + ": envelope " +
              (fixed_point ? "equals the input (already concave)"
                           : "strictly dominates the input");
  return b.finish({"fixed_point"});
}

Report cmd_rates(const ExperimentSpec& spec, const std::string& out_dir) {
  Builder b("rates", spec, out_dir);
  const double alpha = spec.get_num("alpha", 0.0);
  if (!spec.has("alpha")) throw ConfigError("rates: missing required key alpha");
  const SamplingSpec win = spec.get_window("z", {});
  const double tol = spec.get_num("tol.analytic", 1e-8);
  CriterionVerdict v;
  std::string op, label;
  if (spec.has("m") && spec.has("p"))
    throw ConfigError("rates: give m (porous medium) or p (p-Laplace), not "
                      "both");
  if (spec.has("m")) {
    const double m = spec.get_num("m", 2.0);
    v = pm_initial_rate(m, alpha, win, tol);
    op = "pm_initial_rate";
    label = "m = " + spec.get("m", "");
  } else if (spec.has("p")) {
    const double p = spec.get_num("p", 3.0);
    v = plaplace_initial_rate(p, alpha, win, tol);
    op = "plaplace_initial_rate";
    label = "p = " + spec.get("p", "");
  } else {
    throw ConfigError("rates: missing m (porous medium) or p (p-Laplace)");
  }
  b.verdicts.push_back(criterion_json(op, "phi:" + spec.get("alpha", ""), v));
  b.expect("preserved", bool_text(v.preserved));
  b.expect("at_boundary", bool_text(v.at_boundary));
  b.summary = op + " (" + label + ", alpha = " + spec.get("alpha", "") +
              "): " + (v.preserved ? "concavity rate holds" : "rate fails") +
              (v.at_boundary ? " at the boundary exponent" : "");
  return b.finish({"preserved", "at_boundary"});
}

Report run_experiment(const std::string& subcommand, const ExperimentSpec& spec,
                      const std::string& out_dir) {
  try {
    if (subcommand == "criterion") return cmd_criterion(spec, out_dir);
    if (subcommand == "hierarchy") return cmd_hierarchy(spec, out_dir);
    if (subcommand == "evolve") return cmd_evolve(spec, out_dir);
    if (subcommand == "disrupt") return cmd_disrupt(spec, out_dir);
    if (subcommand == "envelope") return cmd_envelope(spec, out_dir);
    if (subcommand == "rates") return cmd_rates(spec, out_dir);
    Report rep;
    rep.exit_code = 2;
    rep.summary = "unknown subcommand: " + subcommand;
    return rep;
  } catch (const std::exception& e) {
    Report rep;
    rep.exit_code = 2;
    rep.summary = e.what();
    return rep;
  }
}

std::vector<Report> run_batch(const std::string& subcommand,
                              const std::vector<ExperimentSpec>& specs,
                              const std::string& out_root) {
  unsigned cap = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("CONCAFLOW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigError("CONCAFLOW_THREADS: expected a positive integer");
    cap = static_cast<unsigned>(v);
  }
  cap = std::max(1u, std::min<unsigned>(cap, specs.size()));

  std::vector<Report> out(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= specs.size()) return;
      std::string dir;
      if (!out_root.empty()) {
        std::string name = specs[k].get("name", "");
        if (name.empty()) name = "run-" + std::to_string(k + 1);
        dir = out_root + "/" + name;
      }
      out[k] = run_experiment(subcommand, specs[k], dir);
    }
  };
  if (cap <= 1 || specs.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < cap; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return out;
}

}  // namespace concaflow
