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

#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "concaflow/common.hpp"
#include "concaflow/report.hpp"

namespace {

using concaflow::ExperimentSpec;
using concaflow::Report;

// Per-subcommand invocation state: config files, output root, and the
// key=value overrides collected from flags in command-line order.
struct Invocation {
  std::vector<std::string> configs;
  std::string out = "concaflow-out";
  std::vector<std::string> overrides;
};

void add_set_flag(CLI::App* cmd, Invocation& inv, const std::string& flag,
                  const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag,
      [&inv, key](const std::string& v) { inv.overrides.push_back(key + "=" + v); },
      help);
}

void add_bool_flag(CLI::App* cmd, Invocation& inv, const std::string& flag,
                   const std::string& key, const std::string& help) {
  cmd->add_flag_callback(
      flag, [&inv, key]() { inv.overrides.push_back(key + "=true"); }, help);
}

void add_common(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--config", inv.configs,
                  "key=value experiment file; repeat for a batch");
  cmd->add_option("--out", inv.out,
                  "output root; each run writes <out>/<name>/report.json");
  cmd->add_option("--set", inv.overrides,
                  "override a spec key, e.g. --set w.n=257; repeatable")
      ->expected(-1);
  add_set_flag(cmd, inv, "--name", "name", "experiment name (output folder)");
  add_set_flag(cmd, inv, "--seed", "seed", "deterministic seed");
  add_set_flag(cmd, inv, "--times", "times", "comma-separated times");
  add_set_flag(cmd, inv, "--grid", "grid", "nodes per axis");
}

int run(const std::string& subcommand, const Invocation& inv) {
  std::vector<ExperimentSpec> specs;
  if (inv.configs.empty()) {
    specs.emplace_back();
  } else {
    for (const std::string& path : inv.configs)
      specs.push_back(concaflow::load_spec(path));
  }
  for (ExperimentSpec& spec : specs) {
    for (const std::string& kv : inv.overrides) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw concaflow::ConfigError("--set expects key=value, got " + kv);
      spec.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  }

  const std::vector<Report> reports =
      concaflow::run_batch(subcommand, specs, inv.out);
  int exit_code = 0;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const Report& rep = reports[k];
    std::string name = specs[k].get("name", "");
    if (name.empty()) name = "run-" + std::to_string(k + 1);
    if (rep.exit_code == 2) {
      std::fprintf(stderr, "[%s] error: %s\n", name.c_str(),
                   rep.summary.c_str());
    } else {
      std::printf("[%s] %s\n", name.c_str(), rep.summary.c_str());
      std::printf("[%s] report: %s/%s/report.json\n", name.c_str(),
                  inv.out.c_str(), name.c_str());
    }
    exit_code = std::max(exit_code, rep.exit_code);
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "concaflow: concavity transforms, preservation criteria, and "
      "counterexample machinery for Dirichlet diffusion"};
  app.require_subcommand(1);

  Invocation criterion, hierarchy, evolve, disrupt, envelope, rates;

  CLI::App* c = app.add_subcommand(
      "criterion", "preservation criteria for a transform family");
  add_common(c, criterion);
  add_set_flag(c, criterion, "--family", "family",
               "family spec: phi:<a> | lalpha:<a> | hot:<a> | table:<path>");
  add_bool_flag(c, criterion, "--semilinear", "semilinear",
                "test the semilinear flow instead of the heat flow");
  add_set_flag(c, criterion, "--kappa", "kappa", "reaction coupling");
  add_set_flag(c, criterion, "--p", "p", "reaction exponent");

  CLI::App* h = app.add_subcommand(
      "hierarchy", "order families from strongest to weakest");
  add_common(h, hierarchy);
  add_set_flag(h, hierarchy, "--families", "families",
               "comma-separated family specs");

  CLI::App* e = app.add_subcommand(
      "evolve", "evolve a datum and run concavity checks at each time");
  add_common(e, evolve);
  add_set_flag(e, evolve, "--family", "family", "family spec");
  add_set_flag(e, evolve, "--domain", "domain",
               "line | interval(x0,x1) | plane");
  add_set_flag(e, evolve, "--datum", "datum",
               "hot_dome | gaussian | mirror | two_bumps");
  add_set_flag(e, evolve, "--check", "check", "F | log | quasi");
  add_set_flag(e, evolve, "--dt", "dt", "time step");

  CLI::App* d = app.add_subcommand(
      "disrupt", "build the mirrored datum and hunt the quasi-concavity "
                 "violation");
  add_common(d, disrupt);
  add_set_flag(d, disrupt, "--family", "family", "family spec");
  add_bool_flag(d, disrupt, "--control", "control",
                "replace the datum with a log-concave control profile");

  CLI::App* v = app.add_subcommand(
      "envelope", "smallest F-concave majorant of a datum");
  add_common(v, envelope);
  add_set_flag(v, envelope, "--family", "family", "family spec");
  add_set_flag(v, envelope, "--input", "input", "grid text file to envelope");
  add_set_flag(v, envelope, "--domain", "domain", "line | plane");

  CLI::App* r = app.add_subcommand(
      "rates", "initial concavity rates for porous-medium / p-Laplace flows");
  add_common(r, rates);
  add_set_flag(r, rates, "--m", "m", "porous-medium exponent (m > 1)");
  add_set_flag(r, rates, "--p", "p", "p-Laplace exponent (p > 2)");
  add_set_flag(r, rates, "--alpha", "alpha", "power-concavity parameter");

  CLI11_PARSE(app, argc, argv);

  const std::pair<const char*, Invocation*> table[] = {
      {"criterion", &criterion}, {"hierarchy", &hierarchy},
      {"evolve", &evolve},       {"disrupt", &disrupt},
      {"envelope", &envelope},   {"rates", &rates}};
  try {
    for (const auto& [name, inv] : table)
      if (app.got_subcommand(name)) return run(name, *inv);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  std::fprintf(stderr, "error: no subcommand\n");
  return 2;
}
