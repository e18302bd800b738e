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

// Experiment runner: flat key-value experiment specs, the six study
// subcommands, and deterministic JSON/plot-data report emission.

#ifndef CONCAFLOW_REPORT_HPP_
#define CONCAFLOW_REPORT_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "concaflow/common.hpp"
#include "concaflow/grid.hpp"

namespace concaflow {

// A flat, diff-able experiment description.  Keys come from a key=value
// config file; command-line flags overwrite file keys.  Dotted keys group
// related settings (w.lo, expect.preserved, datum.x0, ...).
struct ExperimentSpec {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  void set(const std::string& key, const std::string& value) {
    kv[key] = value;
  }
  // Typed getters; a present but malformed value is a ConfigError.
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list of numbers; empty when the key is absent.
  std::vector<double> get_list(const std::string& key) const;
  // w.lo / w.hi / w.n triple with the given prefix; `fallback` when absent.
  SamplingSpec get_window(const std::string& prefix,
                          SamplingSpec fallback) const;
};

// Parses one key=value experiment file ('#' starts a comment).
ExperimentSpec load_spec(const std::string& path);

// The result of one experiment run.  `json_text` is the full report; runs
// with identical spec and seed produce identical bytes except for the
// timestamp line, which is excluded from `config_hash`.
struct Report {
  int exit_code = 0;  // 0 expectations met, 1 mismatch, 2 config error
  std::string json_text;
  std::string config_hash;
  std::vector<std::string> artifacts;  // paths relative to the out dir
  std::string summary;                 // one line for stdout
};

// Subcommands.  With a non-empty out_dir each writes report.json, its data
// artifacts, and a manifest.txt naming them; with an empty out_dir nothing
// touches the filesystem and the report stays in memory.
Report cmd_criterion(const ExperimentSpec& spec, const std::string& out_dir);
Report cmd_hierarchy(const ExperimentSpec& spec, const std::string& out_dir);
Report cmd_evolve(const ExperimentSpec& spec, const std::string& out_dir);
Report cmd_disrupt(const ExperimentSpec& spec, const std::string& out_dir);
Report cmd_envelope(const ExperimentSpec& spec, const std::string& out_dir);
Report cmd_rates(const ExperimentSpec& spec, const std::string& out_dir);

// Dispatch by subcommand name.  Configuration and precondition failures
// (unknown family, malformed expect block, bad windows) come back as
// exit_code 2 with the message in `summary`; they never throw.
Report run_experiment(const std::string& subcommand, const ExperimentSpec& spec,
                      const std::string& out_dir);

// Runs one experiment per spec, at most CONCAFLOW_THREADS (default: hardware
// concurrency) in flight; reports are assembled and returned in input order.
// Each run writes under <out_root>/<name or run-k>.
std::vector<Report> run_batch(const std::string& subcommand,
                              const std::vector<ExperimentSpec>& specs,
                              const std::string& out_root);

// Grid serialization: '#'-prefixed header lines (dims, per-axis origin,
// spacing, count), then one whitespace-separated row of values per first-
// axis node, written with round-trip precision.
void write_grid_text(const std::string& path, const GridFunction& u);
GridFunction read_grid_text(const std::string& path);

// Plot data: "x value" rows for 1D; "x y value" rows with a blank line
// between first-axis blocks for 2D.
void write_plot_dat(const std::string& path, const GridFunction& u);

}  // namespace concaflow

#endif  // CONCAFLOW_REPORT_HPP_
