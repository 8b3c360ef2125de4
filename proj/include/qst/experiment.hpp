// Copyright 2026 The qstsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qst/optimizer.hpp"

namespace qst {

/// One experiment: a base RunConfig, the data-generation knobs, and an
/// optional sweep over h or over the worker count. Sweeps run `repetitions`
/// seeds per cell and report per-round medians.
struct ExperimentSpec {
  std::string preset;  // "", "fig1-top" or "fig1-bottom"
  RunConfig config;
  int m_per_worker = 200;
  bool include_identity = false;
  std::vector<int> sweep_values;
  std::filesystem::path out_dir;
  int repetitions = 5;
  double threshold = 0.05;
  int pool_threads = 0;  // 0: $QSTSIM_THREADS, else hardware concurrency
  bool dump_data = false;
};

struct HSweepCell {
  int local_steps = 0;
  int completed_reps = 0;  // runs that finished without divergence
  RunTrace median_trace;   // per-round medians across completed reps
};

struct HSweepResult {
  std::vector<HSweepCell> cells;
  bool any_diverged = false;
};

struct MSweepCell {
  int machines = 0;
  std::vector<long> rounds_per_rep;   // -1 when the threshold was not reached
  long median_rounds = -1;            // -1: not reached
  int completed_reps = 0;
  RunTrace median_trace;
};

struct MSweepResult {
  std::vector<MSweepCell> cells;
  double threshold = 0.0;
  bool any_diverged = false;
};

/// Convergence vs sync rounds for each h in spec.sweep_values, GHZ target.
/// Emits one median trace CSV per h, a summary.csv of epsilon per round per
/// h, and manifest.json, all into spec.out_dir (written atomically).
HSweepResult run_h_sweep(const ExperimentSpec& spec);

/// Rounds to reach epsilon <= threshold for each worker count in
/// spec.sweep_values. Emits rounds_to_threshold.csv, per-M median traces and
/// manifest.json.
MSweepResult run_m_sweep(const ExperimentSpec& spec);

/// One run of the configured mode on freshly generated GHZ data. Emits
/// trace.csv (full schema including wall time) and manifest.json.
RunResult run_single(const ExperimentSpec& spec);

struct CheckResult {
  std::string name;
  bool pass = false;
  double max_error = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

/// Runs a validation suite: "oracle" (matrix-free vs dense), "gradient"
/// (finite differences), "procrustes", "schedule", or "all". Results carry
/// the max observed error per check.
ValidationReport run_validation(const std::string& suite);
void print_report(std::ostream& out, const ValidationReport& report);

/// Manifest round-trip: a JSON file holding the full resolved spec, from
/// which the identical experiment can be re-run.
void write_manifest(const std::filesystem::path& path, const ExperimentSpec& spec);
ExperimentSpec load_manifest(const std::filesystem::path& path);
std::string spec_summary_json(const ExperimentSpec& spec);

}  // namespace qst
