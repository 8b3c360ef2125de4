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

// Command-line harness for the Local SFGD tomography experiments.
//
// Exit codes: 0 success, 1 run divergence, 2 validation failure, 64 usage.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qst/experiment.hpp"
#include "qst/pauli.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiverged = 1;
constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;

void print_final(const qst::RunTrace& trace) {
  if (trace.rows.empty()) return;
  const auto& last = trace.rows.back();
  std::printf("round %ld  iter %ld  epsilon %.6g  d2 %.6g  objective %.6g\n",
              last.round, last.iter, last.epsilon, last.d2, last.objective);
}

int dispatch(const qst::ExperimentSpec& spec) {
  if (spec.preset == "fig1-top") {
    const qst::HSweepResult sweep = qst::run_h_sweep(spec);
    for (const auto& cell : sweep.cells) {
      const double final_eps = cell.median_trace.rows.empty()
                                   ? std::nan("")
                                   : cell.median_trace.rows.back().epsilon;
      std::printf("h=%-4d reps=%d  final median epsilon %.6g\n",
                  cell.local_steps, cell.completed_reps, final_eps);
    }
    std::printf("wrote %s\n", (spec.out_dir / "summary.csv").c_str());
    return sweep.any_diverged ? kExitDiverged : kExitOk;
  }
  if (spec.preset == "fig1-bottom") {
    const qst::MSweepResult sweep = qst::run_m_sweep(spec);
    for (const auto& cell : sweep.cells) {
      if (cell.median_rounds < 0) {
        std::printf("M=%-3d median rounds to eps<=%g: not reached\n",
                    cell.machines, sweep.threshold);
      } else {
        std::printf("M=%-3d median rounds to eps<=%g: %ld\n", cell.machines,
                    sweep.threshold, cell.median_rounds);
      }
    }
    std::printf("wrote %s\n", (spec.out_dir / "rounds_to_threshold.csv").c_str());
    return sweep.any_diverged ? kExitDiverged : kExitOk;
  }
  const qst::RunResult result = qst::run_single(spec);
  print_final(result.trace);
  std::printf("wrote %s\n", (spec.out_dir / "trace.csv").c_str());
  if (result.status == qst::RunStatus::diverged) {
    std::fprintf(stderr, "run diverged; trace holds the last finite rounds\n");
    return kExitDiverged;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed low-rank quantum state tomography via Local SFGD"};

  int qubits = 3, rank = 1, workers = 10, local_steps = 10, batch = 50;
  long rounds = 100, total_steps = 0;
  double eta = 1.0, alpha = 0.0, threshold = 0.05;
  std::string schedule = "constant", shots = "1024", mode = "local";
  std::string preset, validate_suite, manifest_path, out_dir = "qstsim-out";
  std::uint64_t seed = 42;
  int reps = 5, measurements = 200, cadence = 1;
  bool include_identity = false, dump_data = false, inject_fault = false;

  auto* qubits_opt = app.add_option("--qubits", qubits, "Number of qubits n");
  auto* rank_opt = app.add_option("--rank", rank, "Factor rank r");
  auto* workers_opt = app.add_option("--workers", workers, "Number of machines M");
  auto* h_opt = app.add_option("--local-steps", local_steps,
                               "Local steps h between synchronizations");
  auto* batch_opt = app.add_option("--batch", batch, "Minibatch size b");
  auto* rounds_opt = app.add_option("--rounds", rounds, "Synchronization rounds");
  auto* steps_opt = app.add_option("--total-steps", total_steps,
                                   "Total local-step budget (alternative to --rounds)");
  auto* eta_opt = app.add_option("--eta", eta, "Constant step size");
  auto* alpha_opt =
      app.add_option("--alpha", alpha,
                     "Diminishing-schedule alpha; derived from the target when omitted");
  auto* schedule_opt =
      app.add_option("--schedule", schedule, "Step-size schedule")
          ->check(CLI::IsMember({"constant", "diminishing"}));
  app.add_option("--shots", shots, "Shots per measurement, or 'exact'");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--reps", reps, "Repetitions for seed-averaged sweeps");
  app.add_option("--threshold", threshold, "Epsilon threshold for the M sweep");
  auto* preset_opt = app.add_option("--preset", preset, "Experiment preset")
                         ->check(CLI::IsMember({"fig1-top", "fig1-bottom"}));
  app.add_option("--out", out_dir, "Output directory");
  auto* mode_opt = app.add_option("--mode", mode, "Optimizer mode")
                       ->check(CLI::IsMember({"fgd", "sfgd", "local"}));
  app.add_flag("--include-identity", include_identity,
               "Allow the all-identity string when sampling");
  auto* validate_opt =
      app.add_option("--validate", validate_suite, "Run a validation suite")
          ->check(CLI::IsMember({"all", "oracle", "gradient", "procrustes",
                                 "schedule"}));
  app.add_option("--measurements", measurements, "Measurements per worker");
  app.add_option("--metrics-cadence", cadence, "Record every k-th sync round");
  auto* manifest_opt = app.add_option(
      "--manifest", manifest_path, "Re-run the experiment described by a manifest");
  app.add_flag("--dump-data", dump_data, "Also write the generated dataset");
  app.add_flag("--inject-pauli-phase-fault", inject_fault,
               "Debug: corrupt the Y phase so oracle validation fails")
      ->group("");  // hidden

  steps_opt->excludes(rounds_opt);
  validate_opt->excludes(preset_opt);
  for (auto* opt : {qubits_opt, rank_opt, workers_opt, h_opt, batch_opt,
                    rounds_opt, steps_opt, eta_opt, alpha_opt, schedule_opt,
                    preset_opt, mode_opt}) {
    manifest_opt->excludes(opt);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints help/error text
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  if (inject_fault) {
    qst::set_pauli_phase_fault(true);
  }

  try {
    if (!validate_suite.empty()) {
      const qst::ValidationReport report = qst::run_validation(validate_suite);
      qst::print_report(std::cout, report);
      return report.all_pass() ? kExitOk : kExitValidation;
    }

    qst::ExperimentSpec spec;
    if (!manifest_path.empty()) {
      spec = qst::load_manifest(manifest_path);
    } else {
      spec.preset = preset;
      spec.config.num_qubits = qubits;
      spec.config.rank = rank;
      spec.config.machines = workers;
      spec.config.local_steps = local_steps;
      spec.config.batch = batch;
      if (total_steps > 0) {
        spec.config.rounds = 0;
        spec.config.total_steps = total_steps;
      } else {
        spec.config.rounds = rounds;
        spec.config.total_steps = 0;
      }
      spec.config.shots = qst::Shots::parse(shots);
      spec.config.seed = seed;
      spec.config.metrics_cadence = cadence;
      spec.config.mode = mode == "fgd"    ? qst::Mode::fgd
                         : mode == "sfgd" ? qst::Mode::sfgd
                                          : qst::Mode::local_sfgd;
      if (schedule == "constant") {
        if (alpha_opt->count() > 0) {
          std::fprintf(stderr, "--alpha requires --schedule diminishing\n");
          return kExitUsage;
        }
        spec.config.schedule = qst::StepSchedule::constant(eta);
      } else {
        if (eta_opt->count() > 0) {
          std::fprintf(stderr, "--eta applies to the constant schedule only\n");
          return kExitUsage;
        }
        const double resolved =
            alpha > 0.0 ? alpha
                        : qst::theory_alpha(qst::ghz_factor(qubits));
        spec.config.schedule = qst::StepSchedule::diminishing(resolved);
      }
      spec.m_per_worker = measurements;
      spec.include_identity = include_identity;
      spec.repetitions = reps;
      spec.threshold = threshold;
      spec.dump_data = dump_data;
      if (preset == "fig1-top") {
        spec.sweep_values = {1, 10, 25, 50, 100, 200};
        if (h_opt->count() > 0) {
          std::fprintf(stderr, "--local-steps is the swept variable of fig1-top\n");
          return kExitUsage;
        }
      } else if (preset == "fig1-bottom") {
        spec.sweep_values = {5, 10, 15, 20};
        if (workers_opt->count() > 0) {
          std::fprintf(stderr, "--workers is the swept variable of fig1-bottom\n");
          return kExitUsage;
        }
        if (h_opt->count() == 0) spec.config.local_steps = 20;
      }
    }
    spec.out_dir = out_dir;
    return dispatch(spec);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
