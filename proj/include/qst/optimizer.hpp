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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "qst/data.hpp"
#include "qst/states.hpp"
#include "qst/types.hpp"

namespace qst {

/// Step-size schedule: either a constant eta, or the diminishing rule
/// eta_t = 2 / (alpha * (t + 2)) with t counted from zero.
struct StepSchedule {
  enum class Kind { constant, diminishing };
  Kind kind = Kind::constant;
  double eta = 0.0;    // constant schedules
  double alpha = 0.0;  // diminishing schedules

  static StepSchedule constant(double eta);
  static StepSchedule diminishing(double alpha);
  double at(long t) const;
};

/// Synchronization cadence: workers average after every h-th local step, so
/// consecutive averaging events are exactly h steps apart.
struct SyncSchedule {
  int local_steps = 1;  // h >= 1
  bool sync_after(long t) const { return (t + 1) % local_steps == 0; }
};

enum class Mode { fgd, sfgd, local_sfgd };

/// Full parameter set of one optimization run.
struct RunConfig {
  int num_qubits = 3;
  int rank = 1;
  int machines = 1;     // M
  int local_steps = 1;  // h
  int batch = 50;       // b, drawn with replacement per worker per step
  long rounds = 0;      // P sync rounds; total steps T = P * h
  long total_steps = 0; // alternative budget when rounds == 0 (partial last
                        // block allowed; it ends in the returned average but
                        // produces no trace row)
  StepSchedule schedule = StepSchedule::constant(1.0);
  Shots shots = Shots::finite(1024);  // bookkeeping for manifests
  std::uint64_t seed = 0;
  Mode mode = Mode::local_sfgd;
  int metrics_cadence = 1;  // record every k-th sync round (final always kept)

  long total_iterations() const;
};

/// One recorded sync round. epsilon and d2 are NaN when the run had no
/// target to compare against; seconds is wall time and is excluded from
/// determinism comparisons.
struct TraceRow {
  long round = 0;
  long iter = 0;
  double eta = 0.0;
  double epsilon = 0.0;
  double d2 = 0.0;
  double drift = 0.0;
  double objective = 0.0;
  double seconds = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  bool has_target = false;
};

enum class RunStatus { ok, diverged };

struct RunResult {
  RunStatus status = RunStatus::ok;
  DensityFactor factor;  // worker average; on divergence, the last finite one
  RunTrace trace;
};

struct RunOptions {
  /// Start factor; defaults to the spectral initialization of the shards.
  std::optional<DensityFactor> initial;
  /// Run the M workers of each block on their own threads. The trace is
  /// bit-identical either way: streams are per-worker and the reduction is in
  /// worker_id order.
  bool parallel_workers = false;
};

/// 1/(2m) * sum_k (Tr(A_k U U^dagger) - y_k)^2 over the given records.
double objective(std::span<const MeasurementRecord> records,
                 const Eigen::Ref<const CMatrix>& u);

inline double objective(std::span<const MeasurementRecord> records,
                        const DensityFactor& u) {
  return objective(records, u.entries);
}

/// Stochastic gradient over a batch:
///   g = (1/b) * sum_k (Tr(A_k U U^dagger) - y_k) A_k U.
/// This absorbs the factor 2 of the Euclidean gradient into the step size, so
/// the directional derivative of the objective is dG(U)[D] = 2 Re<g, D>_F.
CMatrix batch_gradient(std::span<const MeasurementRecord> batch,
                       const Eigen::Ref<const CMatrix>& u);

/// Spectral initialization: factor the top-r PSD part of the back-projected
/// estimate S = (d/m) * sum_k y_k A_k. Under uniform Pauli sampling
/// E[y A] = rho/d, so the d/m scaling makes S an unbiased estimate of rho*
/// and on exact complete-basis data U0 U0^dagger recovers rho* exactly.
/// Dimensions above the dense cap (n > 8) use the matrix-free eigenpath.
DensityFactor spectral_initialize(std::span<const MeasurementRecord> records,
                                  int num_qubits, int rank);
DensityFactor spectral_initialize(std::span<const WorkerShard> shards, int rank);

/// alpha = (3 mu / 10) * sigma_r(X*) with the mu = 1 convention, computed
/// from the r-th largest eigenvalue of gram(U*). Simulation-only: requires a
/// known target.
double theory_alpha(const DensityFactor& target);

/// Runs Local SFGD over the shards: every worker performs `local_steps`
/// stochastic steps per round (per step, `batch` record indices drawn in
/// order, with replacement, from the worker's own stream seeded by
/// batch_seed(seed, worker_id); batch == m_i degenerates to a deterministic
/// full pass), then the factors are averaged in worker_id order and broadcast. Per round the trace
/// records the post-average metrics and the pre-average worker dispersion
/// (1/M) sum_i |U_bar - U_i|_F^2 measured at the start of the sync step,
/// which is zero whenever h = 1.
///
/// A non-finite iterate or |U|_F^2 > 1e6 * |U_0|_F^2 aborts with status
/// diverged carrying the rounds recorded so far.
RunResult run_local_sfgd(const RunConfig& config,
                         std::span<const WorkerShard> shards,
                         const std::optional<DensityFactor>& target,
                         const RunOptions& options = {});

/// Deterministic full-gradient descent on pooled records; rounds == iterations.
RunResult run_fgd(const RunConfig& config,
                  std::span<const MeasurementRecord> pooled,
                  const std::optional<DensityFactor>& target,
                  const RunOptions& options = {});

/// CSV with header round,iter,eta,epsilon,d2,drift,objective,seconds.
/// epsilon/d2 are empty fields when the run had no target.
void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);

/// Equality of the deterministic payload (everything except seconds).
bool trace_equal(const RunTrace& a, const RunTrace& b);

}  // namespace qst
