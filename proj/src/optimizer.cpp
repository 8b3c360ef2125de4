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

#include "qst/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>

#include "qst/linalg.hpp"
#include "qst/rng.hpp"

namespace qst {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kDenseInitMaxQubits = 8;

bool finite_and_bounded(const CMatrix& u, double norm_limit_sq) {
  return u.allFinite() && u.squaredNorm() <= norm_limit_sq;
}

// One worker's local state between synchronizations.
struct Worker {
  const WorkerShard* shard = nullptr;
  CMatrix u;
  Rng rng{0};
};

// Runs `steps` local SFGD steps starting at global step t0. Batch indices are
// drawn with replacement from the worker's own stream, except that b = m_i
// degenerates to a deterministic full pass so the run reduces exactly to FGD.
// Snapshots the iterate at the start of the final step into `pre` (the
// quantity whose dispersion across workers the trace reports as drift).
void run_block(Worker& w, long t0, int steps, const StepSchedule& schedule,
               int batch, CMatrix& pre, CMatrix& gradient) {
  const auto m = static_cast<std::uint64_t>(w.shard->records.size());
  const bool full_batch = static_cast<std::uint64_t>(batch) == m;
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (int s = 0; s < steps; ++s) {
    if (s == steps - 1) pre = w.u;
    gradient.setZero(w.u.rows(), w.u.cols());
    for (int k = 0; k < batch; ++k) {
      const std::size_t pick =
          full_batch ? static_cast<std::size_t>(k)
                     : static_cast<std::size_t>(w.rng.next_below(m));
      const auto& record = w.shard->records[pick];
      const double residual = expectation(record.pauli, w.u) - record.value;
      accumulate_weighted_pauli(record.pauli, residual * inv_b, w.u, gradient);
    }
    w.u.noalias() -= schedule.at(t0 + s) * gradient;
  }
}

struct MetricsContext {
  const std::optional<DensityFactor>* target;
  std::span<const MeasurementRecord> pooled;
  std::chrono::steady_clock::time_point start;
};

TraceRow make_row(long round, long iter, double eta, const CMatrix& average,
                  double drift, const MetricsContext& ctx) {
  TraceRow row;
  row.round = round;
  row.iter = iter;
  row.eta = eta;
  row.drift = drift;
  if (ctx.target->has_value()) {
    row.epsilon = recon_error(average, (*ctx.target)->entries);
    row.d2 = procrustes_distance_sq(average, (*ctx.target)->entries);
  } else {
    row.epsilon = kNaN;
    row.d2 = kNaN;
  }
  row.objective = objective(ctx.pooled, average);
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              ctx.start)
                    .count();
  return row;
}

void format_double(std::string& out, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  out += buf;
}

}  // namespace

StepSchedule StepSchedule::constant(double eta) {
  if (!(eta > 0.0)) {
    throw std::invalid_argument("StepSchedule: eta must be positive");
  }
  StepSchedule s;
  s.kind = Kind::constant;
  s.eta = eta;
  return s;
}

StepSchedule StepSchedule::diminishing(double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("StepSchedule: alpha must be positive");
  }
  StepSchedule s;
  s.kind = Kind::diminishing;
  s.alpha = alpha;
  return s;
}

double StepSchedule::at(long t) const {
  if (t < 0) {
    throw std::invalid_argument("StepSchedule: negative step index");
  }
  if (kind == Kind::constant) return eta;
  return 2.0 / (alpha * static_cast<double>(t + 2));
}

long RunConfig::total_iterations() const {
  if (rounds > 0) return rounds * local_steps;
  return total_steps;
}

double objective(std::span<const MeasurementRecord> records,
                 const Eigen::Ref<const CMatrix>& u) {
  if (records.empty()) {
    throw std::invalid_argument("objective: empty record set");
  }
  double total = 0.0;
  for (const auto& record : records) {
    const double residual = expectation(record.pauli, u) - record.value;
    total += residual * residual;
  }
  return total / (2.0 * static_cast<double>(records.size()));
}

CMatrix batch_gradient(std::span<const MeasurementRecord> batch,
                       const Eigen::Ref<const CMatrix>& u) {
  if (batch.empty()) {
    throw std::invalid_argument("batch_gradient: empty batch");
  }
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  CMatrix acc = CMatrix::Zero(u.rows(), u.cols());
  for (const auto& record : batch) {
    const double residual = expectation(record.pauli, u) - record.value;
    accumulate_weighted_pauli(record.pauli, residual * inv_b, u, acc);
  }
  return acc;
}

DensityFactor spectral_initialize(std::span<const MeasurementRecord> records,
                                  int num_qubits, int rank) {
  if (records.empty()) {
    throw std::invalid_argument("spectral_initialize: empty record set");
  }
  const Index d = dim_for_qubits(num_qubits);
  const double scale =
      static_cast<double>(d) / static_cast<double>(records.size());
  std::vector<PauliString> strings;
  strings.reserve(records.size());
  RVector weights(static_cast<Index>(records.size()));
  for (std::size_t k = 0; k < records.size(); ++k) {
    strings.push_back(records[k].pauli);
    weights[static_cast<Index>(k)] = scale * records[k].value;
  }
  DensityFactor init;
  init.num_qubits = num_qubits;
  init.rank = rank;
  if (num_qubits <= kDenseInitMaxQubits) {
    const CMatrix estimate =
        apply_weighted_pauli_sum(strings, weights, CMatrix::Identity(d, d));
    init.entries = top_psd_factor(estimate, rank);
  } else {
    const HermitianApply apply = [&](const Eigen::Ref<const CVector>& v) {
      return CVector(apply_weighted_pauli_sum(strings, weights, v));
    };
    init.entries =
        top_psd_factor(apply, d, rank, weights.cwiseAbs().sum());
  }
  return init;
}

DensityFactor spectral_initialize(std::span<const WorkerShard> shards, int rank) {
  if (shards.empty()) {
    throw std::invalid_argument("spectral_initialize: no shards");
  }
  const std::vector<MeasurementRecord> pooled = pool_records(shards);
  if (pooled.empty()) {
    throw std::invalid_argument("spectral_initialize: shards are empty");
  }
  const int n = pooled.front().pauli.num_qubits();
  return spectral_initialize(pooled, n, rank);
}

double theory_alpha(const DensityFactor& target) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram(target.entries));
  const double sigma_r = solver.eigenvalues()[0];  // ascending: [0] is r-th largest
  if (!(sigma_r > 0.0)) {
    throw std::invalid_argument("theory_alpha: target factor is rank degenerate");
  }
  return 0.3 * sigma_r;
}

RunResult run_local_sfgd(const RunConfig& config,
                         std::span<const WorkerShard> shards,
                         const std::optional<DensityFactor>& target,
                         const RunOptions& options) {
  if (shards.empty() || static_cast<int>(shards.size()) != config.machines) {
    throw std::invalid_argument("run_local_sfgd: shard count != machines");
  }
  if (config.local_steps < 1) {
    throw std::invalid_argument("run_local_sfgd: local_steps must be >= 1");
  }
  if ((config.rounds > 0) == (config.total_steps > 0)) {
    throw std::invalid_argument(
        "run_local_sfgd: set exactly one of rounds / total_steps");
  }
  if (config.metrics_cadence < 1) {
    throw std::invalid_argument("run_local_sfgd: metrics_cadence must be >= 1");
  }
  std::size_t min_records = shards.front().records.size();
  for (const auto& shard : shards) {
    min_records = std::min(min_records, shard.records.size());
  }
  if (min_records == 0 || config.batch < 1 ||
      static_cast<std::size_t>(config.batch) > min_records) {
    throw std::invalid_argument("run_local_sfgd: need 1 <= batch <= min m_i");
  }

  const std::vector<MeasurementRecord> pooled = pool_records(shards);
  const DensityFactor init = options.initial.has_value()
                                 ? *options.initial
                                 : spectral_initialize(shards, config.rank);
  if (init.dim() != dim_for_qubits(config.num_qubits) ||
      init.entries.cols() != config.rank) {
    throw std::invalid_argument("run_local_sfgd: initial factor shape mismatch");
  }
  if (target.has_value() && target->dim() != init.dim()) {
    throw std::invalid_argument("run_local_sfgd: target dimension mismatch");
  }

  const long total = config.total_iterations();
  const long full_rounds = total / config.local_steps;
  const int tail_steps = static_cast<int>(total % config.local_steps);
  const double norm_limit_sq = 1e6 * init.entries.squaredNorm();

  const int m_count = config.machines;
  std::vector<Worker> workers(static_cast<std::size_t>(m_count));
  std::vector<CMatrix> pre(static_cast<std::size_t>(m_count));
  std::vector<CMatrix> scratch(static_cast<std::size_t>(m_count));
  for (int i = 0; i < m_count; ++i) {
    auto& w = workers[static_cast<std::size_t>(i)];
    w.shard = &shards[static_cast<std::size_t>(i)];
    w.u = init.entries;
    w.rng = Rng(batch_seed(config.seed, static_cast<std::uint64_t>(i)));
  }

  MetricsContext ctx{&target, pooled, std::chrono::steady_clock::now()};
  RunResult result;
  result.trace.has_target = target.has_value();
  result.factor = init;
  const double inv_m = 1.0 / static_cast<double>(m_count);

  auto execute_block = [&](long t0, int steps) {
    if (options.parallel_workers && m_count > 1) {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(m_count));
      for (int i = 0; i < m_count; ++i) {
        pool.emplace_back([&, i] {
          const auto idx = static_cast<std::size_t>(i);
          run_block(workers[idx], t0, steps, config.schedule, config.batch,
                    pre[idx], scratch[idx]);
        });
      }
      for (auto& thread : pool) thread.join();
    } else {
      for (int i = 0; i < m_count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        run_block(workers[idx], t0, steps, config.schedule, config.batch,
                  pre[idx], scratch[idx]);
      }
    }
  };

  auto average_workers = [&]() {
    CMatrix sum = workers[0].u;
    for (int i = 1; i < m_count; ++i) {
      sum += workers[static_cast<std::size_t>(i)].u;
    }
    return CMatrix(sum * inv_m);
  };

  for (long p = 1; p <= full_rounds; ++p) {
    const long t0 = (p - 1) * config.local_steps;
    execute_block(t0, config.local_steps);

    const CMatrix average = average_workers();
    bool healthy = finite_and_bounded(average, norm_limit_sq);
    for (const auto& w : workers) {
      healthy = healthy && finite_and_bounded(w.u, norm_limit_sq);
    }
    if (!healthy) {
      result.status = RunStatus::diverged;
      return result;
    }

    CMatrix pre_mean = pre[0];
    for (int i = 1; i < m_count; ++i) {
      pre_mean += pre[static_cast<std::size_t>(i)];
    }
    pre_mean *= inv_m;
    double drift = 0.0;
    for (const auto& snapshot : pre) {
      drift += (snapshot - pre_mean).squaredNorm();
    }
    drift *= inv_m;

    for (auto& w : workers) w.u = average;
    result.factor.entries = average;

    if (p % config.metrics_cadence == 0 || p == full_rounds) {
      const long iter = p * config.local_steps;
      result.trace.rows.push_back(
          make_row(p, iter, config.schedule.at(iter - 1), average, drift, ctx));
    }
  }

  if (tail_steps > 0) {
    execute_block(full_rounds * config.local_steps, tail_steps);
    const CMatrix average = average_workers();
    if (!finite_and_bounded(average, norm_limit_sq)) {
      result.status = RunStatus::diverged;
      return result;
    }
    result.factor.entries = average;
  }
  return result;
}

RunResult run_fgd(const RunConfig& config,
                  std::span<const MeasurementRecord> pooled,
                  const std::optional<DensityFactor>& target,
                  const RunOptions& options) {
  if (pooled.empty()) {
    throw std::invalid_argument("run_fgd: empty record set");
  }
  if (config.rounds < 1) {
    throw std::invalid_argument("run_fgd: rounds must be >= 1");
  }
  if (config.metrics_cadence < 1) {
    throw std::invalid_argument("run_fgd: metrics_cadence must be >= 1");
  }
  const DensityFactor init =
      options.initial.has_value()
          ? *options.initial
          : spectral_initialize(pooled, config.num_qubits, config.rank);
  if (target.has_value() && target->dim() != init.dim()) {
    throw std::invalid_argument("run_fgd: target dimension mismatch");
  }
  const double norm_limit_sq = 1e6 * init.entries.squaredNorm();

  MetricsContext ctx{&target, pooled, std::chrono::steady_clock::now()};
  RunResult result;
  result.trace.has_target = target.has_value();
  result.factor = init;

  CMatrix u = init.entries;
  for (long t = 0; t < config.rounds; ++t) {
    const double eta = config.schedule.at(t);
    u.noalias() -= eta * batch_gradient(pooled, u);
    if (!finite_and_bounded(u, norm_limit_sq)) {
      result.status = RunStatus::diverged;
      return result;
    }
    result.factor.entries = u;
    if ((t + 1) % config.metrics_cadence == 0 || t + 1 == config.rounds) {
      result.trace.rows.push_back(make_row(t + 1, t + 1, eta, u, 0.0, ctx));
    }
  }
  return result;
}

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_trace_csv: cannot open " + path.string());
  }
  out << "round,iter,eta,epsilon,d2,drift,objective,seconds\n";
  std::string line;
  for (const auto& row : trace.rows) {
    line.clear();
    line += std::to_string(row.round);
    line += ',';
    line += std::to_string(row.iter);
    line += ',';
    format_double(line, row.eta);
    line += ',';
    if (trace.has_target) format_double(line, row.epsilon);
    line += ',';
    if (trace.has_target) format_double(line, row.d2);
    line += ',';
    format_double(line, row.drift);
    line += ',';
    format_double(line, row.objective);
    line += ',';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", row.seconds);
    line += buf;
    out << line << '\n';
  }
  if (!out) {
    throw std::runtime_error("write_trace_csv: write failed for " + path.string());
  }
}

bool trace_equal(const RunTrace& a, const RunTrace& b) {
  if (a.has_target != b.has_target || a.rows.size() != b.rows.size()) {
    return false;
  }
  auto same = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const TraceRow& ra = a.rows[i];
    const TraceRow& rb = b.rows[i];
    if (ra.round != rb.round || ra.iter != rb.iter || !same(ra.eta, rb.eta) ||
        !same(ra.epsilon, rb.epsilon) || !same(ra.d2, rb.d2) ||
        !same(ra.drift, rb.drift) || !same(ra.objective, rb.objective)) {
      return false;
    }
  }
  return true;
}

}  // namespace qst
