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

#include "qst/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qst/rng.hpp"

namespace qst {

namespace {

int resolve_pool_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QSTSIM_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs job(0..count-1) on up to `threads` threads; rethrows the first failure.
void run_jobs(int threads, int count, const std::function<void(int)>& job) {
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      if (failed.load()) return;
      try {
        job(i);
      } catch (const std::exception& e) {
        std::scoped_lock lock(error_mutex);
        failed.store(true);
        if (error.empty()) error = e.what();
      }
    }
  };
  const int pool_size = std::min(threads, count);
  if (pool_size <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(pool_size));
    for (int t = 0; t < pool_size; ++t) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }
  if (failed.load()) {
    throw std::runtime_error("sweep job failed: " + error);
  }
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return (n % 2 == 1) ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

long median_rounds(std::vector<long> values) {
  // -1 (not reached) sorts last so the median stays meaningful.
  std::sort(values.begin(), values.end(), [](long a, long b) {
    const long aa = a < 0 ? std::numeric_limits<long>::max() : a;
    const long bb = b < 0 ? std::numeric_limits<long>::max() : b;
    return aa < bb;
  });
  return values[(values.size() - 1) / 2];
}

// Per-round median of every metric across the completed repetitions.
RunTrace median_trace(const std::vector<const RunTrace*>& traces) {
  RunTrace out;
  if (traces.empty()) return out;
  out.has_target = traces.front()->has_target;
  std::size_t rows = traces.front()->rows.size();
  for (const auto* t : traces) rows = std::min(rows, t->rows.size());
  out.rows.reserve(rows);
  std::vector<double> scratch(traces.size());
  auto collect = [&](std::size_t row, auto member) {
    for (std::size_t k = 0; k < traces.size(); ++k) {
      scratch[k] = traces[k]->rows[row].*member;
    }
    return median_of(scratch);
  };
  for (std::size_t row = 0; row < rows; ++row) {
    TraceRow r = traces.front()->rows[row];
    r.epsilon = collect(row, &TraceRow::epsilon);
    r.d2 = collect(row, &TraceRow::d2);
    r.drift = collect(row, &TraceRow::drift);
    r.objective = collect(row, &TraceRow::objective);
    r.seconds = collect(row, &TraceRow::seconds);
    out.rows.push_back(r);
  }
  return out;
}

void format_g17(std::string& out, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  out += buf;
}

// Atomic file write: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string());
    }
    out << content;
    if (!out) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

// Sweep trace CSV: deterministic columns only (no wall time), with the
// resolved spec embedded as a leading comment so every artifact is
// self-describing.
std::string sweep_trace_csv(const RunTrace& trace, const std::string& comment) {
  std::string out = "# config: " + comment + "\n";
  out += "round,iter,eta,epsilon,d2,drift,objective\n";
  for (const auto& row : trace.rows) {
    out += std::to_string(row.round);
    out += ',';
    out += std::to_string(row.iter);
    out += ',';
    format_g17(out, row.eta);
    out += ',';
    format_g17(out, row.epsilon);
    out += ',';
    format_g17(out, row.d2);
    out += ',';
    format_g17(out, row.drift);
    out += ',';
    format_g17(out, row.objective);
    out += '\n';
  }
  return out;
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["preset"] = spec.preset;
  j["qubits"] = spec.config.num_qubits;
  j["rank"] = spec.config.rank;
  j["workers"] = spec.config.machines;
  j["local_steps"] = spec.config.local_steps;
  j["batch"] = spec.config.batch;
  j["rounds"] = spec.config.rounds;
  j["total_steps"] = spec.config.total_steps;
  j["schedule"] = spec.config.schedule.kind == StepSchedule::Kind::constant
                      ? "constant"
                      : "diminishing";
  j["eta"] = spec.config.schedule.eta;
  j["alpha"] = spec.config.schedule.alpha;
  j["shots"] = spec.config.shots.str();
  j["seed"] = spec.config.seed;
  switch (spec.config.mode) {
    case Mode::fgd: j["mode"] = "fgd"; break;
    case Mode::sfgd: j["mode"] = "sfgd"; break;
    case Mode::local_sfgd: j["mode"] = "local"; break;
  }
  j["metrics_cadence"] = spec.config.metrics_cadence;
  j["measurements"] = spec.m_per_worker;
  j["include_identity"] = spec.include_identity;
  j["sweep_values"] = spec.sweep_values;
  j["repetitions"] = spec.repetitions;
  j["threshold"] = spec.threshold;
  return j;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.preset = j.at("preset").get<std::string>();
  spec.config.num_qubits = j.at("qubits").get<int>();
  spec.config.rank = j.at("rank").get<int>();
  spec.config.machines = j.at("workers").get<int>();
  spec.config.local_steps = j.at("local_steps").get<int>();
  spec.config.batch = j.at("batch").get<int>();
  spec.config.rounds = j.at("rounds").get<long>();
  spec.config.total_steps = j.at("total_steps").get<long>();
  const auto schedule = j.at("schedule").get<std::string>();
  if (schedule == "constant") {
    spec.config.schedule = StepSchedule::constant(j.at("eta").get<double>());
  } else {
    spec.config.schedule = StepSchedule::diminishing(j.at("alpha").get<double>());
  }
  spec.config.shots = Shots::parse(j.at("shots").get<std::string>());
  spec.config.seed = j.at("seed").get<std::uint64_t>();
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "fgd") {
    spec.config.mode = Mode::fgd;
  } else if (mode == "sfgd") {
    spec.config.mode = Mode::sfgd;
  } else if (mode == "local") {
    spec.config.mode = Mode::local_sfgd;
  } else {
    throw std::invalid_argument("manifest: unknown mode '" + mode + "'");
  }
  spec.config.metrics_cadence = j.at("metrics_cadence").get<int>();
  spec.m_per_worker = j.at("measurements").get<int>();
  spec.include_identity = j.at("include_identity").get<bool>();
  spec.sweep_values = j.at("sweep_values").get<std::vector<int>>();
  spec.repetitions = j.at("repetitions").get<int>();
  spec.threshold = j.at("threshold").get<double>();
  return spec;
}

struct CellJob {
  int value = 0;  // h or machine count
  int rep = 0;
};

// One sweep cell: fresh GHZ data with the repetition's seed, one run.
RunResult run_cell(const ExperimentSpec& spec, int local_steps, int machines,
                   int rep, const std::string& label) {
  RunConfig config = spec.config;
  config.local_steps = local_steps;
  config.machines = machines;
  config.seed = rep_seed(spec.config.seed, static_cast<std::uint64_t>(rep));
  const DensityFactor target = ghz_factor(config.num_qubits);
  const std::vector<WorkerShard> shards =
      build_shards(config.num_qubits, config.machines, spec.m_per_worker,
                   config.shots, config.seed, target, spec.include_identity);
  if (spec.dump_data) {
    DatasetManifest dm{config.num_qubits, config.machines, spec.m_per_worker,
                       config.seed,       config.shots,    spec.include_identity,
                       "ghz"};
    write_dataset(
        spec.out_dir / ("dataset_" + label + "_rep" + std::to_string(rep) + ".jsonl"),
        shards, dm);
  }
  return run_local_sfgd(config, shards, target);
}

void require_sweep_inputs(const ExperimentSpec& spec) {
  if (spec.sweep_values.empty()) {
    throw std::invalid_argument("sweep: no sweep values");
  }
  if (spec.repetitions < 1) {
    throw std::invalid_argument("sweep: repetitions must be >= 1");
  }
  std::filesystem::create_directories(spec.out_dir);
}

}  // namespace

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

HSweepResult run_h_sweep(const ExperimentSpec& spec) {
  require_sweep_inputs(spec);
  write_manifest(spec.out_dir / "manifest.json", spec);
  const std::string comment = spec_summary_json(spec);

  const int values = static_cast<int>(spec.sweep_values.size());
  const int reps = spec.repetitions;
  std::vector<std::vector<RunResult>> results(
      static_cast<std::size_t>(values),
      std::vector<RunResult>(static_cast<std::size_t>(reps)));
  run_jobs(resolve_pool_threads(spec.pool_threads), values * reps, [&](int job) {
    const int v = job / reps;
    const int rep = job % reps;
    const int h = spec.sweep_values[static_cast<std::size_t>(v)];
    results[static_cast<std::size_t>(v)][static_cast<std::size_t>(rep)] =
        run_cell(spec, h, spec.config.machines, rep, "h" + std::to_string(h));
  });

  HSweepResult sweep;
  for (int v = 0; v < values; ++v) {
    HSweepCell cell;
    cell.local_steps = spec.sweep_values[static_cast<std::size_t>(v)];
    std::vector<const RunTrace*> completed;
    for (const auto& r : results[static_cast<std::size_t>(v)]) {
      if (r.status == RunStatus::ok) {
        completed.push_back(&r.trace);
      } else {
        sweep.any_diverged = true;
      }
    }
    cell.completed_reps = static_cast<int>(completed.size());
    cell.median_trace = median_trace(completed);
    write_file_atomic(
        spec.out_dir / ("trace_h" + std::to_string(cell.local_steps) + ".csv"),
        sweep_trace_csv(cell.median_trace, comment));
    sweep.cells.push_back(std::move(cell));
  }

  // Summary: median epsilon per sync round, one column per h.
  std::string summary = "# config: " + comment + "\nround";
  for (const auto& cell : sweep.cells) {
    summary += ",h" + std::to_string(cell.local_steps);
  }
  summary += '\n';
  std::size_t max_rows = 0;
  for (const auto& cell : sweep.cells) {
    max_rows = std::max(max_rows, cell.median_trace.rows.size());
  }
  for (std::size_t row = 0; row < max_rows; ++row) {
    summary += std::to_string(row + 1);
    for (const auto& cell : sweep.cells) {
      summary += ',';
      if (row < cell.median_trace.rows.size()) {
        format_g17(summary, cell.median_trace.rows[row].epsilon);
      }
    }
    summary += '\n';
  }
  write_file_atomic(spec.out_dir / "summary.csv", summary);
  return sweep;
}

MSweepResult run_m_sweep(const ExperimentSpec& spec) {
  require_sweep_inputs(spec);
  write_manifest(spec.out_dir / "manifest.json", spec);
  const std::string comment = spec_summary_json(spec);

  const int values = static_cast<int>(spec.sweep_values.size());
  const int reps = spec.repetitions;
  std::vector<std::vector<RunResult>> results(
      static_cast<std::size_t>(values),
      std::vector<RunResult>(static_cast<std::size_t>(reps)));
  run_jobs(resolve_pool_threads(spec.pool_threads), values * reps, [&](int job) {
    const int v = job / reps;
    const int rep = job % reps;
    const int m = spec.sweep_values[static_cast<std::size_t>(v)];
    results[static_cast<std::size_t>(v)][static_cast<std::size_t>(rep)] =
        run_cell(spec, spec.config.local_steps, m, rep, "m" + std::to_string(m));
  });

  MSweepResult sweep;
  sweep.threshold = spec.threshold;
  for (int v = 0; v < values; ++v) {
    MSweepCell cell;
    cell.machines = spec.sweep_values[static_cast<std::size_t>(v)];
    std::vector<const RunTrace*> completed;
    for (const auto& r : results[static_cast<std::size_t>(v)]) {
      if (r.status != RunStatus::ok) {
        sweep.any_diverged = true;
        cell.rounds_per_rep.push_back(-1);
        continue;
      }
      completed.push_back(&r.trace);
      long reached = -1;
      for (const auto& row : r.trace.rows) {
        if (row.epsilon <= spec.threshold) {
          reached = row.round;
          break;
        }
      }
      cell.rounds_per_rep.push_back(reached);
    }
    cell.completed_reps = static_cast<int>(completed.size());
    cell.median_rounds = median_rounds(cell.rounds_per_rep);
    cell.median_trace = median_trace(completed);
    write_file_atomic(
        spec.out_dir / ("trace_m" + std::to_string(cell.machines) + ".csv"),
        sweep_trace_csv(cell.median_trace, comment));
    sweep.cells.push_back(std::move(cell));
  }

  std::string table = "# config: " + comment + "\nmachines,median_rounds";
  for (int rep = 0; rep < reps; ++rep) {
    table += ",rep" + std::to_string(rep);
  }
  table += '\n';
  auto cellstr = [](long rounds) {
    return rounds < 0 ? std::string("not_reached") : std::to_string(rounds);
  };
  for (const auto& cell : sweep.cells) {
    table += std::to_string(cell.machines);
    table += ',';
    table += cellstr(cell.median_rounds);
    for (long r : cell.rounds_per_rep) {
      table += ',';
      table += cellstr(r);
    }
    table += '\n';
  }
  write_file_atomic(spec.out_dir / "rounds_to_threshold.csv", table);
  return sweep;
}

RunResult run_single(const ExperimentSpec& spec) {
  std::filesystem::create_directories(spec.out_dir);
  write_manifest(spec.out_dir / "manifest.json", spec);

  RunConfig config = spec.config;
  const DensityFactor target = ghz_factor(config.num_qubits);
  std::vector<WorkerShard> shards =
      build_shards(config.num_qubits, config.machines, spec.m_per_worker,
                   config.shots, config.seed, target, spec.include_identity);
  if (spec.dump_data) {
    DatasetManifest dm{config.num_qubits, config.machines, spec.m_per_worker,
                       config.seed,       config.shots,    spec.include_identity,
                       "ghz"};
    write_dataset(spec.out_dir / "dataset.jsonl", shards, dm);
  }

  RunResult result;
  switch (config.mode) {
    case Mode::fgd: {
      const std::vector<MeasurementRecord> pooled = pool_records(shards);
      if (config.rounds == 0) config.rounds = config.total_iterations();
      result = run_fgd(config, pooled, target);
      break;
    }
    case Mode::sfgd: {
      // Centralized minibatch SFGD: pool everything into one shard.
      WorkerShard pooled_shard;
      pooled_shard.worker_id = 0;
      pooled_shard.rng_seed = shard_seed(config.seed, 0);
      pooled_shard.records = pool_records(shards);
      config.machines = 1;
      const long total = config.total_iterations();
      config.local_steps = 1;
      config.rounds = total;
      config.total_steps = 0;
      const std::vector<WorkerShard> single{std::move(pooled_shard)};
      result = run_local_sfgd(config, single, target);
      break;
    }
    case Mode::local_sfgd:
      result = run_local_sfgd(config, shards, target);
      break;
  }
  write_trace_csv(spec.out_dir / "trace.csv", result.trace);
  save_factor(spec.out_dir / "factor.bin", result.factor);
  return result;
}

void write_manifest(const std::filesystem::path& path,
                    const ExperimentSpec& spec) {
  write_file_atomic(path, spec_to_json(spec).dump(2) + "\n");
}

ExperimentSpec load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_manifest: cannot open " + path.string());
  }
  return spec_from_json(nlohmann::json::parse(in));
}

std::string spec_summary_json(const ExperimentSpec& spec) {
  return spec_to_json(spec).dump();
}

}  // namespace qst
