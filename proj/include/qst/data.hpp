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
#include <span>
#include <string>
#include <vector>

#include "qst/pauli.hpp"
#include "qst/states.hpp"
#include "qst/types.hpp"

namespace qst {

/// Shot budget of one measurement: a finite count of +-1 outcomes, or exact
/// (the noiseless expectation value itself).
class Shots {
 public:
  static Shots exact() { return Shots(0); }
  static Shots finite(std::int64_t count);

  bool is_exact() const { return count_ == 0; }
  std::int64_t count() const;

  /// Parses "exact" or a positive integer; inverse of str().
  static Shots parse(const std::string& text);
  std::string str() const;

  bool operator==(const Shots&) const = default;

 private:
  explicit Shots(std::int64_t count) : count_(count) {}
  std::int64_t count_;  // 0 encodes exact
};

/// One measured Pauli observable: the string, the shot-averaged value in
/// [-1, 1], and the shot budget that produced it.
struct MeasurementRecord {
  PauliString pauli;
  double value = 0.0;
  Shots shots = Shots::exact();
};

/// One machine's local dataset plus the seed its generation stream used.
struct WorkerShard {
  int worker_id = 0;
  std::vector<MeasurementRecord> records;
  std::uint64_t rng_seed = 0;
};

/// m strings drawn i.i.d. uniformly (with replacement) from the 4^n strings.
/// With include_identity = false (the default) the all-I string is rejected
/// and redrawn; it carries no information about a unit-trace state.
std::vector<PauliString> sample_pauli_strings(int num_qubits, int count,
                                              std::uint64_t seed,
                                              bool include_identity = false);

/// Simulates measuring observable `p` on the target state. With exact shots
/// the record holds t = Tr(A_p rho); with s finite shots it holds the mean of
/// s independent +-1 outcomes with P(+1) = (1+t)/2. Throws
/// std::invalid_argument when |t| > 1 + 1e-9 (non-normalized target).
MeasurementRecord measure(const PauliString& p, const DensityFactor& target,
                          Shots shots, std::uint64_t seed);

/// M homogeneous shards of m_per_worker measurements each. Per-shard seeds
/// derive from the master seed via shard_seed(), so a shard's contents do not
/// depend on the order in which workers are generated.
std::vector<WorkerShard> build_shards(int num_qubits, int machines,
                                      int m_per_worker, Shots shots,
                                      std::uint64_t seed,
                                      const DensityFactor& target,
                                      bool include_identity = false);

/// Flat view of all shard records in worker order.
std::vector<MeasurementRecord> pool_records(std::span<const WorkerShard> shards);

/// Reproducibility metadata written next to a dataset file.
struct DatasetManifest {
  int num_qubits = 0;
  int machines = 0;
  int m_per_worker = 0;
  std::uint64_t seed = 0;
  Shots shots = Shots::exact();
  bool include_identity = false;
  std::string target;  // free-form description, e.g. "ghz"
};

/// JSON-lines dataset: one {"pauli": "XZY", "value": -0.42, "shots": 1024}
/// record per line, in worker order, plus a <path>.manifest.json sidecar.
void write_dataset(const std::filesystem::path& path,
                   std::span<const WorkerShard> shards,
                   const DatasetManifest& manifest);

/// Reads a dataset back into shards using the sidecar manifest.
std::vector<WorkerShard> read_dataset(const std::filesystem::path& path,
                                      DatasetManifest* manifest_out = nullptr);

}  // namespace qst
