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

#include "qst/data.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qst/rng.hpp"

namespace qst {

namespace {

PauliString sample_one_string(int num_qubits, Rng& rng, bool include_identity) {
  std::vector<Pauli> axes(static_cast<std::size_t>(num_qubits));
  while (true) {
    bool all_identity = true;
    for (auto& axis : axes) {
      axis = static_cast<Pauli>(rng.next_below(4));
      if (axis != Pauli::I) all_identity = false;
    }
    if (include_identity || !all_identity) {
      return PauliString(axes);
    }
  }
}

double shot_average(double truth, std::int64_t shots, Rng& rng) {
  const double p_plus = 0.5 * (1.0 + truth);
  std::int64_t plus = 0;
  for (std::int64_t s = 0; s < shots; ++s) {
    if (rng.next_double() < p_plus) ++plus;
  }
  return static_cast<double>(2 * plus - shots) / static_cast<double>(shots);
}

MeasurementRecord measure_with(const PauliString& p, const DensityFactor& target,
                               Shots shots, Rng& rng) {
  const double truth = expectation(p, target);
  if (std::abs(truth) > 1.0 + 1e-9) {
    throw std::invalid_argument(
        "measure: expectation " + std::to_string(truth) +
        " outside [-1, 1]; target state is not normalized");
  }
  MeasurementRecord record{p, truth, shots};
  if (!shots.is_exact()) {
    record.value = shot_average(std::clamp(truth, -1.0, 1.0), shots.count(), rng);
  }
  return record;
}

}  // namespace

Shots Shots::finite(std::int64_t count) {
  if (count < 1) {
    throw std::invalid_argument("Shots: count must be positive");
  }
  return Shots(count);
}

std::int64_t Shots::count() const {
  if (is_exact()) {
    throw std::logic_error("Shots: exact budget has no count");
  }
  return count_;
}

Shots Shots::parse(const std::string& text) {
  if (text == "exact") return exact();
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("Shots: cannot parse '" + text + "'");
  }
  if (used != text.size() || value < 1) {
    throw std::invalid_argument("Shots: cannot parse '" + text + "'");
  }
  return finite(value);
}

std::string Shots::str() const {
  return is_exact() ? "exact" : std::to_string(count_);
}

std::vector<PauliString> sample_pauli_strings(int num_qubits, int count,
                                              std::uint64_t seed,
                                              bool include_identity) {
  if (num_qubits < 1 || count < 1) {
    throw std::invalid_argument("sample_pauli_strings: need n >= 1 and m >= 1");
  }
  Rng rng(seed);
  std::vector<PauliString> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    out.push_back(sample_one_string(num_qubits, rng, include_identity));
  }
  return out;
}

MeasurementRecord measure(const PauliString& p, const DensityFactor& target,
                          Shots shots, std::uint64_t seed) {
  Rng rng(seed);
  return measure_with(p, target, shots, rng);
}

std::vector<WorkerShard> build_shards(int num_qubits, int machines,
                                      int m_per_worker, Shots shots,
                                      std::uint64_t seed,
                                      const DensityFactor& target,
                                      bool include_identity) {
  if (machines < 1 || m_per_worker < 1) {
    throw std::invalid_argument("build_shards: need M >= 1 and m_per_worker >= 1");
  }
  if (target.dim() != dim_for_qubits(num_qubits)) {
    throw std::invalid_argument("build_shards: target dimension mismatch");
  }
  std::vector<WorkerShard> shards;
  shards.reserve(static_cast<std::size_t>(machines));
  for (int i = 0; i < machines; ++i) {
    WorkerShard shard;
    shard.worker_id = i;
    shard.rng_seed = shard_seed(seed, static_cast<std::uint64_t>(i));
    Rng rng(shard.rng_seed);
    shard.records.reserve(static_cast<std::size_t>(m_per_worker));
    for (int k = 0; k < m_per_worker; ++k) {
      const PauliString p = sample_one_string(num_qubits, rng, include_identity);
      shard.records.push_back(measure_with(p, target, shots, rng));
    }
    shards.push_back(std::move(shard));
  }
  return shards;
}

std::vector<MeasurementRecord> pool_records(std::span<const WorkerShard> shards) {
  std::vector<MeasurementRecord> pooled;
  std::size_t total = 0;
  for (const auto& shard : shards) total += shard.records.size();
  pooled.reserve(total);
  for (const auto& shard : shards) {
    pooled.insert(pooled.end(), shard.records.begin(), shard.records.end());
  }
  return pooled;
}

void write_dataset(const std::filesystem::path& path,
                   std::span<const WorkerShard> shards,
                   const DatasetManifest& manifest) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_dataset: cannot open " + path.string());
  }
  for (const auto& shard : shards) {
    for (const auto& record : shard.records) {
      nlohmann::json line;
      line["pauli"] = record.pauli.str();
      line["value"] = record.value;
      if (record.shots.is_exact()) {
        line["shots"] = "exact";
      } else {
        line["shots"] = record.shots.count();
      }
      out << line.dump() << '\n';
    }
  }
  if (!out) {
    throw std::runtime_error("write_dataset: write failed for " + path.string());
  }

  nlohmann::json side;
  side["n"] = manifest.num_qubits;
  side["machines"] = manifest.machines;
  side["m_per_worker"] = manifest.m_per_worker;
  side["seed"] = manifest.seed;
  side["shots"] = manifest.shots.str();
  side["include_identity"] = manifest.include_identity;
  side["target"] = manifest.target;
  std::ofstream sidecar(path.string() + ".manifest.json");
  sidecar << side.dump(2) << '\n';
  if (!sidecar) {
    throw std::runtime_error("write_dataset: manifest write failed");
  }
}

std::vector<WorkerShard> read_dataset(const std::filesystem::path& path,
                                      DatasetManifest* manifest_out) {
  std::ifstream sidecar(path.string() + ".manifest.json");
  if (!sidecar) {
    throw std::runtime_error("read_dataset: missing manifest for " + path.string());
  }
  nlohmann::json side = nlohmann::json::parse(sidecar);
  DatasetManifest manifest;
  manifest.num_qubits = side.at("n").get<int>();
  manifest.machines = side.at("machines").get<int>();
  manifest.m_per_worker = side.at("m_per_worker").get<int>();
  manifest.seed = side.at("seed").get<std::uint64_t>();
  manifest.shots = Shots::parse(side.at("shots").get<std::string>());
  manifest.include_identity = side.at("include_identity").get<bool>();
  manifest.target = side.at("target").get<std::string>();

  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_dataset: cannot open " + path.string());
  }
  std::vector<MeasurementRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    Shots shots = j.at("shots").is_string()
                      ? Shots::parse(j.at("shots").get<std::string>())
                      : Shots::finite(j.at("shots").get<std::int64_t>());
    records.push_back(MeasurementRecord{PauliString(j.at("pauli").get<std::string>()),
                                        j.at("value").get<double>(), shots});
  }
  const auto expected = static_cast<std::size_t>(manifest.machines) *
                        static_cast<std::size_t>(manifest.m_per_worker);
  if (records.size() != expected) {
    throw std::runtime_error("read_dataset: record count does not match manifest");
  }
  std::vector<WorkerShard> shards(static_cast<std::size_t>(manifest.machines));
  auto it = records.begin();
  for (int i = 0; i < manifest.machines; ++i) {
    shards[static_cast<std::size_t>(i)].worker_id = i;
    shards[static_cast<std::size_t>(i)].rng_seed =
        shard_seed(manifest.seed, static_cast<std::uint64_t>(i));
    shards[static_cast<std::size_t>(i)].records.assign(it, it + manifest.m_per_worker);
    it += manifest.m_per_worker;
  }
  if (manifest_out != nullptr) *manifest_out = manifest;
  return shards;
}

}  // namespace qst
