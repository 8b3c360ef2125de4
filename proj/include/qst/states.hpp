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

#include "qst/pauli.hpp"
#include "qst/types.hpp"

namespace qst {

/// Low-rank factor U of a density matrix rho = U U^dagger. Keeping only the
/// d x r factor keeps memory O(d*r); the full d x d matrix is materialized
/// nowhere outside the dense oracle.
struct DensityFactor {
  CMatrix entries;  // d x r
  int num_qubits = 0;
  int rank = 0;

  Index dim() const { return entries.rows(); }
  /// Tr(U U^dagger) = |U|_F^2.
  double trace() const { return entries.squaredNorm(); }
};

/// Rank-1 factor of the n-qubit GHZ state (|0...0> + |1...1>)/sqrt(2):
/// amplitude 1/sqrt(2) at basis indices 0 and 2^n - 1.
DensityFactor ghz_factor(int num_qubits);

/// Random rank-r target: entries i.i.d. complex standard normal, rescaled so
/// Tr(UU^dagger) = 1. Deterministic given the seed.
DensityFactor random_state_factor(int num_qubits, int rank, std::uint64_t seed);

/// |UU^dagger - VV^dagger|_F^2 evaluated factor-side as
/// |U^dagger U|_F^2 + |V^dagger V|_F^2 - 2 |U^dagger V|_F^2,
/// so no d x d matrix is ever formed. Ranks may differ.
double recon_error(const Eigen::Ref<const CMatrix>& u,
                   const Eigen::Ref<const CMatrix>& v);

inline double recon_error(const DensityFactor& a, const DensityFactor& b) {
  return recon_error(a.entries, b.entries);
}

inline double expectation(const PauliString& p, const DensityFactor& factor) {
  return expectation(p, factor.entries);
}

/// Binary factor file: three little-endian u64 (num_qubits, rank, rows)
/// followed by row-major (re, im) pairs as 64-bit floats.
void save_factor(const std::filesystem::path& path, const DensityFactor& factor);
DensityFactor load_factor(const std::filesystem::path& path);

}  // namespace qst
