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

#include <span>

#include "qst/pauli.hpp"
#include "qst/types.hpp"

// Brute-force reference implementations over explicit d x d matrices. These
// exist to validate every matrix-free path at small n; they are capped at
// n <= 8 and make no attempt at being fast.

namespace qst::oracle {

/// Explicit density matrix.
struct DenseState {
  CMatrix rho;
};

/// 1/(2m) * sum_k (Tr(A_k rho) - y_k)^2 with materialized observables.
double dense_objective(std::span<const PauliString> strings,
                       const Eigen::Ref<const RVector>& values,
                       const Eigen::Ref<const CMatrix>& rho);

/// (1/m) * sum_k (Tr(A_k U U^dagger) - y_k) A_k * U, materialized.
CMatrix dense_gradient_factor(std::span<const PauliString> strings,
                              const Eigen::Ref<const RVector>& values,
                              const Eigen::Ref<const CMatrix>& u);

/// Reconstructs rho = (1/d) sum_P Tr(P rho) P from exact expectations over
/// the complete basis of all 4^n strings. Throws std::invalid_argument if the
/// basis is incomplete or contains duplicates.
DenseState pauli_expand(std::span<const PauliString> strings,
                        const Eigen::Ref<const RVector>& values);

}  // namespace qst::oracle
