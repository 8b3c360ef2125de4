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
#include <functional>

#include "qst/types.hpp"

namespace qst {

/// Result of aligning V to U over the unitary group: rotation is the r x r
/// unitary R* minimizing |U - V R|_F, and distance_sq that minimum squared.
struct AlignmentResult {
  double distance_sq = 0.0;
  CMatrix rotation;
};

/// Rotation-invariant distance between two d x r factors.
///
/// Computes C = V^dagger U and its SVD C = W S Z^dagger; the minimizer is
/// R* = W Z^dagger and the closed form
///   distance_sq = |U|_F^2 + |V|_F^2 - 2 * sum_i sigma_i(C).
/// Cost O(d r^2 + r^3); never touches d x d space.
AlignmentResult procrustes_align(const Eigen::Ref<const CMatrix>& u,
                                 const Eigen::Ref<const CMatrix>& v);

/// Just the squared distance.
double procrustes_distance_sq(const Eigen::Ref<const CMatrix>& u,
                              const Eigen::Ref<const CMatrix>& v);

/// Best rank-r PSD factor of a Hermitian matrix S: take the r algebraically
/// largest eigenvalues (descending), clamp negatives to zero, and return
/// V_r * diag(sqrt(lambda_i)). Ties keep the solver's eigenvector order; each
/// column's phase is fixed so its largest-magnitude entry is real nonnegative,
/// making the output deterministic.
///
/// Throws std::invalid_argument when |S - S^dagger|_max exceeds
/// 1e-9 * max(1, |S|_max).
CMatrix top_psd_factor(const Eigen::Ref<const CMatrix>& hermitian, int rank);

/// Matrix-free variant for dimensions where a dense eigensolve is not wanted:
/// shifted power iteration with Gram-Schmidt deflation. `apply` must implement
/// v -> S v for a Hermitian S with operator norm <= op_norm_bound (the shift
/// S + bound*I makes the algebraically largest eigenvalue dominant). Same
/// clamping and phase-fixing as the dense path.
using HermitianApply = std::function<CVector(const Eigen::Ref<const CVector>&)>;
CMatrix top_psd_factor(const HermitianApply& apply, Index dim, int rank,
                       double op_norm_bound, int max_iterations = 2000,
                       double tolerance = 1e-12);

/// U^dagger U (r x r, Hermitian PSD).
CMatrix gram(const Eigen::Ref<const CMatrix>& u);

}  // namespace qst
