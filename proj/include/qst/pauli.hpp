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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qst/types.hpp"

namespace qst {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// An n-qubit Pauli observable, the Kronecker product of one single-qubit
/// Pauli matrix per qubit. Serialized as a string over {I,X,Y,Z}, e.g. "XZY".
///
/// Bit convention: qubit 0 corresponds to the *most significant* bit of the
/// computational-basis index, so "XZ" acts as X on the high bit and Z on the
/// low bit of a 4-dimensional vector.
class PauliString {
 public:
  /// Parses a label such as "XIZY". Throws std::invalid_argument on an empty
  /// label or characters outside {I,X,Y,Z}.
  explicit PauliString(std::string_view label);
  explicit PauliString(std::vector<Pauli> axes);

  int num_qubits() const { return static_cast<int>(axes_.size()); }
  Index dim() const { return Index{1} << num_qubits(); }
  Pauli axis(int qubit) const { return axes_[static_cast<std::size_t>(qubit)]; }
  const std::vector<Pauli>& axes() const { return axes_; }
  bool is_identity() const;
  std::string str() const;

  bool operator==(const PauliString& other) const = default;

 private:
  std::vector<Pauli> axes_;
};

/// Applies the Pauli observable to a state vector without materializing the
/// 2^n x 2^n matrix. Each output amplitude is one input amplitude (index
/// XOR-flipped on the X/Y qubits) times an exact phase: an integer power of i
/// from the Y count and a sign from the parity of the input bits on Y/Z
/// qubits. Cost O(2^n).
CVector apply_pauli(const PauliString& p, const Eigen::Ref<const CVector>& v);

/// In-place variant; `out` is resized to v.size(). Aliasing v is not allowed.
void apply_pauli(const PauliString& p, const Eigen::Ref<const CVector>& v,
                 CVector& out);

/// Tr(A_p UU^dagger) for a d x r factor U, computed column-by-column as
/// sum_c <u_c, A_p u_c> without temporaries. The imaginary part vanishes for
/// Hermitian observables and is discarded (debug builds assert it is below
/// 1e-10 * |U|_F^2).
double expectation(const PauliString& p, const Eigen::Ref<const CMatrix>& factor);

/// (sum_k weights[k] * A_k) * V, matrix-free, cost O(m * 2^n * r).
CMatrix apply_weighted_pauli_sum(std::span<const PauliString> strings,
                                 const Eigen::Ref<const RVector>& weights,
                                 const Eigen::Ref<const CMatrix>& v);

/// Accumulates `weight * (A_p * v)` into `acc`. Building block shared by
/// apply_weighted_pauli_sum and the gradient evaluation.
void accumulate_weighted_pauli(const PauliString& p, double weight,
                               const Eigen::Ref<const CMatrix>& v, CMatrix& acc);

/// Explicit dense matrix of the observable, built as a Kronecker product.
/// Only intended for oracle-scale checks; throws std::invalid_argument when
/// num_qubits exceeds `max_qubits` (default 8, i.e. 256 x 256).
CMatrix dense_pauli(const PauliString& p, int max_qubits = 8);

/// All 4^n Pauli strings over n qubits in lexicographic (I,X,Y,Z) order.
std::vector<PauliString> all_pauli_strings(int num_qubits);

/// Debug fault injection: when enabled, apply_pauli (and everything built on
/// it) corrupts the Y phase sign. Exists so the validation suite's negative
/// control can demonstrate that the oracle comparison actually detects a
/// broken kernel. Never enable outside tests.
void set_pauli_phase_fault(bool enabled);
bool pauli_phase_fault_enabled();

}  // namespace qst
