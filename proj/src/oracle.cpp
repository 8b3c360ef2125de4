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

#include "qst/oracle.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace qst::oracle {

namespace {

constexpr int kMaxQubits = 8;

void check_sizes(std::span<const PauliString> strings, Index num_values) {
  if (static_cast<Index>(strings.size()) != num_values) {
    throw std::invalid_argument("oracle: string/value count mismatch");
  }
  for (const auto& p : strings) {
    if (p.num_qubits() > kMaxQubits) {
      throw std::invalid_argument("oracle: capped at " +
                                  std::to_string(kMaxQubits) + " qubits");
    }
  }
}

}  // namespace

double dense_objective(std::span<const PauliString> strings,
                       const Eigen::Ref<const RVector>& values,
                       const Eigen::Ref<const CMatrix>& rho) {
  check_sizes(strings, values.size());
  if (strings.empty()) {
    throw std::invalid_argument("dense_objective: empty dataset");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < strings.size(); ++k) {
    const CMatrix a = dense_pauli(strings[k], kMaxQubits);
    const double residual = (a * rho).trace().real() - values[static_cast<Index>(k)];
    total += residual * residual;
  }
  return total / (2.0 * static_cast<double>(strings.size()));
}

CMatrix dense_gradient_factor(std::span<const PauliString> strings,
                              const Eigen::Ref<const RVector>& values,
                              const Eigen::Ref<const CMatrix>& u) {
  check_sizes(strings, values.size());
  if (strings.empty()) {
    throw std::invalid_argument("dense_gradient_factor: empty dataset");
  }
  const CMatrix rho = u * u.adjoint();
  CMatrix weighted = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t k = 0; k < strings.size(); ++k) {
    const CMatrix a = dense_pauli(strings[k], kMaxQubits);
    const double residual = (a * rho).trace().real() - values[static_cast<Index>(k)];
    weighted += residual * a;
  }
  return (weighted * u) / static_cast<double>(strings.size());
}

DenseState pauli_expand(std::span<const PauliString> strings,
                        const Eigen::Ref<const RVector>& values) {
  check_sizes(strings, values.size());
  if (strings.empty()) {
    throw std::invalid_argument("pauli_expand: empty basis");
  }
  const int n = strings.front().num_qubits();
  const std::size_t expected = std::size_t{1} << (2 * n);
  std::set<std::string> seen;
  for (const auto& p : strings) {
    if (p.num_qubits() != n || !seen.insert(p.str()).second) {
      throw std::invalid_argument("pauli_expand: basis must cover each of the 4^n strings once");
    }
  }
  if (strings.size() != expected) {
    throw std::invalid_argument("pauli_expand: incomplete basis (" +
                                std::to_string(strings.size()) + " of " +
                                std::to_string(expected) + " strings)");
  }
  const Index d = dim_for_qubits(n);
  DenseState state;
  state.rho = CMatrix::Zero(d, d);
  for (std::size_t k = 0; k < strings.size(); ++k) {
    state.rho += values[static_cast<Index>(k)] * dense_pauli(strings[k], kMaxQubits);
  }
  state.rho /= static_cast<double>(d);
  return state;
}

}  // namespace qst::oracle
