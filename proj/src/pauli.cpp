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

#include "qst/pauli.hpp"

#include <atomic>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace qst {

namespace {

std::atomic<bool> g_phase_fault{false};

// Bit masks driving the O(d) application loop. For input index k the output
// index is k ^ flip, and the amplitude picks up i^i_power * (-1)^popcount(k & sign):
//   X on qubit q:  flip bit q
//   Y on qubit q:  flip bit q, sign bit q, one factor of i
//   Z on qubit q:  sign bit q
// Qubit q lives at bit position (n-1-q), i.e. qubit 0 is the MSB.
struct PauliMasks {
  std::uint64_t flip = 0;
  std::uint64_t sign = 0;
  int i_power = 0;  // number of Y axes mod 4
};

PauliMasks compile_masks(const PauliString& p) {
  PauliMasks m;
  const int n = p.num_qubits();
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    switch (p.axis(q)) {
      case Pauli::I:
        break;
      case Pauli::X:
        m.flip |= bit;
        break;
      case Pauli::Y:
        m.flip |= bit;
        m.sign |= bit;
        m.i_power = (m.i_power + 1) & 3;
        break;
      case Pauli::Z:
        m.sign |= bit;
        break;
    }
  }
  if (g_phase_fault.load(std::memory_order_relaxed) && m.i_power != 0) {
    m.i_power = (m.i_power + 2) & 3;  // injected sign error on Y phases
  }
  return m;
}

constexpr Complex kIPowers[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

inline double parity_sign(std::uint64_t bits) {
  return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

void check_dim(const PauliString& p, Index v_size) {
  if (v_size != p.dim()) {
    throw std::invalid_argument("apply_pauli: vector length " +
                                std::to_string(v_size) + " does not match 2^" +
                                std::to_string(p.num_qubits()));
  }
}

}  // namespace

PauliString::PauliString(std::string_view label) {
  if (label.empty()) {
    throw std::invalid_argument("PauliString: empty label");
  }
  axes_.reserve(label.size());
  for (char c : label) {
    switch (c) {
      case 'I': axes_.push_back(Pauli::I); break;
      case 'X': axes_.push_back(Pauli::X); break;
      case 'Y': axes_.push_back(Pauli::Y); break;
      case 'Z': axes_.push_back(Pauli::Z); break;
      default:
        throw std::invalid_argument(std::string("PauliString: bad axis '") + c +
                                    "', expected one of I,X,Y,Z");
    }
  }
}

PauliString::PauliString(std::vector<Pauli> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) {
    throw std::invalid_argument("PauliString: empty axis list");
  }
}

bool PauliString::is_identity() const {
  for (Pauli a : axes_) {
    if (a != Pauli::I) return false;
  }
  return true;
}

std::string PauliString::str() const {
  static constexpr char kNames[4] = {'I', 'X', 'Y', 'Z'};
  std::string out;
  out.reserve(axes_.size());
  for (Pauli a : axes_) {
    out.push_back(kNames[static_cast<int>(a)]);
  }
  return out;
}

void apply_pauli(const PauliString& p, const Eigen::Ref<const CVector>& v,
                 CVector& out) {
  check_dim(p, v.size());
  const PauliMasks m = compile_masks(p);
  const Complex phase = kIPowers[m.i_power];
  const Index d = v.size();
  out.resize(d);
  for (Index k = 0; k < d; ++k) {
    const auto bits = static_cast<std::uint64_t>(k);
    out[static_cast<Index>(bits ^ m.flip)] =
        v[k] * (phase * parity_sign(bits & m.sign));
  }
}

CVector apply_pauli(const PauliString& p, const Eigen::Ref<const CVector>& v) {
  CVector out;
  apply_pauli(p, v, out);
  return out;
}

double expectation(const PauliString& p, const Eigen::Ref<const CMatrix>& factor) {
  check_dim(p, factor.rows());
  const PauliMasks m = compile_masks(p);
  const Complex phase = kIPowers[m.i_power];
  const Index d = factor.rows();
  Complex total{0.0, 0.0};
  for (Index c = 0; c < factor.cols(); ++c) {
    // <u_c, A u_c> with (A u)(j) = phase * (-1)^popcount((j^flip) & sign) * u(j^flip)
    Complex acc{0.0, 0.0};
    for (Index j = 0; j < d; ++j) {
      const std::uint64_t src = static_cast<std::uint64_t>(j) ^ m.flip;
      acc += std::conj(factor(j, c)) * factor(static_cast<Index>(src), c) *
             parity_sign(src & m.sign);
    }
    total += phase * acc;
  }
  assert(std::abs(total.imag()) <= 1e-10 * std::max(1.0, factor.squaredNorm()));
  return total.real();
}

void accumulate_weighted_pauli(const PauliString& p, double weight,
                               const Eigen::Ref<const CMatrix>& v, CMatrix& acc) {
  check_dim(p, v.rows());
  const PauliMasks m = compile_masks(p);
  const Complex scale = kIPowers[m.i_power] * weight;
  const Index d = v.rows();
  for (Index c = 0; c < v.cols(); ++c) {
    for (Index k = 0; k < d; ++k) {
      const auto bits = static_cast<std::uint64_t>(k);
      acc(static_cast<Index>(bits ^ m.flip), c) +=
          v(k, c) * (scale * parity_sign(bits & m.sign));
    }
  }
}

CMatrix apply_weighted_pauli_sum(std::span<const PauliString> strings,
                                 const Eigen::Ref<const RVector>& weights,
                                 const Eigen::Ref<const CMatrix>& v) {
  if (static_cast<Index>(strings.size()) != weights.size()) {
    throw std::invalid_argument("apply_weighted_pauli_sum: " +
                                std::to_string(strings.size()) + " strings vs " +
                                std::to_string(weights.size()) + " weights");
  }
  CMatrix acc = CMatrix::Zero(v.rows(), v.cols());
  for (std::size_t k = 0; k < strings.size(); ++k) {
    accumulate_weighted_pauli(strings[k], weights[static_cast<Index>(k)], v, acc);
  }
  return acc;
}

CMatrix dense_pauli(const PauliString& p, int max_qubits) {
  if (p.num_qubits() > max_qubits) {
    throw std::invalid_argument("dense_pauli: " + std::to_string(p.num_qubits()) +
                                " qubits exceeds cap of " +
                                std::to_string(max_qubits));
  }
  static const Complex i{0.0, 1.0};
  CMatrix single(2, 2);
  CMatrix out = CMatrix::Ones(1, 1);
  for (int q = 0; q < p.num_qubits(); ++q) {
    switch (p.axis(q)) {
      case Pauli::I: single << 1, 0, 0, 1; break;
      case Pauli::X: single << 0, 1, 1, 0; break;
      case Pauli::Y: single << 0, -i, i, 0; break;
      case Pauli::Z: single << 1, 0, 0, -1; break;
    }
    CMatrix next(out.rows() * 2, out.cols() * 2);
    for (Index r = 0; r < out.rows(); ++r) {
      for (Index c = 0; c < out.cols(); ++c) {
        next.block(2 * r, 2 * c, 2, 2) = out(r, c) * single;
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<PauliString> all_pauli_strings(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 16) {
    throw std::invalid_argument("all_pauli_strings: unsupported qubit count");
  }
  const std::uint64_t total = std::uint64_t{1} << (2 * num_qubits);
  std::vector<PauliString> out;
  out.reserve(total);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<Pauli> axes(static_cast<std::size_t>(num_qubits));
    std::uint64_t rest = code;
    for (int q = num_qubits - 1; q >= 0; --q) {
      axes[static_cast<std::size_t>(q)] = static_cast<Pauli>(rest & 3);
      rest >>= 2;
    }
    out.emplace_back(std::move(axes));
  }
  return out;
}

void set_pauli_phase_fault(bool enabled) {
  g_phase_fault.store(enabled, std::memory_order_relaxed);
}

bool pauli_phase_fault_enabled() {
  return g_phase_fault.load(std::memory_order_relaxed);
}

}  // namespace qst
