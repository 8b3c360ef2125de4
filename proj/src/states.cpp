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

#include "qst/states.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "qst/rng.hpp"

namespace qst {

DensityFactor ghz_factor(int num_qubits) {
  if (num_qubits < 1) {
    throw std::invalid_argument("ghz_factor: need at least one qubit");
  }
  const Index d = dim_for_qubits(num_qubits);
  DensityFactor f;
  f.num_qubits = num_qubits;
  f.rank = 1;
  f.entries = CMatrix::Zero(d, 1);
  const double amp = 1.0 / std::sqrt(2.0);
  f.entries(0, 0) = amp;
  f.entries(d - 1, 0) = amp;
  return f;
}

DensityFactor random_state_factor(int num_qubits, int rank, std::uint64_t seed) {
  if (num_qubits < 1) {
    throw std::invalid_argument("random_state_factor: need at least one qubit");
  }
  const Index d = dim_for_qubits(num_qubits);
  if (rank < 1 || rank > d) {
    throw std::invalid_argument("random_state_factor: rank must be in [1, 2^n]");
  }
  Rng rng(seed);
  DensityFactor f;
  f.num_qubits = num_qubits;
  f.rank = rank;
  f.entries.resize(d, rank);
  for (Index c = 0; c < rank; ++c) {
    for (Index r = 0; r < d; ++r) {
      f.entries(r, c) = Complex{rng.next_normal(), rng.next_normal()};
    }
  }
  f.entries /= std::sqrt(f.entries.squaredNorm());
  return f;
}

double recon_error(const Eigen::Ref<const CMatrix>& u,
                   const Eigen::Ref<const CMatrix>& v) {
  if (u.rows() != v.rows()) {
    throw std::invalid_argument("recon_error: row dimensions differ");
  }
  const double err = (u.adjoint() * u).squaredNorm() +
                     (v.adjoint() * v).squaredNorm() -
                     2.0 * (u.adjoint() * v).squaredNorm();
  return std::max(err, 0.0);  // roundoff guard; the exact value is >= 0
}

void save_factor(const std::filesystem::path& path, const DensityFactor& factor) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_factor: cannot open " + path.string());
  }
  const std::uint64_t header[3] = {static_cast<std::uint64_t>(factor.num_qubits),
                                   static_cast<std::uint64_t>(factor.rank),
                                   static_cast<std::uint64_t>(factor.dim())};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (Index r = 0; r < factor.entries.rows(); ++r) {
    for (Index c = 0; c < factor.entries.cols(); ++c) {
      const double re = factor.entries(r, c).real();
      const double im = factor.entries(r, c).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
  if (!out) {
    throw std::runtime_error("save_factor: write failed for " + path.string());
  }
}

DensityFactor load_factor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_factor: cannot open " + path.string());
  }
  std::uint64_t header[3];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) {
    throw std::runtime_error("load_factor: truncated header in " + path.string());
  }
  DensityFactor f;
  f.num_qubits = static_cast<int>(header[0]);
  f.rank = static_cast<int>(header[1]);
  const auto rows = static_cast<Index>(header[2]);
  if (f.num_qubits < 1 || f.rank < 1 || rows != dim_for_qubits(f.num_qubits)) {
    throw std::runtime_error("load_factor: inconsistent header in " + path.string());
  }
  f.entries.resize(rows, f.rank);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < f.rank; ++c) {
      double re = 0.0, im = 0.0;
      in.read(reinterpret_cast<char*>(&re), sizeof(re));
      in.read(reinterpret_cast<char*>(&im), sizeof(im));
      f.entries(r, c) = Complex{re, im};
    }
  }
  if (!in) {
    throw std::runtime_error("load_factor: truncated data in " + path.string());
  }
  return f;
}

}  // namespace qst
