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

#include "qst/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qst/rng.hpp"

namespace qst {

namespace {

// Multiplies each column by a unit phase so its largest-magnitude entry (first
// one on ties) becomes real nonnegative. Zero columns are left alone.
void fix_column_phases(CMatrix& m) {
  for (Index c = 0; c < m.cols(); ++c) {
    Index best = 0;
    double best_mag = 0.0;
    for (Index r = 0; r < m.rows(); ++r) {
      const double mag = std::abs(m(r, c));
      if (mag > best_mag) {
        best_mag = mag;
        best = r;
      }
    }
    if (best_mag > 0.0) {
      m.col(c) *= std::conj(m(best, c)) / best_mag;
    }
  }
}

CMatrix scale_and_fix(CMatrix vectors, RVector values) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    vectors.col(c) *= std::sqrt(std::max(values[c], 0.0));
  }
  fix_column_phases(vectors);
  return vectors;
}

}  // namespace

AlignmentResult procrustes_align(const Eigen::Ref<const CMatrix>& u,
                                 const Eigen::Ref<const CMatrix>& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw std::invalid_argument("procrustes_align: shapes differ");
  }
  const CMatrix c = v.adjoint() * u;
  Eigen::JacobiSVD<CMatrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  AlignmentResult result;
  result.rotation = svd.matrixU() * svd.matrixV().adjoint();
  result.distance_sq = std::max(
      0.0, u.squaredNorm() + v.squaredNorm() - 2.0 * svd.singularValues().sum());
  return result;
}

double procrustes_distance_sq(const Eigen::Ref<const CMatrix>& u,
                              const Eigen::Ref<const CMatrix>& v) {
  return procrustes_align(u, v).distance_sq;
}

CMatrix top_psd_factor(const Eigen::Ref<const CMatrix>& hermitian, int rank) {
  if (rank < 1 || rank > hermitian.rows()) {
    throw std::invalid_argument("top_psd_factor: rank out of range");
  }
  if (hermitian.rows() != hermitian.cols()) {
    throw std::invalid_argument("top_psd_factor: matrix not square");
  }
  const double asym = (hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, hermitian.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("top_psd_factor: input not Hermitian");
  }
  const CMatrix sym = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("top_psd_factor: eigendecomposition failed");
  }
  // Eigen returns ascending eigenvalues; take the last `rank`, descending.
  const Index d = sym.rows();
  CMatrix vectors(d, rank);
  RVector values(rank);
  for (int j = 0; j < rank; ++j) {
    const Index src = d - 1 - j;
    vectors.col(j) = solver.eigenvectors().col(src);
    values[j] = solver.eigenvalues()[src];
  }
  return scale_and_fix(std::move(vectors), std::move(values));
}

CMatrix top_psd_factor(const HermitianApply& apply, Index dim, int rank,
                       double op_norm_bound, int max_iterations,
                       double tolerance) {
  if (rank < 1 || rank > dim) {
    throw std::invalid_argument("top_psd_factor: rank out of range");
  }
  if (!(op_norm_bound >= 0.0)) {
    throw std::invalid_argument("top_psd_factor: bad operator norm bound");
  }
  // Shifted operator B = S + bound*I is PSD, so its dominant eigenvalue is the
  // algebraically largest of S plus the shift; deflation peels off the rest.
  Rng rng(0x746f7072ull);
  CMatrix vectors(dim, rank);
  RVector values(rank);
  for (int j = 0; j < rank; ++j) {
    CVector v(dim);
    for (Index k = 0; k < dim; ++k) {
      v[k] = Complex{rng.next_normal(), rng.next_normal()};
    }
    for (int prev = 0; prev < j; ++prev) {
      v -= vectors.col(prev) * (vectors.col(prev).dot(v));
    }
    v.normalize();
    double lambda_shifted = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
      CVector w = apply(v) + op_norm_bound * v;
      for (int prev = 0; prev < j; ++prev) {
        w -= vectors.col(prev) * (vectors.col(prev).dot(w));
      }
      lambda_shifted = std::real(v.dot(w));
      const double residual = (w - lambda_shifted * v).norm();
      const double norm = w.norm();
      if (norm == 0.0) {
        // Deflated operator annihilates v; remaining spectrum is -bound.
        lambda_shifted = 0.0;
        break;
      }
      v = w / norm;
      if (residual <= tolerance * std::max(1.0, std::abs(lambda_shifted))) {
        break;
      }
    }
    vectors.col(j) = v;
    values[j] = lambda_shifted - op_norm_bound;
  }
  return scale_and_fix(std::move(vectors), std::move(values));
}

CMatrix gram(const Eigen::Ref<const CMatrix>& u) {
  return u.adjoint() * u;
}

}  // namespace qst
