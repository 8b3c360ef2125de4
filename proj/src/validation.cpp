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

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "qst/experiment.hpp"
#include "qst/linalg.hpp"
#include "qst/oracle.hpp"
#include "qst/rng.hpp"

namespace qst {

namespace {

CMatrix random_complex(Index rows, Index cols, Rng& rng) {
  CMatrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      m(r, c) = Complex{rng.next_normal(), rng.next_normal()};
    }
  }
  return m;
}

CMatrix random_unitary(Index size, Rng& rng) {
  const CMatrix a = random_complex(size, size, rng);
  Eigen::HouseholderQR<CMatrix> qr(a);
  return CMatrix(qr.householderQ()) * CMatrix::Identity(size, size);
}

std::vector<PauliString> random_strings(int n, int count, Rng& rng) {
  std::vector<PauliString> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    std::vector<Pauli> axes(static_cast<std::size_t>(n));
    for (auto& axis : axes) axis = static_cast<Pauli>(rng.next_below(4));
    out.emplace_back(std::move(axes));
  }
  return out;
}

CheckResult oracle_agreement_check(int n, int cases, Rng& rng) {
  CheckResult check;
  check.name = "oracle_agreement_n" + std::to_string(n);
  const Index d = dim_for_qubits(n);
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    const int m = 4 + static_cast<int>(rng.next_below(12));
    const int r = 1 + static_cast<int>(rng.next_below(2));
    const auto strings = random_strings(n, m, rng);
    const CMatrix u = random_complex(d, r, rng);
    const CVector v = random_complex(d, 1, rng);
    RVector values(m), weights(m);
    for (int k = 0; k < m; ++k) {
      values[k] = 2.0 * rng.next_double() - 1.0;
      weights[k] = 2.0 * rng.next_double() - 1.0;
    }

    // Single-operator application and expectation against the dense matrix.
    const CMatrix dense = dense_pauli(strings.front());
    worst = std::max(worst,
                     (apply_pauli(strings.front(), v) - dense * v).norm());
    const CMatrix rho = u * u.adjoint();
    worst = std::max(worst, std::abs(expectation(strings.front(), u) -
                                     (dense * rho).trace().real()));

    // Weighted sum applied to a block.
    CMatrix dense_sum = CMatrix::Zero(d, d);
    for (int k = 0; k < m; ++k) {
      dense_sum += weights[k] * dense_pauli(strings[static_cast<std::size_t>(k)]);
    }
    worst = std::max(worst, (apply_weighted_pauli_sum(strings, weights, u) -
                             dense_sum * u)
                                .norm());

    // Objective and full-batch gradient through the record interface.
    std::vector<MeasurementRecord> records;
    records.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      records.push_back(MeasurementRecord{strings[static_cast<std::size_t>(k)],
                                          values[k], Shots::exact()});
    }
    worst = std::max(worst, std::abs(objective(records, u) -
                                     oracle::dense_objective(strings, values, rho)));
    worst = std::max(
        worst, (batch_gradient(records, u) -
                oracle::dense_gradient_factor(strings, values, u))
                   .cwiseAbs()
                   .maxCoeff());
  }
  check.max_error = worst;
  check.pass = worst <= 1e-10;
  check.detail = std::to_string(cases) + " randomized cases";
  return check;
}

CheckResult gradient_check(Rng& rng) {
  CheckResult check;
  check.name = "gradient_finite_difference";
  const int n = 3;
  const Index d = dim_for_qubits(n);
  const double step = 1e-5;
  double worst = 0.0;
  for (int r = 1; r <= 2; ++r) {
    for (int point = 0; point < 5; ++point) {
      const auto strings = random_strings(n, 10, rng);
      std::vector<MeasurementRecord> records;
      for (const auto& s : strings) {
        records.push_back(
            MeasurementRecord{s, 2.0 * rng.next_double() - 1.0, Shots::exact()});
      }
      const CMatrix u = random_complex(d, r, rng);
      const CMatrix g = batch_gradient(records, u);
      for (int dir = 0; dir < 10; ++dir) {
        const CMatrix delta = random_complex(d, r, rng);
        const double analytic = 2.0 * (g.conjugate().cwiseProduct(delta)).sum().real();
        const double numeric = (objective(records, CMatrix(u + step * delta)) -
                                objective(records, CMatrix(u - step * delta))) /
                               (2.0 * step);
        const double rel = std::abs(numeric - analytic) /
                           (1.0 + std::abs(analytic));
        worst = std::max(worst, rel);
      }
    }
  }
  check.max_error = worst;
  check.pass = worst <= 1e-5;
  check.detail = "central differences, n=3, r in {1,2}";
  return check;
}

CheckResult procrustes_invariance_check(Rng& rng) {
  CheckResult check;
  check.name = "procrustes_rotation_invariance";
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const Index d = 8;
    const Index r = 1 + static_cast<Index>(rng.next_below(3));
    const CMatrix u = random_complex(d, r, rng);
    const CMatrix q = random_unitary(r, rng);
    worst = std::max(worst, procrustes_distance_sq(u, CMatrix(u * q)));

    // Closed form vs an explicit evaluation at the returned rotation.
    const CMatrix v = random_complex(d, r, rng);
    const AlignmentResult align = procrustes_align(u, v);
    const double explicit_d2 = (u - v * align.rotation).squaredNorm();
    worst = std::max(worst, std::abs(align.distance_sq - explicit_d2));
  }
  check.max_error = worst;
  check.pass = worst <= 1e-10;
  check.detail = "50 random factors, unitary gauge and closed form";
  return check;
}

CheckResult procrustes_phase_grid_check(Rng& rng) {
  CheckResult check;
  check.name = "procrustes_r1_phase_grid";
  double worst = 0.0;
  for (int c = 0; c < 5; ++c) {
    const CVector u = random_complex(16, 1, rng);
    const CVector v = random_complex(16, 1, rng);
    const double closed = procrustes_distance_sq(u, v);
    double brute = std::numeric_limits<double>::infinity();
    const int grid = 10000;
    for (int k = 0; k < grid; ++k) {
      const double angle = 2.0 * 3.14159265358979323846 * k / grid;
      const Complex phase{std::cos(angle), std::sin(angle)};
      brute = std::min(brute, (u - phase * v).squaredNorm());
    }
    worst = std::max(worst, std::abs(closed - brute));
  }
  check.max_error = worst;
  check.pass = worst <= 1e-6;
  check.detail = "10^4-point phase grid, r = 1";
  return check;
}

CheckResult schedule_check() {
  CheckResult check;
  check.name = "step_and_sync_schedules";
  double worst = 0.0;
  const double alpha = 0.7;
  const StepSchedule dim = StepSchedule::diminishing(alpha);
  worst = std::max(worst, std::abs(dim.at(0) - 1.0 / alpha));
  worst = std::max(worst, std::abs(dim.at(1) - 2.0 / (3.0 * alpha)));
  const StepSchedule con = StepSchedule::constant(1.0);
  for (long t = 0; t < 100; ++t) {
    worst = std::max(worst, std::abs(con.at(t) - 1.0));
    if (dim.at(t + 1) >= dim.at(t)) worst = std::max(worst, 1.0);
  }
  // Averaging-event bookkeeping: floor(T/h) trace rows on a tiny run.
  const DensityFactor target = ghz_factor(2);
  const auto shards = build_shards(2, 2, 24, Shots::exact(), 7u, target);
  RunConfig config;
  config.num_qubits = 2;
  config.rank = 1;
  config.machines = 2;
  config.local_steps = 3;
  config.batch = 8;
  config.total_steps = 14;  // 4 full rounds + partial tail
  config.rounds = 0;
  config.schedule = StepSchedule::constant(0.1);
  config.seed = 7u;
  const RunResult run = run_local_sfgd(config, shards, target);
  if (run.trace.rows.size() != 4) worst = std::max(worst, 1.0);
  check.max_error = worst;
  check.pass = worst <= 1e-12;
  check.detail = "eta_0 = 1/alpha, eta_1 = 2/(3 alpha), floor(T/h) sync rounds";
  return check;
}

}  // namespace

ValidationReport run_validation(const std::string& suite) {
  const bool all = suite == "all" || suite.empty();
  ValidationReport report;
  Rng rng(0x76616c69ull);
  if (all || suite == "oracle") {
    for (int n = 1; n <= 4; ++n) {
      report.checks.push_back(oracle_agreement_check(n, 40, rng));
    }
  }
  if (all || suite == "gradient") {
    report.checks.push_back(gradient_check(rng));
  }
  if (all || suite == "procrustes") {
    report.checks.push_back(procrustes_invariance_check(rng));
    report.checks.push_back(procrustes_phase_grid_check(rng));
  }
  if (all || suite == "schedule") {
    report.checks.push_back(schedule_check());
  }
  if (report.checks.empty()) {
    throw std::invalid_argument(
        "run_validation: unknown suite '" + suite +
        "' (expected all, oracle, gradient, procrustes or schedule)");
  }
  return report;
}

void print_report(std::ostream& out, const ValidationReport& report) {
  for (const auto& check : report.checks) {
    char err[32];
    std::snprintf(err, sizeof(err), "%.3e", check.max_error);
    out << (check.pass ? "PASS" : "FAIL") << "  " << check.name
        << "  max_error=" << err << "  (" << check.detail << ")\n";
  }
  out << (report.all_pass() ? "validation: all checks passed"
                            : "validation: FAILURES present")
      << "\n";
}

}  // namespace qst
