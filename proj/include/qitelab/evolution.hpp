// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exact and second-order trotterized imaginary time evolution.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qitelab/hamiltonians.hpp"
#include "qitelab/operators.hpp"

namespace qitelab {

struct TraceRow {
  double tau = 0.0;
  double energy = 0.0;
  std::optional<double> fidelity;
  std::optional<double> c_norm;    // normalization of the last step
  std::optional<double> residual;  // linear-solver residual (QITE)
};

class EvolutionTrace {
 public:
  // Throws unless tau increases strictly, the energy is finite and the
  // fidelity lies in [0, 1 + 1e-12].
  void add(const TraceRow& row);
  const std::vector<TraceRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  const TraceRow& back() const { return rows_.back(); }
  // "# qitelab trace v1", then tau,energy,fidelity,c_norm,residual.
  std::string to_csv() const;

 private:
  std::vector<TraceRow> rows_;
};

struct EvolutionResult {
  EvolutionTrace trace;
  StateVector state;
};

struct ExactIteConfig {
  double record_every = 0.1;    // imaginary-time stride between rows
  int dense_max_qubits = 12;    // eigendecomposition at or below this size
  int krylov_dim = 30;          // Lanczos vectors per short step
  double krylov_tol = 1e-12;    // per-step error estimate
};

// e^{-tau H} psi / ||.|| sampled every record_every up to tau_max.
EvolutionResult exact_ite(const SpinOperator& h, const StateVector& psi, double tau_max,
                          const std::optional<StateVector>& reference = std::nullopt,
                          const ExactIteConfig& cfg = {});

// Applies e^{-dtau * fraction * h[term]} for each schedule entry with a
// renormalization after every substep; one row per full step.
EvolutionResult trotterized_ite(const ProblemHamiltonian& h, const TrotterSchedule& schedule, const StateVector& psi,
                                const std::optional<StateVector>& reference = std::nullopt);

// (1/gap) log(1/(gamma_init * eta)); a planning heuristic.
double estimate_tau_eta(double gap, double gamma_init, double eta);

}  // namespace qitelab
