// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qitelab/operators.hpp"

namespace qitelab {

struct SpectrumConfig {
  int k = 2;                    // number of lowest eigenvalues
  int dense_max_qubits = 10;    // dense eigensolver at or below this size
  std::uint64_t seed = 20240613;
  double tol = 1e-10;           // relative Ritz residual
  int basis_size = 32;          // Krylov vectors kept before a restart
  int max_restarts = 2000;
  // Basis states kept by the solver; the operator must not couple them to the
  // rest. Empty means the whole register.
  std::function<bool(Index)> sector;
};

struct SpectrumResult {
  std::vector<double> energies;  // ascending; Lanczos reports distinct levels
  StateVector ground;
  std::string method;            // "dense" | "lanczos"
  std::vector<double> residuals;
  bool degenerate_ground = false;
  int matvecs = 0;
};

SpectrumResult spectrum(const SpinOperator& h, int n_qubits, const SpectrumConfig& cfg = {});

// |<psi|phi>|^2
double fidelity(const StateVector& psi, const StateVector& phi);

// One- or two-orbital reduced density matrix (4x4 or 16x16) over the
// (alpha, beta) = (2p, 2p+1) mode layout, with fermionic reordering signs.
Eigen::MatrixXcd orbital_rdm(const StateVector& psi, const std::vector<int>& orbitals);

// -sum w ln w over eigenvalues; eigenvalues below 1e-14 contribute 0.
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

struct MutualInfoMatrix {
  Eigen::MatrixXd mi;          // I(i,j) = 1/2 (s_i + s_j - s_ij), zero diagonal
  Eigen::VectorXd s1;          // single-orbital entropies
  Eigen::MatrixXd s2;          // two-orbital entropies (diagonal = s1)
  Eigen::MatrixXd omega;       // L x 4 single-orbital RDM eigenvalues
};

MutualInfoMatrix mutual_information(const StateVector& psi, int n_orbitals);
double multiref_diagnostic(const StateVector& psi, int n_orbitals);

std::string mutual_information_csv(const MutualInfoMatrix& m);

}  // namespace qitelab
