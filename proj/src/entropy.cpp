// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qitelab/diagnostics.hpp"
#include "qitelab/local.hpp"

namespace qitelab {

double fidelity(const StateVector& psi, const StateVector& phi) {
  if (psi.n_qubits != phi.n_qubits) throw std::invalid_argument("fidelity: dimension mismatch");
  const double f = std::norm(inner(psi, phi));
  return std::clamp(f, 0.0, 1.0);
}

Eigen::MatrixXcd orbital_rdm(const StateVector& psi, const std::vector<int>& orbitals) {
  if (orbitals.empty() || orbitals.size() > 2) throw std::invalid_argument("orbital_rdm: subset must have 1 or 2 orbitals");
  if (orbitals.size() == 2 && orbitals[0] == orbitals[1]) throw std::invalid_argument("orbital_rdm: repeated orbital");
  for (int p : orbitals) {
    if (p < 0 || 2 * p + 1 >= psi.n_qubits) throw std::out_of_range("orbital_rdm: orbital out of range");
  }
  return reduced_density_matrix(psi, orbital_frame(orbitals));
}

namespace {

Eigen::VectorXd rdm_spectrum(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double entropy_of(const Eigen::VectorXd& w) {
  double s = 0.0;
  for (double x : w) {
    if (x > 1e-14) s -= x * std::log(x);
  }
  return s;
}

}  // namespace

double von_neumann_entropy(const Eigen::MatrixXcd& rho) { return entropy_of(rdm_spectrum(rho)); }

MutualInfoMatrix mutual_information(const StateVector& psi, int n_orbitals) {
  if (2 * n_orbitals != psi.n_qubits) throw std::invalid_argument("mutual_information: state does not match orbital count");
  MutualInfoMatrix m;
  const int l = n_orbitals;
  m.s1 = Eigen::VectorXd::Zero(l);
  m.s2 = Eigen::MatrixXd::Zero(l, l);
  m.mi = Eigen::MatrixXd::Zero(l, l);
  m.omega = Eigen::MatrixXd::Zero(l, 4);
  for (int i = 0; i < l; ++i) {
    const Eigen::VectorXd w = rdm_spectrum(orbital_rdm(psi, {i}));
    m.omega.row(i) = w.transpose();
    m.s1[i] = entropy_of(w);
    m.s2(i, i) = m.s1[i];
  }
  for (int i = 0; i < l; ++i) {
    for (int j = i + 1; j < l; ++j) {
      const double sij = von_neumann_entropy(orbital_rdm(psi, {i, j}));
      m.s2(i, j) = m.s2(j, i) = sij;
      const double v = std::max(0.0, -0.5 * (sij - m.s1[i] - m.s1[j]));
      m.mi(i, j) = m.mi(j, i) = v;
    }
  }
  return m;
}

double multiref_diagnostic(const StateVector& psi, int n_orbitals) {
  if (2 * n_orbitals != psi.n_qubits) throw std::invalid_argument("multiref_diagnostic: state does not match orbital count");
  double s = 0.0;
  for (int i = 0; i < n_orbitals; ++i) s += von_neumann_entropy(orbital_rdm(psi, {i}));
  return s / (n_orbitals * std::log(4.0));
}

std::string mutual_information_csv(const MutualInfoMatrix& m) {
  std::ostringstream out;
  const auto l = m.mi.rows();
  out << "orbital";
  for (Eigen::Index j = 0; j < l; ++j) out << "," << j;
  out << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < l; ++i) {
    out << i;
    for (Eigen::Index j = 0; j < l; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.12g", m.mi(i, j));
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace qitelab
