// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Kernels for operators acting on a subset of qubits.
//
// A LocalFrame lists k register qubits in increasing order; local qubit l is
// register qubit sites[l]. Dense local matrices are 2^k x 2^k.
//
// In a fermionic frame the register is read as a Jordan-Wigner encoded Fock
// space. Moving the frame modes in front of all other modes (keeping relative
// order) costs the sign s(x, r) = (-1)^{sum_{d in x} #(occupied rest modes
// below d)}. After that reordering an operator on the frame modes is the plain
// Jordan-Wigner image over k modes, so no parity strings cross the rest of the
// register. Even operators only see s(x,r)s(y,r) with |x| = |y| mod 2.

#pragma once

#include <vector>

#include "qitelab/operators.hpp"

namespace qitelab {

struct LocalFrame {
  std::vector<int> sites;  // strictly increasing register qubits
  bool fermionic = false;

  int size() const { return static_cast<int>(sites.size()); }
  Index mask() const;
  // Register index bit pattern for local index x.
  Index deposit(Index x) const;
};

// Spin frame over arbitrary sites; sorted and deduplicated.
LocalFrame spin_frame(std::vector<int> sites);
// Fermionic frame over the modes (2p, 2p+1) of each spatial orbital p.
LocalFrame orbital_frame(std::vector<int> orbitals);

// Operator on the register -> local operator on frame qubits.
// Spin frame: plain relabelling. Fermionic frame: the operator must be given
// as a FermionOperator on register modes.
SpinOperator localize(const SpinOperator& op, const LocalFrame& frame);
SpinOperator localize(const FermionOperator& op, const LocalFrame& frame);

// rho_{xy} = sum_r s(x,r) s(y,r) psi(x,r) psi*(y,r); <O> = trace(rho O).
Eigen::MatrixXcd reduced_density_matrix(const StateVector& psi, const LocalFrame& frame);

// psi(x',r) <- sum_x s(x',r) M_{x'x} s(x,r) psi(x,r) for every rest pattern r.
void apply_local(StateVector& psi, const LocalFrame& frame, const Eigen::MatrixXcd& m);

// e^{scale M} by scaling and squaring of a Taylor series. Exact zeros of the
// block structure of M stay exact zeros.
Eigen::MatrixXcd expm_taylor(const Eigen::MatrixXcd& m, cplx scale, double tol = 1e-15);

}  // namespace qitelab
