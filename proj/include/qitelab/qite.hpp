// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Quantum imaginary time evolution: domains, operator bases, the linear
// systems S a = -b for the generator A, and the unitary update loop.

#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qitelab/evolution.hpp"
#include "qitelab/hamiltonians.hpp"
#include "qitelab/local.hpp"
#include "qitelab/operators.hpp"
#include "qitelab/random.hpp"

namespace qitelab {

enum class BasisKind { FullPauli, SinglesDoubles };
enum class DomainRule { Manhattan, NearestSites, MutualInformation };

std::string to_string(BasisKind b);
std::string to_string(DomainRule r);

// Original terms that share one domain, united into a single term.
struct DomainGroup {
  std::vector<int> members;      // indices into ProblemHamiltonian::terms
  std::vector<int> support;      // union of member supports
  std::vector<int> domain;       // sorted sites or spatial orbitals
  std::vector<int> majoranas;    // fermionic: Majorana indices of the domain modes
  SpinOperator spin;             // register operator (JW image when fermionic)
  FermionOperator fermion;       // empty for spin systems
};

struct DomainPlan {
  SystemKind kind = SystemKind::Spin;
  BasisKind basis = BasisKind::FullPauli;
  DomainRule rule = DomainRule::Manhattan;
  int nu = 0;
  int n_sites = 0;
  std::uint64_t seed = 0;
  std::vector<DomainGroup> groups;
  std::vector<int> group_of_term;

  int max_domain() const;
  bool full_domain() const;  // every domain is the whole system
  // "# qitelab domain plan v1" followed by one line per group.
  std::string to_text() const;
};

// Sites within Manhattan distance nu of the support.
std::vector<int> manhattan_domain(const LatticeGraph& g, const std::vector<int>& support, int nu);
// Support plus the nu closest sites; ties at the cut are drawn with rng.
std::vector<int> nearest_sites_domain(const LatticeGraph& g, const std::vector<int>& support, int nu, Rng& rng);
// Support plus the nu orbitals q with the largest max_{p in support} I(p, q);
// ties go to the lower index.
std::vector<int> mutual_information_domain(const Eigen::MatrixXd& mi, const std::vector<int>& support, int nu);

// Lattice systems: Manhattan domains for spins, nearest sites for fermions.
DomainPlan plan_domains(const ProblemHamiltonian& h, int nu, std::uint64_t seed = 0);
// Molecular systems: mutual-information domains.
DomainPlan plan_domains(const ProblemHamiltonian& h, const Eigen::MatrixXd& mutual_information, int nu);

// All 4^|domain| strings on the domain sites, first site most significant,
// letters ordered I, X, Y, Z. Throws std::length_error above cap sites.
std::vector<PauliString> spin_basis(const std::vector<int>& domain, int cap = 7);

// Hermitian generators i(E_pq - E_qp) for p != q and
// i(E_pq E_rs - E_sr E_qp) for p < r, q < s over the domain orbitals;
// operators that vanish are dropped.
std::vector<FermionOperator> fermionic_generators(const std::vector<int>& domain);
std::vector<SpinOperator> fermionic_basis(const std::vector<int>& domain, int n_orbitals);

struct LinearSystem {
  Eigen::MatrixXd s;  // S_IJ = <{s_I, s_J}>
  Eigen::VectorXd b;  // b_I = i <[s_I, h]>
};

// Spin path on the register. Every product s_I s_J and s_I h_t is a single
// Pauli string, so only distinct string expectations are evaluated; their
// number is written to expectation_count.
LinearSystem build_linear_system(const std::vector<PauliString>& basis, const SpinOperator& h, const StateVector& psi,
                                 long* expectation_count = nullptr);
// Generic Hermitian basis on the register.
LinearSystem build_linear_system(const std::vector<SpinOperator>& basis, const SpinOperator& h,
                                 const StateVector& psi);
// Local form: S and b from the reduced density matrix of the domain frame and
// the localized basis and term.
LinearSystem build_linear_system(const std::vector<Eigen::SparseMatrix<cplx>>& basis,
                                 const Eigen::SparseMatrix<cplx>& h, const Eigen::MatrixXcd& rho);

enum class SolverMethod { ConjugateGradient, TruncatedSvd, ClosedForm };
std::string to_string(SolverMethod m);
SolverMethod solver_method_from_string(const std::string& s);

struct SolverConfig {
  SolverMethod method = SolverMethod::ConjugateGradient;
  double tolerance = 1e-10;   // relative residual for CG
  int max_iterations = 0;     // 0 means 10 * dim
  double svd_cutoff = 1e-8;   // relative eigenvalue cutoff
};

struct Solution {
  Eigen::VectorXd a;
  double residual = 0.0;  // ||S a + b||
  int iterations = 0;
  bool fallback = false;  // CG did not converge and the SVD answer is returned
};

// Minimal-norm solution of S a = -b. ClosedForm is not a matrix method and is
// rejected here.
Solution solve_for_a(const LinearSystem& sys, const SolverConfig& cfg = {});

// Minimal-norm Hermitian A with rho A + A rho = i [rho, h]. For the complete
// Pauli basis this is the same least-squares problem as S a = -b, with
// a_I = tr(A s_I) / 2^k. residual is the Frobenius residual of the equation.
Eigen::MatrixXcd closed_form_generator(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& h, double* residual = nullptr);

struct QiteConfig {
  double dtau = 0.1;
  int n_steps = 10;
  SolverConfig solver;
  int basis_cap = 7;        // sites for an explicit full-Pauli system
  int closed_form_cap = 10; // sites for the closed-form path
};

// One row per full second-order step; residual is the largest solver residual
// of the step.
EvolutionResult qite_evolve(const ProblemHamiltonian& h, const DomainPlan& plan, const QiteConfig& cfg,
                            const StateVector& psi, const std::optional<StateVector>& reference = std::nullopt);

// 2 C ln(2 sqrt(2) n m / eps).
double required_manhattan_distance(double c, double n, double m, double eps);
// m n e^{k nu^d}.
double estimate_running_time(double m, double n, double k, double nu, double d);

}  // namespace qitelab
