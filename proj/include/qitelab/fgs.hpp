// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Fermionic Gaussian states (FGS): covariance matrices, Pfaffians, Wick
// expectation values, generalized Hartree-Fock (GHF) minimization and
// statevector synthesis.
//
// Covariance convention: Gamma_kl = i <a_k a_l> for k != l, Majoranas in the
// interleaved order of operators.hpp. The vacuum has 2x2 blocks
// [[0, -1], [1, 0]] and the occupation |1> of one mode flips that block.
// Parity <prod_p Z_p> = (-1)^L Pf(Gamma), so the vacuum is even.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qitelab/operators.hpp"

namespace qitelab {

class Rng;

// Jordan-Wigner image of Majorana a_k: Z_0 ... Z_{p-1} X_p (k = 2p) or
// Z_0 ... Z_{p-1} Y_p (k = 2p + 1).
PauliString majorana_string(int k);

// Pfaffian of an even-dimensional antisymmetric matrix (Parlett-Reid with
// pivoting). The input is antisymmetrized as (A - A^T) / 2.
double pfaffian(const Eigen::MatrixXd& a);

// d Pf / d A_kl for k < l in the upper triangle (A_lk treated as -A_kl);
// the lower triangle holds the negated values.
Eigen::MatrixXd pfaffian_gradient(const Eigen::MatrixXd& a);

enum class Ordering { Interleaved, PQ };

std::string to_string(Ordering o);

struct CovarianceMatrix {
  Eigen::MatrixXd gamma;
  Ordering ordering = Ordering::Interleaved;

  CovarianceMatrix() = default;
  explicit CovarianceMatrix(Eigen::MatrixXd g, Ordering o = Ordering::Interleaved);

  int n_modes() const { return static_cast<int>(gamma.rows() / 2); }
  // ||Gamma^2 + 1||_max
  double purity_residual() const;
  bool is_pure(double tol = 1e-8) const { return purity_residual() < tol; }
  // +1 even, -1 odd; requires a pure state.
  int parity() const;

  CovarianceMatrix to_interleaved() const;
  CovarianceMatrix to_pq() const;

  static CovarianceMatrix vacuum(int n_modes);
  // Computational basis state; bit p of occupation marks mode p as filled.
  static CovarianceMatrix basis_state(int n_modes, Index occupation);
};

// Interleaved index of pq-ordered Majorana k: (a_0, a_2, ..., a_1, a_3, ...).
std::vector<int> pq_permutation(int n_modes);

// Throws unless antisymmetric to 1e-12 with singular values <= 1 + 1e-10.
void validate_covariance(const CovarianceMatrix& c);

CovarianceMatrix random_pure_covariance(int n_modes, Rng& rng);
// Random Slater determinant with n_particles electrons (complex orbitals).
CovarianceMatrix random_slater_covariance(int n_modes, int n_particles, Rng& rng);
// Gamma of a statevector, read through the Jordan-Wigner Majoranas.
CovarianceMatrix covariance_from_state(const StateVector& psi);

// One-body density rho_pq = <c+_p c_q> of a covariance with no pairing.
Eigen::MatrixXcd one_body_density(const CovarianceMatrix& c);
CovarianceMatrix covariance_from_density(const Eigen::MatrixXcd& rho);
// True if every 2x2 mode block has the form [[x, y], [-y, x]].
bool is_number_conserving(const CovarianceMatrix& c, double tol = 1e-10);

std::string write_covariance(const CovarianceMatrix& c);
CovarianceMatrix read_covariance(const std::string& text);

// coefficient * <a_{i1} ... a_{i2m}> = coefficient * (-i)^m Pf(Gamma|_I).
// Odd monomials have zero expectation in a state of definite parity.
cplx wick_expectation(const CovarianceMatrix& c, const MajoranaMonomial& mono);
// Distinct, not necessarily sorted, indices; throws on a repeated index.
cplx wick_expectation(const CovarianceMatrix& c, const std::vector<int>& indices);

// Energy sum_I w_I h_I <hat a_I> + constant with hat a_I the Hermitian
// normalized monomial (-i)^{C(2m,2)} a_I. Since <hat a_I> = (-1)^m Pf(Gamma|_I),
// the energy is a signed sum of sub-Pfaffians.
class MajoranaPolynomialEnergy {
 public:
  struct Term {
    double coefficient = 0.0;  // of the Hermitian normalized monomial
    Index mask = 0;
    std::vector<int> indices;
  };

  MajoranaPolynomialEnergy() = default;
  explicit MajoranaPolynomialEnergy(int n_modes) : n_modes_(n_modes) {}
  // Hermitian spin operator on n_modes qubits read through Jordan-Wigner.
  static MajoranaPolynomialEnergy from_spin(const SpinOperator& h, int n_modes);

  void add(double coefficient, Index mask);
  int n_modes() const { return n_modes_; }
  double constant() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  int n_modes_ = 0;
  double constant_ = 0.0;
  std::vector<Term> terms_;
};

double ghf_energy(const CovarianceMatrix& c, const MajoranaPolynomialEnergy& e);
// F = 4 dE/dGamma; F_kl = 2 dE/dGamma_kl for the independent entries k < l.
Eigen::MatrixXd mean_field_matrix(const CovarianceMatrix& c, const MajoranaPolynomialEnergy& e);
// Energy and F in one pass.
double ghf_energy_and_gradient(const CovarianceMatrix& c, const MajoranaPolynomialEnergy& e,
                               Eigen::MatrixXd* f);

// i sgn(iF) from the Hermitian spectrum of iF; zero eigenvalues get sign +1.
// `degenerate` is set when some |D_ii| < 1e-12.
CovarianceMatrix self_consistent_update(const Eigen::MatrixXd& f, bool* degenerate = nullptr);
// Nearest pure covariance: -i sgn(i Gamma).
Eigen::MatrixXd project_pure(const Eigen::MatrixXd& gamma);
// Drops the pairing part of every 2x2 mode block.
Eigen::MatrixXd project_number_conserving(const Eigen::MatrixXd& m);

struct GhfConfig {
  std::uint64_t seed = 7;
  int restarts = 1;
  int warmup_iterations = 500;
  double warmup_tolerance = 1e-10;
  double flow_step = 0.05;
  double tolerance = 1e-7;  // on ||[Gamma, F]||_max
  int max_iterations = 20000;
  bool number_conserving = false;
  int n_particles = -1;  // number-conserving mode; -1 means L/2
};

struct GhfRestart {
  int restart = 0;
  int iterations = 0;
  double energy = 0.0;
  double purity_residual = 0.0;
  bool converged = false;
};

struct GhfResult {
  CovarianceMatrix gamma;
  double energy = 0.0;
  int parity = 1;
  bool converged = false;
  bool degenerate_spectrum = false;
  int iterations = 0;
  std::vector<GhfRestart> history;
  // Winning run: energy after warm-up and after each accepted flow step, and
  // the largest purity residual seen along the flow.
  std::vector<double> flow_energies;
  double max_purity_residual = 0.0;
};

// Best of `restarts` seeded runs: self-consistent warm-up, then Euler steps of
// dGamma/dtau = 1/2 [Gamma, [Gamma, F]] with re-projection onto pure states.
// Steps that raise the energy are rejected and the step is halved.
GhfResult ghf_minimize(const MajoranaPolynomialEnergy& e, const GhfConfig& cfg = {});

// restart,iterations,energy,purity_residual,converged
std::string ghf_summary_csv(const GhfResult& r);

// Gaussian unitary exp(1/4 sum G_mn a_m a_n) with G = log R, R in SO(2L).
// Then U^dagger a_mu U = sum_nu R_mu,nu a_nu. In ladder operators the
// Hermitian generator H = i/4 sum G_mn a_m a_n equals
// sum M_pq c+_p c_q + 1/2 sum (Delta_pq c+_p c+_q + h.c.) + const.
struct QuadraticGenerator {
  Eigen::MatrixXd g;       // 2L x 2L antisymmetric
  Eigen::MatrixXd q;       // orthogonal Schur basis of g
  std::vector<double> beta;  // block angles of the Schur form
  bool odd = false;        // true when the reference state is |1_{L-1}>

  int n_modes() const { return static_cast<int>(g.rows() / 2); }
  Eigen::MatrixXcd m() const;      // Hermitian L x L
  Eigen::MatrixXcd delta() const;  // antisymmetric L x L
  SpinOperator hermitian_generator() const;  // i/4 sum G_mn a_m a_n, JW image
  FermionOperator ladder_generator() const;  // from M and Delta, no constant
};

// Generator whose unitary maps the reference state (vacuum or |1_{L-1}>) to
// the pure state with covariance gamma.
QuadraticGenerator gaussian_generator(const CovarianceMatrix& gamma);
// Real logarithm of a special orthogonal matrix (real Schur form).
QuadraticGenerator generator_from_rotation(const Eigen::MatrixXd& r);

// Statevector of a pure covariance (L <= 14). Number-conserving inputs are
// built as Slater determinants, which also allows larger L.
StateVector synthesize_fgs_state(const CovarianceMatrix& gamma);

// d+_1 ... d+_N |vac> with d+_k = sum_p C_pk c+_p; columns must be orthonormal.
StateVector slater_determinant(const Eigen::MatrixXcd& orbitals, int n_modes);

}  // namespace qitelab
