// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Operator algebra: Pauli strings, spin operators, fermionic ladder operators,
// Majorana monomials, the Jordan-Wigner map and statevector kernels.
//
// Conventions used throughout the library:
//   * mode j <-> qubit j; bit j of a basis index is the occupation of mode j.
//   * c_j = (prod_{k<j} Z_k) |0><1|_j, so |1> is an occupied mode.
//   * Majoranas (0-based, interleaved): a_{2p} = c+_p + c_p,
//     a_{2p+1} = i (c+_p - c_p). Hence X_p = P_p a_{2p}, Y_p = P_p a_{2p+1}
//     and Z_p = -i a_{2p} a_{2p+1}, with P_p the parity string below p.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qitelab {

using cplx = std::complex<double>;
using Index = std::uint64_t;

inline constexpr double kPruneTol = 1e-14;
inline constexpr int kMaxQubits = 62;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);

// A Pauli string stored as X/Z bit masks. Site j carries X if only x-bit j is
// set, Z if only z-bit j is set and Y if both are set.
struct PauliString {
  cplx phase{1.0, 0.0};
  Index x = 0;
  Index z = 0;

  PauliString() = default;
  PauliString(std::initializer_list<std::pair<int, Pauli>> factors,
              cplx phase = 1.0);
  static PauliString from_label(const std::string& label, cplx phase = 1.0);

  Pauli at(int site) const;
  void set(int site, Pauli p);
  Index support() const { return x | z; }
  int weight() const;
  int max_site() const;  // -1 for the identity
  std::map<int, Pauli> factors() const;
  std::string label(int n_qubits) const;
  bool same_letters(const PauliString& o) const { return x == o.x && z == o.z; }
};

PauliString pauli_product(const PauliString& a, const PauliString& b);

// Phase-free letter key used for canonical merging.
struct PauliKey {
  Index x = 0;
  Index z = 0;
  friend bool operator<(const PauliKey& a, const PauliKey& b) {
    return a.x != b.x ? a.x < b.x : a.z < b.z;
  }
  friend bool operator==(const PauliKey& a, const PauliKey& b) {
    return a.x == b.x && a.z == b.z;
  }
};

class SpinOperator {
 public:
  SpinOperator() = default;
  explicit SpinOperator(const PauliString& s, cplx coeff = 1.0);
  static SpinOperator identity(cplx coeff = 1.0);

  void add(const PauliString& s, cplx coeff = 1.0);
  SpinOperator& operator+=(const SpinOperator& o);
  SpinOperator& operator-=(const SpinOperator& o);
  SpinOperator& operator*=(cplx c);
  friend SpinOperator operator+(SpinOperator a, const SpinOperator& b) { return a += b; }
  friend SpinOperator operator-(SpinOperator a, const SpinOperator& b) { return a -= b; }
  friend SpinOperator operator*(SpinOperator a, cplx c) { return a *= c; }
  friend SpinOperator operator*(cplx c, SpinOperator a) { return a *= c; }
  friend SpinOperator operator*(const SpinOperator& a, const SpinOperator& b);

  SpinOperator adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  void prune(double tol = kPruneTol);

  // Terms with the phase folded into the coefficient (PauliString phase = 1).
  std::vector<std::pair<cplx, PauliString>> terms() const;
  const std::map<PauliKey, cplx>& raw() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  Index support() const;
  int max_site() const;
  double coefficient_norm() const;  // sum of |c|
  cplx coefficient(const PauliString& s) const;

  // Re-label qubits: site j -> map[j]. Every used site must be mapped.
  SpinOperator remap(const std::vector<int>& map) const;

 private:
  std::map<PauliKey, cplx> terms_;
};

struct LadderOp {
  int mode = 0;
  bool create = false;
  friend bool operator<(const LadderOp& a, const LadderOp& b) {
    return a.mode != b.mode ? a.mode < b.mode : a.create < b.create;
  }
  friend bool operator==(const LadderOp& a, const LadderOp& b) {
    return a.mode == b.mode && a.create == b.create;
  }
};

class FermionOperator {
 public:
  using Word = std::vector<LadderOp>;

  FermionOperator() = default;
  static FermionOperator identity(cplx coeff = 1.0);
  static FermionOperator ladder(int mode, bool create);
  // Spin-summed excitation E_pq over spatial orbitals (modes 2p, 2p+1).
  static FermionOperator excitation(int p, int q);

  void add(const Word& w, cplx coeff = 1.0);
  FermionOperator& operator+=(const FermionOperator& o);
  FermionOperator& operator-=(const FermionOperator& o);
  FermionOperator& operator*=(cplx c);
  friend FermionOperator operator+(FermionOperator a, const FermionOperator& b) { return a += b; }
  friend FermionOperator operator-(FermionOperator a, const FermionOperator& b) { return a -= b; }
  friend FermionOperator operator*(FermionOperator a, cplx c) { return a *= c; }
  friend FermionOperator operator*(cplx c, FermionOperator a) { return a *= c; }
  friend FermionOperator operator*(const FermionOperator& a, const FermionOperator& b);

  FermionOperator adjoint() const;
  // Creators left of annihilators, each group sorted by descending mode.
  FermionOperator normal_ordered() const;
  void prune(double tol = kPruneTol);

  const std::map<Word, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_mode() const;
  std::vector<int> modes() const;
  FermionOperator remap(const std::vector<int>& map) const;

 private:
  std::map<Word, cplx> terms_;
};

SpinOperator jordan_wigner(const FermionOperator& op, int n_modes);

// coefficient * a_{i1} a_{i2} ... with strictly increasing indices (bit mask).
struct MajoranaMonomial {
  cplx coefficient{1.0, 0.0};
  Index mask = 0;
  std::vector<int> indices() const;
  int degree() const;
};

// Product of two ordered Majorana words, returned in canonical order.
MajoranaMonomial majorana_product(const MajoranaMonomial& a, const MajoranaMonomial& b);
MajoranaMonomial pauli_to_majorana(const PauliString& s, int n_modes);
// Hermitian normalisation (-i)^{C(k,2)} of a degree-k monomial.
cplx hermitian_prefactor(int degree);

struct StateVector {
  int n_qubits = 0;
  Eigen::VectorXcd amplitudes;

  StateVector() = default;
  explicit StateVector(int n);  // |0...0>
  StateVector(int n, Eigen::VectorXcd amps);
  static StateVector basis(int n, Index index);
  Index dim() const { return Index{1} << n_qubits; }
  double norm() const { return amplitudes.norm(); }
  void normalize();
};

cplx inner(const StateVector& a, const StateVector& b);  // <a|b>

StateVector apply_pauli_string(const PauliString& s, const StateVector& psi);
StateVector apply_operator(const SpinOperator& op, const StateVector& psi);
cplx expectation(const SpinOperator& op, const StateVector& psi);
cplx expectation(const PauliString& s, const StateVector& psi);

// Pre-grouped Pauli sum for repeated application on large registers.
class CompiledOperator {
 public:
  CompiledOperator() = default;
  explicit CompiledOperator(const SpinOperator& op);
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;  // out = op*in
  // Real-matrix operators only (see is_real).
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  bool is_real() const { return real_; }
  int max_site() const { return max_site_; }

 private:
  struct Group {
    Index x = 0;
    std::vector<Index> z;
    std::vector<cplx> c;
  };
  template <class V>
  void apply_impl(const V& in, V& out) const;

  std::vector<Group> groups_;
  std::vector<std::vector<double>> real_c_;
  int max_site_ = -1;
  bool real_ = true;
};

struct ExpResult {
  StateVector state;
  double norm = 1.0;  // norm of e^{scale A} psi before renormalisation
  int terms = 0;
};

// e^{scale A} psi by an adaptive Taylor series, renormalised.
ExpResult apply_exp_hermitian(const SpinOperator& A, cplx scale,
                              const StateVector& psi, double tol = 1e-14);

// Dense matrix on n qubits (n <= 12), basis index convention as above.
Eigen::MatrixXcd to_matrix(const SpinOperator& op, int n_qubits);
Eigen::MatrixXcd to_matrix(const PauliString& s, int n_qubits);

}  // namespace qitelab
