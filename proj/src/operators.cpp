// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qitelab/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <type_traits>

namespace qitelab {

namespace {

constexpr cplx kI{0.0, 1.0};

Index bit(int j) { return Index{1} << j; }

cplx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_site(int site) {
  if (site < 0 || site >= kMaxQubits) {
    throw std::out_of_range("site index out of range: " + std::to_string(site));
  }
}

// Phase of the single-site product p*q as a power of i.
int letter_product_power(Pauli p, Pauli q) {
  if (p == Pauli::I || q == Pauli::I || p == q) return 0;
  // X*Y = iZ, Y*Z = iX, Z*X = iY; reversed order gives -i.
  const bool cyclic = (p == Pauli::X && q == Pauli::Y) || (p == Pauli::Y && q == Pauli::Z) ||
                      (p == Pauli::Z && q == Pauli::X);
  return cyclic ? 1 : 3;
}

}  // namespace

char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
    default: return 'I';
  }
}

PauliString::PauliString(std::initializer_list<std::pair<int, Pauli>> factors, cplx ph)
    : phase(ph) {
  for (const auto& [site, p] : factors) set(site, p);
}

PauliString PauliString::from_label(const std::string& label, cplx ph) {
  // label[j] is the letter on qubit j.
  PauliString s;
  s.phase = ph;
  for (std::size_t j = 0; j < label.size(); ++j) {
    switch (label[j]) {
      case 'I': break;
      case 'X': s.set(static_cast<int>(j), Pauli::X); break;
      case 'Y': s.set(static_cast<int>(j), Pauli::Y); break;
      case 'Z': s.set(static_cast<int>(j), Pauli::Z); break;
      default: throw std::invalid_argument("bad Pauli label character");
    }
  }
  return s;
}

Pauli PauliString::at(int site) const {
  const bool xb = (x >> site) & 1U;
  const bool zb = (z >> site) & 1U;
  if (xb && zb) return Pauli::Y;
  if (xb) return Pauli::X;
  if (zb) return Pauli::Z;
  return Pauli::I;
}

void PauliString::set(int site, Pauli p) {
  check_site(site);
  x &= ~bit(site);
  z &= ~bit(site);
  if (p == Pauli::X || p == Pauli::Y) x |= bit(site);
  if (p == Pauli::Z || p == Pauli::Y) z |= bit(site);
}

int PauliString::weight() const { return std::popcount(support()); }

int PauliString::max_site() const {
  const Index s = support();
  return s == 0 ? -1 : 63 - std::countl_zero(s);
}

std::map<int, Pauli> PauliString::factors() const {
  std::map<int, Pauli> out;
  for (Index s = support(); s != 0; s &= s - 1) {
    const int j = std::countr_zero(s);
    out[j] = at(j);
  }
  return out;
}

std::string PauliString::label(int n_qubits) const {
  std::string out(static_cast<std::size_t>(n_qubits), 'I');
  for (int j = 0; j < n_qubits; ++j) out[static_cast<std::size_t>(j)] = pauli_char(at(j));
  return out;
}

PauliString pauli_product(const PauliString& a, const PauliString& b) {
  PauliString out;
  int power = 0;
  for (Index s = a.support() & b.support(); s != 0; s &= s - 1) {
    const int j = std::countr_zero(s);
    power += letter_product_power(a.at(j), b.at(j));
  }
  out.x = a.x ^ b.x;
  out.z = a.z ^ b.z;
  out.phase = a.phase * b.phase * ipow(power);
  return out;
}

// ---------------------------------------------------------------------------
// SpinOperator

SpinOperator::SpinOperator(const PauliString& s, cplx coeff) { add(s, coeff); }

SpinOperator SpinOperator::identity(cplx coeff) { return SpinOperator(PauliString{}, coeff); }

void SpinOperator::add(const PauliString& s, cplx coeff) {
  const cplx c = coeff * s.phase;
  if (c == cplx{}) return;
  auto [it, inserted] = terms_.try_emplace(PauliKey{s.x, s.z}, c);
  if (!inserted) {
    it->second += c;
    if (std::abs(it->second) < kPruneTol) terms_.erase(it);
  }
}

SpinOperator& SpinOperator::operator+=(const SpinOperator& o) {
  for (const auto& [k, c] : o.terms_) {
    PauliString s;
    s.x = k.x;
    s.z = k.z;
    add(s, c);
  }
  return *this;
}

SpinOperator& SpinOperator::operator-=(const SpinOperator& o) { return *this += o * cplx{-1.0}; }

SpinOperator& SpinOperator::operator*=(cplx c) {
  for (auto& [k, v] : terms_) v *= c;
  prune();
  return *this;
}

SpinOperator operator*(const SpinOperator& a, const SpinOperator& b) {
  SpinOperator out;
  for (const auto& [ka, ca] : a.terms_) {
    PauliString sa;
    sa.x = ka.x;
    sa.z = ka.z;
    for (const auto& [kb, cb] : b.terms_) {
      PauliString sb;
      sb.x = kb.x;
      sb.z = kb.z;
      out.add(pauli_product(sa, sb), ca * cb);
    }
  }
  out.prune();
  return out;
}

SpinOperator SpinOperator::adjoint() const {
  SpinOperator out = *this;
  for (auto& [k, v] : out.terms_) v = std::conj(v);
  return out;
}

bool SpinOperator::is_hermitian(double tol) const {
  for (const auto& [k, v] : terms_) {
    if (std::abs(v.imag()) > tol) return false;
  }
  return true;
}

void SpinOperator::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) < tol; });
}

std::vector<std::pair<cplx, PauliString>> SpinOperator::terms() const {
  std::vector<std::pair<cplx, PauliString>> out;
  out.reserve(terms_.size());
  for (const auto& [k, c] : terms_) {
    PauliString s;
    s.x = k.x;
    s.z = k.z;
    out.emplace_back(c, s);
  }
  return out;
}

Index SpinOperator::support() const {
  Index s = 0;
  for (const auto& [k, c] : terms_) s |= k.x | k.z;
  return s;
}

int SpinOperator::max_site() const {
  const Index s = support();
  return s == 0 ? -1 : 63 - std::countl_zero(s);
}

double SpinOperator::coefficient_norm() const {
  double n = 0.0;
  for (const auto& [k, c] : terms_) n += std::abs(c);
  return n;
}

cplx SpinOperator::coefficient(const PauliString& s) const {
  auto it = terms_.find(PauliKey{s.x, s.z});
  return it == terms_.end() ? cplx{} : it->second / s.phase;
}

SpinOperator SpinOperator::remap(const std::vector<int>& map) const {
  SpinOperator out;
  for (const auto& [c, s] : terms()) {
    PauliString t;
    for (const auto& [j, p] : s.factors()) {
      if (j >= static_cast<int>(map.size()) || map[static_cast<std::size_t>(j)] < 0) {
        throw std::out_of_range("remap: site not mapped");
      }
      t.set(map[static_cast<std::size_t>(j)], p);
    }
    out.add(t, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// FermionOperator

FermionOperator FermionOperator::identity(cplx coeff) {
  FermionOperator f;
  f.add({}, coeff);
  return f;
}

FermionOperator FermionOperator::ladder(int mode, bool create) {
  if (mode < 0 || mode >= kMaxQubits) throw std::out_of_range("mode index out of range");
  FermionOperator f;
  f.add({LadderOp{mode, create}}, 1.0);
  return f;
}

FermionOperator FermionOperator::excitation(int p, int q) {
  FermionOperator f;
  for (int s = 0; s < 2; ++s) f.add({LadderOp{2 * p + s, true}, LadderOp{2 * q + s, false}}, 1.0);
  return f;
}

void FermionOperator::add(const Word& w, cplx coeff) {
  if (coeff == cplx{}) return;
  auto [it, inserted] = terms_.try_emplace(w, coeff);
  if (!inserted) {
    it->second += coeff;
    if (std::abs(it->second) < kPruneTol) terms_.erase(it);
  }
}

FermionOperator& FermionOperator::operator+=(const FermionOperator& o) {
  for (const auto& [w, c] : o.terms_) add(w, c);
  return *this;
}

FermionOperator& FermionOperator::operator-=(const FermionOperator& o) {
  for (const auto& [w, c] : o.terms_) add(w, -c);
  return *this;
}

FermionOperator& FermionOperator::operator*=(cplx c) {
  for (auto& [w, v] : terms_) v *= c;
  prune();
  return *this;
}

FermionOperator operator*(const FermionOperator& a, const FermionOperator& b) {
  FermionOperator out;
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) {
      FermionOperator::Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.add(w, ca * cb);
    }
  }
  return out;
}

FermionOperator FermionOperator::adjoint() const {
  FermionOperator out;
  for (const auto& [w, c] : terms_) {
    Word r(w.rbegin(), w.rend());
    for (auto& op : r) op.create = !op.create;
    out.add(r, std::conj(c));
  }
  return out;
}

namespace {

// True when l must stand right of r in normal order.
bool out_of_order(const LadderOp& l, const LadderOp& r) {
  if (!l.create && r.create) return true;
  if (l.create == r.create) return l.mode < r.mode;
  return false;
}

void normal_order_word(const FermionOperator::Word& w, cplx c, FermionOperator& out) {
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    const LadderOp& l = w[k];
    const LadderOp& r = w[k + 1];
    if (l.create == r.create && l.mode == r.mode) return;  // c c = 0
    if (!out_of_order(l, r)) continue;
    FermionOperator::Word swapped = w;
    std::swap(swapped[k], swapped[k + 1]);
    normal_order_word(swapped, -c, out);
    if (!l.create && r.create && l.mode == r.mode) {
      FermionOperator::Word contracted;
      contracted.insert(contracted.end(), w.begin(), w.begin() + static_cast<long>(k));
      contracted.insert(contracted.end(), w.begin() + static_cast<long>(k) + 2, w.end());
      normal_order_word(contracted, c, out);
    }
    return;
  }
  out.add(w, c);
}

}  // namespace

FermionOperator FermionOperator::normal_ordered() const {
  FermionOperator out;
  for (const auto& [w, c] : terms_) normal_order_word(w, c, out);
  out.prune();
  return out;
}

void FermionOperator::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) < tol; });
}

int FermionOperator::max_mode() const {
  int m = -1;
  for (const auto& [w, c] : terms_) {
    for (const auto& op : w) m = std::max(m, op.mode);
  }
  return m;
}

std::vector<int> FermionOperator::modes() const {
  std::vector<int> out;
  for (const auto& [w, c] : terms_) {
    for (const auto& op : w) out.push_back(op.mode);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FermionOperator FermionOperator::remap(const std::vector<int>& map) const {
  FermionOperator out;
  for (const auto& [w, c] : terms_) {
    Word r = w;
    for (auto& op : r) {
      if (op.mode >= static_cast<int>(map.size()) || map[static_cast<std::size_t>(op.mode)] < 0) {
        throw std::out_of_range("remap: mode not mapped");
      }
      op.mode = map[static_cast<std::size_t>(op.mode)];
    }
    out.add(r, c);
  }
  return out;
}

SpinOperator jordan_wigner(const FermionOperator& op, int n_modes) {
  if (n_modes > kMaxQubits) throw std::out_of_range("too many modes");
  std::vector<SpinOperator> create(static_cast<std::size_t>(n_modes));
  std::vector<SpinOperator> annihilate(static_cast<std::size_t>(n_modes));
  for (int j = 0; j < n_modes; ++j) {
    PauliString xs;
    PauliString ys;
    for (int k = 0; k < j; ++k) {
      xs.set(k, Pauli::Z);
      ys.set(k, Pauli::Z);
    }
    xs.set(j, Pauli::X);
    ys.set(j, Pauli::Y);
    SpinOperator cr(xs, 0.5);
    cr.add(ys, cplx{0.0, -0.5});
    SpinOperator an(xs, 0.5);
    an.add(ys, cplx{0.0, 0.5});
    create[static_cast<std::size_t>(j)] = cr;
    annihilate[static_cast<std::size_t>(j)] = an;
  }
  SpinOperator out;
  for (const auto& [w, c] : op.terms()) {
    SpinOperator term = SpinOperator::identity(c);
    for (const auto& l : w) {
      if (l.mode < 0 || l.mode >= n_modes) throw std::out_of_range("jordan_wigner: mode out of range");
      term = term * (l.create ? create : annihilate)[static_cast<std::size_t>(l.mode)];
    }
    out += term;
  }
  out.prune();
  return out;
}

// ---------------------------------------------------------------------------
// Majorana monomials

std::vector<int> MajoranaMonomial::indices() const {
  std::vector<int> out;
  for (Index s = mask; s != 0; s &= s - 1) out.push_back(std::countr_zero(s));
  return out;
}

int MajoranaMonomial::degree() const { return std::popcount(mask); }

MajoranaMonomial majorana_product(const MajoranaMonomial& a, const MajoranaMonomial& b) {
  // Sign = (-1)^{#pairs (i in a, j in b) with i > j}; repeated indices square to 1.
  int swaps = 0;
  for (Index s = b.mask; s != 0; s &= s - 1) {
    const int j = std::countr_zero(s);
    const Index above = j >= 63 ? 0 : (~Index{0} << (j + 1));
    swaps += std::popcount(a.mask & above);
  }
  MajoranaMonomial out;
  out.mask = a.mask ^ b.mask;
  out.coefficient = a.coefficient * b.coefficient * ((swaps & 1) ? -1.0 : 1.0);
  return out;
}

cplx hermitian_prefactor(int degree) {
  const int pairs = degree * (degree - 1) / 2;
  return ipow(-pairs);
}

MajoranaMonomial pauli_to_majorana(const PauliString& s, int n_modes) {
  if (s.max_site() >= n_modes) throw std::out_of_range("pauli_to_majorana: site out of range");
  if (2 * n_modes > 64) throw std::out_of_range("pauli_to_majorana: at most 32 modes");
  MajoranaMonomial out;
  out.coefficient = s.phase;
  for (Index sup = s.support(); sup != 0; sup &= sup - 1) {
    const int j = std::countr_zero(sup);
    const Pauli p = s.at(j);
    MajoranaMonomial f;
    if (p == Pauli::Z) {
      f.mask = bit(2 * j) | bit(2 * j + 1);
      f.coefficient = -kI;
    } else {
      // Parity string prod_{k<j} (-i a_{2k} a_{2k+1}) times a_{2j} or a_{2j+1}.
      f.mask = (j == 0 ? Index{0} : (bit(2 * j) - 1)) | bit(p == Pauli::X ? 2 * j : 2 * j + 1);
      f.coefficient = ipow(-j);
    }
    out = majorana_product(out, f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// StateVector and kernels

StateVector::StateVector(int n) : n_qubits(n) {
  if (n < 0 || n > 30) throw std::invalid_argument("StateVector: unsupported qubit count");
  amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(Index{1} << n));
  amplitudes[0] = 1.0;
}

StateVector::StateVector(int n, Eigen::VectorXcd amps) : n_qubits(n), amplitudes(std::move(amps)) {
  if (amplitudes.size() != static_cast<Eigen::Index>(Index{1} << n)) {
    throw std::invalid_argument("StateVector: amplitude count does not match 2^n");
  }
}

StateVector StateVector::basis(int n, Index index) {
  StateVector s(n);
  if (index >= s.dim()) throw std::out_of_range("basis index out of range");
  s.amplitudes[0] = 0.0;
  s.amplitudes[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

void StateVector::normalize() {
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::runtime_error("cannot normalize a zero state");
  amplitudes /= n;
}

cplx inner(const StateVector& a, const StateVector& b) {
  if (a.n_qubits != b.n_qubits) throw std::invalid_argument("inner: dimension mismatch");
  return a.amplitudes.dot(b.amplitudes);
}

StateVector apply_pauli_string(const PauliString& s, const StateVector& psi) {
  if (s.max_site() >= psi.n_qubits) throw std::out_of_range("apply_pauli_string: site out of range");
  const cplx base = s.phase * ipow(std::popcount(s.x & s.z));
  StateVector out = psi;
  const Index dim = psi.dim();
  for (Index i = 0; i < dim; ++i) {
    const double sign = (std::popcount(i & s.z) & 1) ? -1.0 : 1.0;
    out.amplitudes[static_cast<Eigen::Index>(i ^ s.x)] =
        base * sign * psi.amplitudes[static_cast<Eigen::Index>(i)];
  }
  return out;
}

CompiledOperator::CompiledOperator(const SpinOperator& op) : max_site_(op.max_site()) {
  std::map<Index, std::size_t> where;
  for (const auto& [k, c] : op.raw()) {
    auto [it, inserted] = where.try_emplace(k.x, groups_.size());
    if (inserted) groups_.push_back(Group{k.x, {}, {}});
    Group& g = groups_[it->second];
    g.z.push_back(k.z);
    g.c.push_back(c * ipow(std::popcount(k.x & k.z)));
  }
  for (const Group& g : groups_) {
    std::vector<double> rc;
    for (const cplx& c : g.c) {
      if (std::abs(c.imag()) > 1e-15 * std::max(1.0, std::abs(c))) real_ = false;
      rc.push_back(c.real());
    }
    real_c_.push_back(std::move(rc));
  }
}

template <class V>
void CompiledOperator::apply_impl(const V& in, V& out) const {
  using S = typename V::Scalar;
  constexpr bool kReal = std::is_same_v<S, double>;
  const Index dim = static_cast<Index>(in.size());
  if (max_site_ >= 0 && (Index{1} << max_site_) >= dim) {
    throw std::out_of_range("operator acts beyond the register");
  }
  out.setZero(in.size());
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const Group& g = groups_[gi];
    std::vector<S> coeff(g.c.size());
    for (std::size_t k = 0; k < g.c.size(); ++k) {
      if constexpr (kReal) {
        coeff[k] = real_c_[gi][k];
      } else {
        coeff[k] = g.c[k];
      }
    }
    const std::size_t nz = g.z.size();
    if (nz == 1) {
      const Index zm = g.z[0];
      const S c = coeff[0];
      for (Index i = 0; i < dim; ++i) {
        const S v = in[static_cast<Eigen::Index>(i)];
        out[static_cast<Eigen::Index>(i ^ g.x)] += (std::popcount(i & zm) & 1) ? -c * v : c * v;
      }
      continue;
    }
    for (Index i = 0; i < dim; ++i) {
      const S v = in[static_cast<Eigen::Index>(i)];
      if (v == S{}) continue;
      S acc{};
      for (std::size_t k = 0; k < nz; ++k) {
        acc += (std::popcount(i & g.z[k]) & 1) ? -coeff[k] : coeff[k];
      }
      out[static_cast<Eigen::Index>(i ^ g.x)] += acc * v;
    }
  }
}

void CompiledOperator::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const { apply_impl(in, out); }

void CompiledOperator::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  if (!real_) throw std::logic_error("CompiledOperator: operator matrix is not real");
  apply_impl(in, out);
}

StateVector apply_operator(const SpinOperator& op, const StateVector& psi) {
  if (op.max_site() >= psi.n_qubits) throw std::out_of_range("apply_operator: site out of range");
  StateVector out(psi.n_qubits);
  CompiledOperator(op).apply(psi.amplitudes, out.amplitudes);
  return out;
}

cplx expectation(const SpinOperator& op, const StateVector& psi) {
  if (op.max_site() >= psi.n_qubits) throw std::invalid_argument("expectation: dimension mismatch");
  return inner(psi, apply_operator(op, psi));
}

cplx expectation(const PauliString& s, const StateVector& psi) {
  return inner(psi, apply_pauli_string(s, psi));
}

ExpResult apply_exp_hermitian(const SpinOperator& A, cplx scale, const StateVector& psi,
                              double tol) {
  if (A.max_site() >= psi.n_qubits) throw std::out_of_range("apply_exp_hermitian: site out of range");
  constexpr int kMaxTerms = 128;
  ExpResult res{psi, 1.0, 0};
  const double size = std::abs(scale) * A.coefficient_norm();
  if (size == 0.0) return res;
  // Substeps keep every series well inside its radius of fast convergence.
  const int steps = std::max(1, static_cast<int>(std::ceil(size / 2.0)));
  const cplx h = scale / static_cast<double>(steps);
  const CompiledOperator op(A);
  Eigen::VectorXcd term(psi.amplitudes.size());
  Eigen::VectorXcd next(psi.amplitudes.size());
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXcd sum = res.state.amplitudes;
    term = sum;
    bool converged = false;
    for (int k = 1; k <= kMaxTerms; ++k) {
      op.apply(term, next);
      term = next * (h / static_cast<double>(k));
      sum += term;
      res.terms = std::max(res.terms, k);
      if (term.norm() < tol * sum.norm()) {
        converged = true;
        break;
      }
    }
    if (!converged) throw std::runtime_error("apply_exp_hermitian: Taylor series did not converge");
    const double n = sum.norm();
    res.norm *= n;
    res.state.amplitudes = sum / n;
  }
  return res;
}

Eigen::MatrixXcd to_matrix(const PauliString& s, int n_qubits) {
  return to_matrix(SpinOperator(s), n_qubits);
}

Eigen::MatrixXcd to_matrix(const SpinOperator& op, int n_qubits) {
  if (n_qubits > 12) throw std::invalid_argument("to_matrix: register too large");
  if (op.max_site() >= n_qubits) throw std::out_of_range("to_matrix: site out of range");
  const Index dim = Index{1} << n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const CompiledOperator c(op);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  Eigen::VectorXcd col(static_cast<Eigen::Index>(dim));
  for (Index i = 0; i < dim; ++i) {
    e.setZero();
    e[static_cast<Eigen::Index>(i)] = 1.0;
    c.apply(e, col);
    m.col(static_cast<Eigen::Index>(i)) = col;
  }
  return m;
}

}  // namespace qitelab
