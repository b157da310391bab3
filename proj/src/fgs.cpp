// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qitelab/fgs.hpp"
#include "qitelab/random.hpp"

namespace qitelab {

PauliString majorana_string(int k) {
  if (k < 0 || k >= 2 * kMaxQubits) throw std::out_of_range("majorana_string: index out of range");
  const int p = k / 2;
  PauliString s;
  for (int j = 0; j < p; ++j) s.set(j, Pauli::Z);
  s.set(p, k % 2 == 0 ? Pauli::X : Pauli::Y);
  return s;
}

std::string to_string(Ordering o) { return o == Ordering::Interleaved ? "interleaved" : "pq"; }

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd g, Ordering o) : gamma(std::move(g)), ordering(o) {
  if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0) {
    throw std::invalid_argument("covariance matrix must be square with even dimension");
  }
}

double CovarianceMatrix::purity_residual() const {
  const Eigen::MatrixXd r = gamma * gamma + Eigen::MatrixXd::Identity(gamma.rows(), gamma.cols());
  return r.cwiseAbs().maxCoeff();
}

int CovarianceMatrix::parity() const {
  const CovarianceMatrix c = to_interleaved();
  const double pf = pfaffian(c.gamma);
  const double sign = (c.n_modes() % 2 == 0) ? pf : -pf;
  return sign >= 0.0 ? 1 : -1;
}

std::vector<int> pq_permutation(int n_modes) {
  std::vector<int> perm(static_cast<std::size_t>(2 * n_modes));
  for (int k = 0; k < n_modes; ++k) {
    perm[static_cast<std::size_t>(k)] = 2 * k;
    perm[static_cast<std::size_t>(n_modes + k)] = 2 * k + 1;
  }
  return perm;
}

CovarianceMatrix CovarianceMatrix::to_pq() const {
  if (ordering == Ordering::PQ) return *this;
  const auto perm = pq_permutation(n_modes());
  Eigen::MatrixXd g(gamma.rows(), gamma.cols());
  for (Eigen::Index k = 0; k < g.rows(); ++k) {
    for (Eigen::Index l = 0; l < g.cols(); ++l) {
      g(k, l) = gamma(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(l)]);
    }
  }
  return CovarianceMatrix(g, Ordering::PQ);
}

CovarianceMatrix CovarianceMatrix::to_interleaved() const {
  if (ordering == Ordering::Interleaved) return *this;
  const auto perm = pq_permutation(n_modes());
  Eigen::MatrixXd g(gamma.rows(), gamma.cols());
  for (Eigen::Index k = 0; k < g.rows(); ++k) {
    for (Eigen::Index l = 0; l < g.cols(); ++l) {
      g(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(l)]) = gamma(k, l);
    }
  }
  return CovarianceMatrix(g, Ordering::Interleaved);
}

CovarianceMatrix CovarianceMatrix::vacuum(int n_modes) { return basis_state(n_modes, 0); }

CovarianceMatrix CovarianceMatrix::basis_state(int n_modes, Index occupation) {
  if (n_modes < 1) throw std::invalid_argument("covariance needs at least one mode");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int p = 0; p < n_modes; ++p) {
    const double s = ((occupation >> p) & 1U) ? 1.0 : -1.0;
    g(2 * p, 2 * p + 1) = s;
    g(2 * p + 1, 2 * p) = -s;
  }
  return CovarianceMatrix(g);
}

void validate_covariance(const CovarianceMatrix& c) {
  if ((c.gamma + c.gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("covariance matrix is not antisymmetric");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.gamma);
  if (svd.singularValues().maxCoeff() > 1.0 + 1e-10) {
    throw std::invalid_argument("covariance matrix has a singular value above 1");
  }
}

CovarianceMatrix random_pure_covariance(int n_modes, Rng& rng) {
  const int n = 2 * n_modes;
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd o = qr.householderQ();
  // Householder Q has a fixed determinant; flip a column to draw both parities.
  if (rng.uniform() < 0.5) o.col(0) *= -1.0;
  Eigen::MatrixXd g = o * CovarianceMatrix::vacuum(n_modes).gamma * o.transpose();
  return CovarianceMatrix(0.5 * (g - g.transpose()));
}

CovarianceMatrix random_slater_covariance(int n_modes, int n_particles, Rng& rng) {
  if (n_particles < 0 || n_particles > n_modes) throw std::invalid_argument("random_slater_covariance: bad particle number");
  Eigen::MatrixXcd a(n_modes, std::max(n_particles, 1));
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double re = rng.normal();
      a(i, j) = cplx(re, rng.normal());
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  const Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd c = q.leftCols(n_particles);
  const Eigen::MatrixXcd rho = c.conjugate() * c.transpose();
  return covariance_from_density(rho);
}

CovarianceMatrix covariance_from_state(const StateVector& psi) {
  const int l = psi.n_qubits;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  std::vector<PauliString> maj;
  for (int k = 0; k < 2 * l; ++k) maj.push_back(majorana_string(k));
  const double nrm = psi.amplitudes.squaredNorm();
  for (int k = 0; k < 2 * l; ++k) {
    for (int m = k + 1; m < 2 * l; ++m) {
      const PauliString prod = pauli_product(maj[static_cast<std::size_t>(k)], maj[static_cast<std::size_t>(m)]);
      const cplx v = cplx(0.0, 1.0) * expectation(prod, psi) / nrm;
      g(k, m) = v.real();
      g(m, k) = -v.real();
    }
  }
  return CovarianceMatrix(g);
}

Eigen::MatrixXcd one_body_density(const CovarianceMatrix& cov) {
  const CovarianceMatrix c = cov.to_interleaved();
  const int l = c.n_modes();
  const auto& g = c.gamma;
  Eigen::MatrixXcd rho(l, l);
  for (int p = 0; p < l; ++p) {
    for (int q = 0; q < l; ++q) {
      const double d = p == q ? 1.0 : 0.0;
      const double re = (g(2 * p, 2 * q + 1) - g(2 * p + 1, 2 * q) + 2.0 * d) / 4.0;
      const double im = -(g(2 * p, 2 * q) + g(2 * p + 1, 2 * q + 1)) / 4.0;
      rho(p, q) = cplx(re, im);
    }
  }
  return rho;
}

CovarianceMatrix covariance_from_density(const Eigen::MatrixXcd& rho) {
  const auto l = rho.rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  for (Eigen::Index p = 0; p < l; ++p) {
    for (Eigen::Index q = 0; q < l; ++q) {
      const double d = p == q ? 1.0 : 0.0;
      const cplx r = 0.5 * (rho(p, q) + std::conj(rho(q, p)));
      if (p != q) {
        g(2 * p, 2 * q) = -2.0 * r.imag();
        g(2 * p + 1, 2 * q + 1) = -2.0 * r.imag();
      }
      g(2 * p, 2 * q + 1) = 2.0 * r.real() - d;
      g(2 * p + 1, 2 * q) = d - 2.0 * r.real();
    }
  }
  return CovarianceMatrix(g);
}

bool is_number_conserving(const CovarianceMatrix& cov, double tol) {
  const CovarianceMatrix c = cov.to_interleaved();
  const auto& g = c.gamma;
  for (int p = 0; p < c.n_modes(); ++p) {
    for (int q = 0; q < c.n_modes(); ++q) {
      if (std::abs(g(2 * p, 2 * q) - g(2 * p + 1, 2 * q + 1)) > tol) return false;
      if (std::abs(g(2 * p, 2 * q + 1) + g(2 * p + 1, 2 * q)) > tol) return false;
    }
  }
  return true;
}

std::string write_covariance(const CovarianceMatrix& c) {
  std::ostringstream out;
  out << "# qitelab covariance\n";
  out << "ordering " << to_string(c.ordering) << "\n";
  out << "modes " << c.n_modes() << "\n";
  char buf[40];
  for (Eigen::Index i = 0; i < c.gamma.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.gamma.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", c.gamma(i, j));
      out << (j == 0 ? "" : " ") << buf;
    }
    out << "\n";
  }
  return out.str();
}

CovarianceMatrix read_covariance(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Ordering ordering = Ordering::Interleaved;
  int modes = -1;
  std::vector<double> values;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "ordering") {
      std::string v;
      ls >> v;
      if (v == "interleaved") {
        ordering = Ordering::Interleaved;
      } else if (v == "pq") {
        ordering = Ordering::PQ;
      } else {
        throw std::runtime_error("covariance file: unknown ordering '" + v + "'");
      }
    } else if (key == "modes") {
      if (!(ls >> modes) || modes < 1) throw std::runtime_error("covariance file: bad mode count");
    } else {
      std::istringstream vs(line);
      double x = 0.0;
      while (vs >> x) values.push_back(x);
      if (!vs.eof()) throw std::runtime_error("covariance file: unparsable row '" + line + "'");
    }
  }
  if (modes < 1) throw std::runtime_error("covariance file: missing 'modes' header");
  const int n = 2 * modes;
  if (values.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw std::runtime_error("covariance file: expected " + std::to_string(n * n) + " entries");
  }
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = values[static_cast<std::size_t>(i * n + j)];
  }
  CovarianceMatrix c(g, ordering);
  validate_covariance(c);
  return c;
}

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& g, const std::vector<int>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) = g(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return s;
}

std::vector<int> mask_indices(Index mask) {
  std::vector<int> out;
  for (Index m = mask; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

cplx minus_i_pow(int m) {
  static const cplx table[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
  return table[m % 4];
}

}  // namespace

cplx wick_expectation(const CovarianceMatrix& cov, const MajoranaMonomial& mono) {
  const CovarianceMatrix c = cov.to_interleaved();
  if (mono.mask == 0) return mono.coefficient;
  const auto idx = mask_indices(mono.mask);
  if (idx.back() >= c.gamma.rows()) throw std::out_of_range("wick_expectation: Majorana index out of range");
  if (idx.size() % 2 != 0) return 0.0;
  const int m = static_cast<int>(idx.size() / 2);
  return mono.coefficient * minus_i_pow(m) * pfaffian(submatrix(c.gamma, idx));
}

cplx wick_expectation(const CovarianceMatrix& c, const std::vector<int>& indices) {
  MajoranaMonomial mono;
  int inversions = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int k = indices[i];
    if (k < 0 || k >= 64) throw std::out_of_range("wick_expectation: Majorana index out of range");
    if (mono.mask & (Index{1} << k)) throw std::invalid_argument("wick_expectation: repeated Majorana index");
    for (std::size_t j = 0; j < i; ++j) {
      if (indices[j] > k) ++inversions;
    }
    mono.mask |= Index{1} << k;
  }
  mono.coefficient = (inversions % 2 == 0) ? 1.0 : -1.0;
  return wick_expectation(c, mono);
}

MajoranaPolynomialEnergy MajoranaPolynomialEnergy::from_spin(const SpinOperator& h, int n_modes) {
  if (h.max_site() >= n_modes) throw std::invalid_argument("from_spin: operator exceeds mode count");
  MajoranaPolynomialEnergy e(n_modes);
  for (const auto& [c, s] : h.terms()) {
    const MajoranaMonomial mono = pauli_to_majorana(s, n_modes);
    const int k = mono.degree();
    if (k % 2 != 0) throw std::invalid_argument("from_spin: odd Majorana monomial breaks parity");
    const cplx w = c * mono.coefficient / hermitian_prefactor(k);
    if (std::abs(w.imag()) > 1e-10 * std::max(1.0, std::abs(w))) {
      throw std::invalid_argument("from_spin: operator is not Hermitian");
    }
    e.add(w.real(), mono.mask);
  }
  return e;
}

void MajoranaPolynomialEnergy::add(double coefficient, Index mask) {
  if (mask == 0) {
    constant_ += coefficient;
    return;
  }
  if (std::popcount(mask) % 2 != 0) throw std::invalid_argument("Majorana energy: odd monomial");
  if (std::bit_width(mask) > static_cast<unsigned>(2 * n_modes_)) throw std::out_of_range("Majorana energy: index out of range");
  for (auto& t : terms_) {
    if (t.mask == mask) {
      t.coefficient += coefficient;
      return;
    }
  }
  terms_.push_back(Term{coefficient, mask, mask_indices(mask)});
}

double ghf_energy_and_gradient(const CovarianceMatrix& cov, const MajoranaPolynomialEnergy& e, Eigen::MatrixXd* f) {
  const CovarianceMatrix c = cov.to_interleaved();
  if (c.n_modes() != e.n_modes()) throw std::invalid_argument("ghf_energy: dimension mismatch");
  const auto& g = c.gamma;
  double energy = e.constant();
  if (f != nullptr) *f = Eigen::MatrixXd::Zero(g.rows(), g.cols());
  for (const auto& t : e.terms()) {
    const auto& idx = t.indices;
    const int m = static_cast<int>(idx.size() / 2);
    const double w = (m % 2 == 0) ? t.coefficient : -t.coefficient;
    if (idx.size() == 2) {
      energy += w * g(idx[0], idx[1]);
      if (f != nullptr) {
        (*f)(idx[0], idx[1]) += 2.0 * w;
        (*f)(idx[1], idx[0]) -= 2.0 * w;
      }
      continue;
    }
    const Eigen::MatrixXd sub = submatrix(g, idx);
    energy += w * pfaffian(sub);
    if (f != nullptr) {
      const Eigen::MatrixXd grad = pfaffian_gradient(sub);
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = 0; b < idx.size(); ++b) {
          if (a != b) (*f)(idx[a], idx[b]) += 2.0 * w * grad(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
      }
    }
  }
  return energy;
}

double ghf_energy(const CovarianceMatrix& c, const MajoranaPolynomialEnergy& e) {
  return ghf_energy_and_gradient(c, e, nullptr);
}

Eigen::MatrixXd mean_field_matrix(const CovarianceMatrix& c, const MajoranaPolynomialEnergy& e) {
  Eigen::MatrixXd f;
  ghf_energy_and_gradient(c, e, &f);
  return f;
}

}  // namespace qitelab
