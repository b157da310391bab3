// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qitelab/fgs.hpp"

namespace qitelab {

namespace {

constexpr cplx kI{0.0, 1.0};

}  // namespace

QuadraticGenerator generator_from_rotation(const Eigen::MatrixXd& r) {
  const Eigen::Index n = r.rows();
  if (r.cols() != n || n % 2 != 0) throw std::invalid_argument("generator_from_rotation: need even square matrix");
  if ((r * r.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("generator_from_rotation: matrix is not orthogonal");
  }
  if (r.determinant() < 0.0) throw std::invalid_argument("generator_from_rotation: determinant is -1");
  Eigen::RealSchur<Eigen::MatrixXd> schur(r);
  const Eigen::MatrixXd& t = schur.matrixT();
  const Eigen::MatrixXd& z = schur.matrixU();
  QuadraticGenerator out;
  Eigen::MatrixXd log_t = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::Index> negative;
  for (Eigen::Index i = 0; i < n;) {
    if (i + 1 < n && std::abs(t(i + 1, i)) > 1e-14) {
      const double theta = std::atan2(t(i + 1, i) - t(i, i + 1), t(i, i) + t(i + 1, i + 1));
      log_t(i, i + 1) = -theta;
      log_t(i + 1, i) = theta;
      out.beta.push_back(theta);
      i += 2;
    } else {
      if (t(i, i) < 0.0) negative.push_back(i);
      ++i;
    }
  }
  if (negative.size() % 2 != 0) throw std::runtime_error("generator_from_rotation: unpaired -1 eigenvalue");
  for (std::size_t k = 0; k < negative.size(); k += 2) {
    log_t(negative[k], negative[k + 1]) = -std::numbers::pi;
    log_t(negative[k + 1], negative[k]) = std::numbers::pi;
    out.beta.push_back(std::numbers::pi);
  }
  const Eigen::MatrixXd g = z * log_t * z.transpose();
  out.g = 0.5 * (g - g.transpose());
  out.q = z;
  return out;
}

QuadraticGenerator gaussian_generator(const CovarianceMatrix& cov) {
  const CovarianceMatrix c = cov.to_interleaved();
  if (!c.is_pure()) throw std::invalid_argument("gaussian_generator: covariance is not pure");
  const int l = c.n_modes();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(kI * c.gamma.cast<cplx>());
  // Eigenvalue +1 vectors v = (x + i y) / sqrt(2) satisfy Gamma x = y and
  // Gamma y = -x, the vacuum block relation of the pair (a_2k, a_2k+1).
  Eigen::MatrixXd o(2 * l, 2 * l);
  for (int k = 0; k < l; ++k) {
    const Eigen::VectorXcd v = es.eigenvectors().col(l + k);
    o.col(2 * k) = std::sqrt(2.0) * v.real();
    o.col(2 * k + 1) = std::sqrt(2.0) * v.imag();
  }
  bool odd = false;
  if (o.determinant() < 0.0) {
    o.col(2 * l - 1) *= -1.0;
    odd = true;
  }
  QuadraticGenerator gen = generator_from_rotation(o);
  gen.odd = odd;
  return gen;
}

Eigen::MatrixXcd QuadraticGenerator::m() const {
  const auto l = g.rows() / 2;
  Eigen::MatrixXcd out(l, l);
  for (Eigen::Index p = 0; p < l; ++p) {
    for (Eigen::Index q = 0; q < l; ++q) {
      const double a = g(2 * p, 2 * q);
      const double b = g(2 * p, 2 * q + 1);
      const double c = g(2 * p + 1, 2 * q);
      const double d = g(2 * p + 1, 2 * q + 1);
      out(p, q) = kI * 0.5 * cplx(a + d, c - b);
    }
  }
  return out;
}

Eigen::MatrixXcd QuadraticGenerator::delta() const {
  const auto l = g.rows() / 2;
  Eigen::MatrixXcd out(l, l);
  for (Eigen::Index p = 0; p < l; ++p) {
    for (Eigen::Index q = 0; q < l; ++q) {
      const double a = g(2 * p, 2 * q);
      const double b = g(2 * p, 2 * q + 1);
      const double c = g(2 * p + 1, 2 * q);
      const double d = g(2 * p + 1, 2 * q + 1);
      out(p, q) = kI * 0.5 * cplx(a - d, b + c);
    }
  }
  return out;
}

SpinOperator QuadraticGenerator::hermitian_generator() const {
  const auto n = g.rows();
  std::vector<PauliString> maj;
  for (Eigen::Index k = 0; k < n; ++k) maj.push_back(majorana_string(static_cast<int>(k)));
  SpinOperator h;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index m = k + 1; m < n; ++m) {
      if (g(k, m) == 0.0) continue;
      h.add(pauli_product(maj[static_cast<std::size_t>(k)], maj[static_cast<std::size_t>(m)]), 0.5 * kI * g(k, m));
    }
  }
  h.prune();
  return h;
}

FermionOperator QuadraticGenerator::ladder_generator() const {
  const Eigen::MatrixXcd mm = m();
  const Eigen::MatrixXcd dd = delta();
  FermionOperator f;
  const auto l = mm.rows();
  for (Eigen::Index p = 0; p < l; ++p) {
    for (Eigen::Index q = 0; q < l; ++q) {
      const int ip = static_cast<int>(p);
      const int iq = static_cast<int>(q);
      f.add({LadderOp{ip, true}, LadderOp{iq, false}}, mm(p, q));
      if (p != q) {
        f.add({LadderOp{ip, true}, LadderOp{iq, true}}, 0.5 * dd(p, q));
        f.add({LadderOp{iq, false}, LadderOp{ip, false}}, 0.5 * std::conj(dd(p, q)));
      }
    }
  }
  f.prune();
  return f;
}

StateVector slater_determinant(const Eigen::MatrixXcd& orbitals, int n_modes) {
  if (orbitals.rows() != n_modes) throw std::invalid_argument("slater_determinant: orbital rows must equal mode count");
  if (n_modes > 26) throw std::invalid_argument("slater_determinant: register too large");
  const auto n_el = orbitals.cols();
  const Eigen::MatrixXcd gram = orbitals.adjoint() * orbitals;
  if (n_el > 0 && (gram - Eigen::MatrixXcd::Identity(n_el, n_el)).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("slater_determinant: orbitals are not orthonormal");
  }
  StateVector psi(n_modes);
  Eigen::VectorXcd next(psi.amplitudes.size());
  for (Eigen::Index k = n_el - 1; k >= 0; --k) {
    next.setZero();
    for (Index i = 0; i < psi.dim(); ++i) {
      const cplx a = psi.amplitudes[static_cast<Eigen::Index>(i)];
      if (a == cplx(0.0)) continue;
      for (int p = 0; p < n_modes; ++p) {
        const Index b = Index{1} << p;
        if (i & b) continue;
        const cplx c = orbitals(p, k);
        if (c == cplx(0.0)) continue;
        const double sign = (std::popcount(i & (b - 1)) % 2 == 0) ? 1.0 : -1.0;
        next[static_cast<Eigen::Index>(i | b)] += sign * c * a;
      }
    }
    psi.amplitudes.swap(next);
  }
  return psi;
}

StateVector synthesize_fgs_state(const CovarianceMatrix& cov) {
  const CovarianceMatrix c = cov.to_interleaved();
  if (!c.is_pure()) throw std::invalid_argument("synthesize_fgs_state: covariance is not pure");
  const int l = c.n_modes();
  if (is_number_conserving(c, 1e-8)) {
    const Eigen::MatrixXcd rho = one_body_density(c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.transpose());
    int n_el = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()[i] > 0.5) ++n_el;
    }
    const Eigen::MatrixXcd orb = es.eigenvectors().rightCols(n_el);
    return slater_determinant(orb, l);
  }
  if (l > 14) throw std::invalid_argument("synthesize_fgs_state: at most 14 modes for states with pairing");
  const QuadraticGenerator gen = gaussian_generator(c);
  const StateVector ref = StateVector::basis(l, gen.odd ? (Index{1} << (l - 1)) : Index{0});
  return apply_exp_hermitian(gen.hermitian_generator(), cplx(0.0, -1.0), ref).state;
}

}  // namespace qitelab
