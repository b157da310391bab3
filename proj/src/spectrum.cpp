// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qitelab/diagnostics.hpp"
#include "qitelab/random.hpp"

namespace qitelab {

namespace {

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense_matrix(const CompiledOperator& op, Index dim) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Vec e = Vec::Zero(static_cast<Eigen::Index>(dim));
  Vec col(static_cast<Eigen::Index>(dim));
  for (Index i = 0; i < dim; ++i) {
    e.setZero();
    e[static_cast<Eigen::Index>(i)] = Scalar(1);
    op.apply(e, col);
    m.col(static_cast<Eigen::Index>(i)) = col;
  }
  return m;
}

template <class Scalar>
SpectrumResult dense_spectrum(const CompiledOperator& op, int n, const SpectrumConfig& cfg) {
  const Index dim = Index{1} << n;
  std::vector<Eigen::Index> keep;
  for (Index i = 0; i < dim; ++i) {
    if (!cfg.sector || cfg.sector(i)) keep.push_back(static_cast<Eigen::Index>(i));
  }
  if (keep.empty()) throw std::invalid_argument("spectrum: empty sector");
  const auto full = dense_matrix<Scalar>(op, dim);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m = full(keep, keep);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  SpectrumResult r;
  r.method = "dense";
  const int k = std::min<int>(std::max(cfg.k, 2), static_cast<int>(keep.size()));
  for (int i = 0; i < k; ++i) r.energies.push_back(es.eigenvalues()[i]);
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  g(keep) = es.eigenvectors().col(0).template cast<cplx>();
  r.ground = StateVector(n, g);
  for (int i = 0; i < k; ++i) {
    r.residuals.push_back((m * es.eigenvectors().col(i) - es.eigenvalues()[i] * es.eigenvectors().col(i)).norm());
  }
  return r;
}

// Thick-restart Lanczos with full reorthogonalization. The projected matrix
// T = V^H H V is filled explicitly, so restarts with Ritz vectors need no
// special bookkeeping; the residual of Ritz pair i is beta * |s_{last,i}|.
template <class Scalar>
SpectrumResult lanczos_spectrum(const CompiledOperator& op, int n, const SpectrumConfig& cfg) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto dim = static_cast<Eigen::Index>(Index{1} << n);
  const int k = std::max(cfg.k, 2);
  const int m = std::max(cfg.basis_size, 2 * k + 4);
  Mat v(dim, m);
  Mat t = Mat::Zero(m, m);
  Rng rng(cfg.seed);
  Vec start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      start[i] = rng.normal();
    } else {
      start[i] = Scalar(rng.normal(), rng.normal());
    }
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mask = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(dim);
  if (cfg.sector) {
    for (Eigen::Index i = 0; i < dim; ++i) mask[i] = cfg.sector(static_cast<Index>(i)) ? Scalar(1) : Scalar(0);
    start = start.cwiseProduct(mask);
  }
  if (start.norm() == 0.0) throw std::invalid_argument("spectrum: empty sector");
  v.col(0) = start / start.norm();
  int nv = 1;
  Vec w(dim);
  Vec resid(dim);
  double beta = 0.0;
  SpectrumResult r;
  r.method = "lanczos";
  for (int restart = 0; restart <= cfg.max_restarts; ++restart) {
    while (true) {
      const int j = nv - 1;
      op.apply(Vec(v.col(j)), w);
      ++r.matvecs;
      if (cfg.sector) w = w.cwiseProduct(mask);
      Vec c = v.leftCols(nv).adjoint() * w;
      w -= v.leftCols(nv) * c;
      const Vec c2 = v.leftCols(nv).adjoint() * w;
      w -= v.leftCols(nv) * c2;
      c += c2;
      for (int i = 0; i < nv; ++i) {
        t(i, j) = c[i];
        t(j, i) = Eigen::numext::conj(c[i]);
      }
      t(j, j) = Scalar(Eigen::numext::real(c[j]));
      beta = w.norm();
      if (nv == m || beta < 1e-13) {
        resid = w;
        break;
      }
      v.col(nv) = w / beta;
      ++nv;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(t.topLeftCorner(nv, nv));
    const auto& theta = es.eigenvalues();
    const Mat& s = es.eigenvectors();
    const int want = std::min(k, nv);
    bool converged = true;
    std::vector<double> res(static_cast<std::size_t>(want));
    for (int i = 0; i < want; ++i) {
      res[static_cast<std::size_t>(i)] = beta * std::abs(s(nv - 1, i));
      if (res[static_cast<std::size_t>(i)] > cfg.tol * std::max(1.0, std::abs(theta[i]))) converged = false;
    }
    if (converged && want == k) {
      for (int i = 0; i < k; ++i) r.energies.push_back(theta[i]);
      r.residuals = res;
      Vec g = v.leftCols(nv) * s.col(0);
      g /= g.norm();
      r.ground = StateVector(n, g.template cast<cplx>());
      return r;
    }
    if (beta < 1e-13) {
      // Invariant subspace without enough levels: continue from a fresh
      // random direction orthogonal to the basis.
      for (Eigen::Index i = 0; i < dim; ++i) {
        if constexpr (std::is_same_v<Scalar, double>) {
          resid[i] = rng.normal();
        } else {
          resid[i] = Scalar(rng.normal(), rng.normal());
        }
      }
      if (cfg.sector) resid = resid.cwiseProduct(mask);
      for (int pass = 0; pass < 2; ++pass) resid -= v.leftCols(nv) * (v.leftCols(nv).adjoint() * resid);
      beta = resid.norm();
    }
    const int keep = std::min(nv - 1, std::max(k + 2, m / 2));
    Mat y = v.leftCols(nv) * s.leftCols(keep);
    v.leftCols(keep) = y;
    t.setZero();
    for (int i = 0; i < keep; ++i) t(i, i) = Scalar(theta[i]);
    v.col(keep) = resid / beta;
    nv = keep + 1;
    // Coupling of the restart vector to the kept Ritz vectors is recomputed
    // when it is expanded.
  }
  std::ostringstream msg;
  msg << "Lanczos did not converge after " << cfg.max_restarts << " restarts (residual " << beta << ")";
  throw std::runtime_error(msg.str());
}

}  // namespace

SpectrumResult spectrum(const SpinOperator& h, int n_qubits, const SpectrumConfig& cfg) {
  if (!h.is_hermitian()) throw std::invalid_argument("spectrum: operator is not Hermitian");
  if (h.max_site() >= n_qubits) throw std::invalid_argument("spectrum: operator exceeds register");
  if (n_qubits > 24) throw std::invalid_argument("spectrum: register too large");
  const CompiledOperator op(h);
  SpectrumResult r;
  const bool dense = n_qubits <= cfg.dense_max_qubits || (Index{1} << n_qubits) <= Index(4 * cfg.basis_size);
  if (dense) {
    r = op.is_real() ? dense_spectrum<double>(op, n_qubits, cfg) : dense_spectrum<cplx>(op, n_qubits, cfg);
  } else {
    r = op.is_real() ? lanczos_spectrum<double>(op, n_qubits, cfg) : lanczos_spectrum<cplx>(op, n_qubits, cfg);
  }
  r.degenerate_ground = r.energies.size() > 1 && r.energies[1] - r.energies[0] < 1e-10;
  return r;
}

}  // namespace qitelab
