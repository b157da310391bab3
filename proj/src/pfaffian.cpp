// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include "qitelab/fgs.hpp"

namespace qitelab {

double pfaffian(const Eigen::MatrixXd& in) {
  if (in.rows() != in.cols()) throw std::invalid_argument("pfaffian: matrix is not square");
  const Eigen::Index n = in.rows();
  if (n % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
  if (n == 0) return 1.0;
  Eigen::MatrixXd a = 0.5 * (in - in.transpose());
  double pf = 1.0;
  for (Eigen::Index k = 0; k < n - 1; k += 2) {
    Eigen::Index kp = 0;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == 0.0) return 0.0;
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index m = n - k - 2;
      const Eigen::VectorXd tau = a.row(k).tail(m).transpose() / a(k, k + 1);
      const Eigen::VectorXd col = a.col(k + 1).tail(m);
      a.bottomRightCorner(m, m) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

namespace {

Eigen::MatrixXd without(const Eigen::MatrixXd& a, Eigen::Index r, Eigen::Index s) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd out(n - 2, n - 2);
  Eigen::Index oi = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == r || i == s) continue;
    Eigen::Index oj = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == r || j == s) continue;
      out(oi, oj++) = a(i, j);
    }
    ++oi;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd pfaffian_gradient(const Eigen::MatrixXd& in) {
  const Eigen::Index n = in.rows();
  if (in.cols() != n || n % 2 != 0) throw std::invalid_argument("pfaffian_gradient: need even square matrix");
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, n);
  if (n == 0) return grad;
  const Eigen::MatrixXd a = 0.5 * (in - in.transpose());
  if (n > 4) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rcond() > 1e-8) {
      const Eigen::MatrixXd inv = lu.inverse();
      const double pf = pfaffian(a);
      grad = -pf * inv;
      return 0.5 * (grad - grad.transpose());
    }
  }
  // Cofactor expansion: d Pf / d A_rs = (-1)^{r+s+1} Pf(A without rows/cols r, s).
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index s = r + 1; s < n; ++s) {
      const double sign = ((r + s + 1) % 2 == 0) ? 1.0 : -1.0;
      grad(r, s) = sign * pfaffian(without(a, r, s));
      grad(s, r) = -grad(r, s);
    }
  }
  return grad;
}

}  // namespace qitelab
