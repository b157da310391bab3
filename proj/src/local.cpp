// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qitelab/local.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace qitelab {

namespace {

struct SliceLayout {
  std::vector<Index> offset;   // local index -> register bits
  std::vector<Index> below;    // per local mode: register bits below it
  Index rest = 0;              // register bits outside the frame
};

SliceLayout layout(const LocalFrame& f, int n_qubits) {
  SliceLayout L;
  const Index k = Index{1} << f.size();
  L.offset.resize(k);
  for (Index x = 0; x < k; ++x) L.offset[x] = f.deposit(x);
  const Index all = n_qubits >= 64 ? ~Index{0} : (Index{1} << n_qubits) - 1;
  L.rest = all & ~f.mask();
  for (int s : f.sites) L.below.push_back((Index{1} << s) - 1);
  return L;
}

// Bit d set when local mode d picks up a sign from the rest pattern r.
Index sign_mask(const SliceLayout& L, Index r) {
  Index m = 0;
  for (std::size_t d = 0; d < L.below.size(); ++d) {
    if (std::popcount(r & L.below[d]) & 1) m |= Index{1} << d;
  }
  return m;
}

void check_frame(const LocalFrame& f, int n_qubits) {
  for (std::size_t i = 0; i < f.sites.size(); ++i) {
    if (f.sites[i] < 0 || f.sites[i] >= n_qubits) throw std::out_of_range("frame site outside register");
    if (i > 0 && f.sites[i] <= f.sites[i - 1]) throw std::invalid_argument("frame sites must increase");
  }
  if (f.size() > 16) throw std::invalid_argument("frame too large for dense local kernels");
}

}  // namespace

Index LocalFrame::mask() const {
  Index m = 0;
  for (int s : sites) m |= Index{1} << s;
  return m;
}

Index LocalFrame::deposit(Index x) const {
  Index out = 0;
  for (std::size_t l = 0; l < sites.size(); ++l) {
    if ((x >> l) & 1U) out |= Index{1} << sites[l];
  }
  return out;
}

LocalFrame spin_frame(std::vector<int> sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return LocalFrame{sites, false};
}

LocalFrame orbital_frame(std::vector<int> orbitals) {
  std::sort(orbitals.begin(), orbitals.end());
  orbitals.erase(std::unique(orbitals.begin(), orbitals.end()), orbitals.end());
  LocalFrame f;
  f.fermionic = true;
  for (int p : orbitals) {
    f.sites.push_back(2 * p);
    f.sites.push_back(2 * p + 1);
  }
  return f;
}

SpinOperator localize(const SpinOperator& op, const LocalFrame& frame) {
  if (frame.fermionic) throw std::invalid_argument("localize: spin operator on a fermionic frame");
  std::vector<int> map(static_cast<std::size_t>(std::max(0, op.max_site() + 1)), -1);
  for (int l = 0; l < frame.size(); ++l) {
    const int s = frame.sites[static_cast<std::size_t>(l)];
    if (s < static_cast<int>(map.size())) map[static_cast<std::size_t>(s)] = l;
  }
  return op.remap(map);
}

SpinOperator localize(const FermionOperator& op, const LocalFrame& frame) {
  if (!frame.fermionic) throw std::invalid_argument("localize: fermionic operator on a spin frame");
  std::vector<int> map(static_cast<std::size_t>(std::max(0, op.max_mode() + 1)), -1);
  for (int l = 0; l < frame.size(); ++l) {
    const int s = frame.sites[static_cast<std::size_t>(l)];
    if (s < static_cast<int>(map.size())) map[static_cast<std::size_t>(s)] = l;
  }
  return jordan_wigner(op.remap(map), frame.size());
}

Eigen::MatrixXcd reduced_density_matrix(const StateVector& psi, const LocalFrame& frame) {
  check_frame(frame, psi.n_qubits);
  const SliceLayout L = layout(frame, psi.n_qubits);
  const Index k = Index{1} << frame.size();
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(kk, kk);
  std::vector<Index> nz;
  std::vector<cplx> val;
  nz.reserve(k);
  val.reserve(k);
  const auto& a = psi.amplitudes;
  Index r = 0;
  do {
    nz.clear();
    val.clear();
    const Index sm = frame.fermionic ? sign_mask(L, r) : 0;
    for (Index x = 0; x < k; ++x) {
      const cplx v = a[static_cast<Eigen::Index>(r | L.offset[x])];
      if (v == cplx{}) continue;
      nz.push_back(x);
      val.push_back((std::popcount(x & sm) & 1) ? -v : v);
    }
    for (std::size_t i = 0; i < nz.size(); ++i) {
      for (std::size_t j = 0; j < nz.size(); ++j) {
        rho(static_cast<Eigen::Index>(nz[i]), static_cast<Eigen::Index>(nz[j])) += val[i] * std::conj(val[j]);
      }
    }
    r = (r - L.rest) & L.rest;
  } while (r != 0);
  return rho;
}

void apply_local(StateVector& psi, const LocalFrame& frame, const Eigen::MatrixXcd& m) {
  check_frame(frame, psi.n_qubits);
  const Index k = Index{1} << frame.size();
  if (m.rows() != static_cast<Eigen::Index>(k) || m.cols() != static_cast<Eigen::Index>(k)) {
    throw std::invalid_argument("apply_local: matrix size does not match frame");
  }
  const SliceLayout L = layout(frame, psi.n_qubits);
  auto& a = psi.amplitudes;
  std::vector<Index> nz;
  std::vector<cplx> val;
  std::vector<cplx> out(k);
  Index r = 0;
  do {
    nz.clear();
    val.clear();
    const Index sm = frame.fermionic ? sign_mask(L, r) : 0;
    for (Index x = 0; x < k; ++x) {
      const cplx v = a[static_cast<Eigen::Index>(r | L.offset[x])];
      if (v == cplx{}) continue;
      nz.push_back(x);
      val.push_back((std::popcount(x & sm) & 1) ? -v : v);
    }
    if (!nz.empty()) {
      std::fill(out.begin(), out.end(), cplx{});
      for (std::size_t j = 0; j < nz.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(nz[j]);
        const cplx v = val[j];
        for (Index x = 0; x < k; ++x) {
          const cplx mx = m(static_cast<Eigen::Index>(x), col);
          if (mx != cplx{}) out[x] += mx * v;
        }
      }
      for (Index x = 0; x < k; ++x) {
        const cplx v = (std::popcount(x & sm) & 1) ? -out[x] : out[x];
        a[static_cast<Eigen::Index>(r | L.offset[x])] = v;
      }
    }
    r = (r - L.rest) & L.rest;
  } while (r != 0);
}

Eigen::MatrixXcd expm_taylor(const Eigen::MatrixXcd& m, cplx scale, double tol) {
  const Eigen::Index n = m.rows();
  const Eigen::MatrixXcd a = m * scale;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Eigen::MatrixXcd b = a / std::ldexp(1.0, squarings);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd term = sum;
  bool converged = false;
  for (int k = 1; k <= 128; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw std::runtime_error("expm_taylor: series did not converge");
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace qitelab
