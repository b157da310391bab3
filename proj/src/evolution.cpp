// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qitelab/evolution.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qitelab/diagnostics.hpp"
#include "qitelab/local.hpp"

namespace qitelab {

void EvolutionTrace::add(const TraceRow& row) {
  if (!rows_.empty() && !(row.tau > rows_.back().tau)) throw std::invalid_argument("trace: tau must increase strictly");
  if (!std::isfinite(row.energy)) throw std::invalid_argument("trace: energy is not finite");
  if (row.fidelity && (*row.fidelity < 0.0 || *row.fidelity > 1.0 + 1e-12)) {
    throw std::invalid_argument("trace: fidelity outside [0, 1]");
  }
  rows_.push_back(row);
}

std::string EvolutionTrace::to_csv() const {
  std::ostringstream out;
  out << "# qitelab trace v1\n";
  out << "tau,energy,fidelity,c_norm,residual\n";
  char buf[64];
  auto opt = [&](const std::optional<double>& v) {
    if (!v) return std::string();
    std::snprintf(buf, sizeof(buf), "%.12g", *v);
    return std::string(buf);
  };
  for (const auto& r : rows_) {
    std::snprintf(buf, sizeof(buf), "%.10g", r.tau);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.12f", r.energy);
    out << buf << ",";
    out << opt(r.fidelity) << "," << opt(r.c_norm) << "," << opt(r.residual) << "\n";
  }
  return out.str();
}

namespace {

double energy_of(const CompiledOperator& op, const StateVector& psi) {
  Eigen::VectorXcd hpsi(psi.amplitudes.size());
  op.apply(psi.amplitudes, hpsi);
  return psi.amplitudes.dot(hpsi).real() / psi.amplitudes.squaredNorm();
}

std::optional<double> fidelity_to(const std::optional<StateVector>& ref, const StateVector& psi) {
  if (!ref) return std::nullopt;
  return fidelity(*ref, psi);
}

// One Lanczos approximation of e^{-dt H} v (unnormalized direction). Returns
// false if the error estimate exceeds tol.
bool krylov_step(const CompiledOperator& op, Eigen::VectorXcd& v, double dt, int m_max, double tol) {
  const auto dim = v.size();
  const int m_cap = static_cast<int>(std::min<Eigen::Index>(m_max, dim));
  Eigen::MatrixXcd basis(dim, m_cap);
  std::vector<double> alpha;
  std::vector<double> beta;
  const double nrm = v.norm();
  basis.col(0) = v / nrm;
  Eigen::VectorXcd w(dim);
  int m = 0;
  double last_beta = 0.0;
  for (int j = 0; j < m_cap; ++j) {
    op.apply(Eigen::VectorXcd(basis.col(j)), w);
    const double a = basis.col(j).dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
    m = j + 1;
    last_beta = w.norm();
    if (last_beta < 1e-13 || j + 1 == m_cap) break;
    beta.push_back(last_beta);
    basis.col(j + 1) = w / last_beta;
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
  for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const double shift = es.eigenvalues()[0];
  Eigen::VectorXd y = es.eigenvectors() * ((-(es.eigenvalues().array() - shift) * dt).exp() * es.eigenvectors().row(0).transpose().array()).matrix();
  const bool breakdown = last_beta < 1e-13;
  if (!breakdown && last_beta * std::abs(y[m - 1]) > tol * y.norm()) return false;
  v = basis.leftCols(m) * y.cast<cplx>();
  v /= v.norm();
  return true;
}

}  // namespace

EvolutionResult exact_ite(const SpinOperator& h, const StateVector& psi, double tau_max,
                          const std::optional<StateVector>& reference, const ExactIteConfig& cfg) {
  if (!h.is_hermitian()) throw std::invalid_argument("exact_ite: operator is not Hermitian");
  if (h.max_site() >= psi.n_qubits) throw std::invalid_argument("exact_ite: operator exceeds register");
  if (tau_max < 0.0 || cfg.record_every <= 0.0) throw std::invalid_argument("exact_ite: bad time grid");
  if (psi.n_qubits > 26) throw std::invalid_argument("exact_ite: register too large");
  const CompiledOperator op(h);
  EvolutionResult out;
  StateVector cur = psi;
  cur.normalize();
  out.trace.add(TraceRow{0.0, energy_of(op, cur), fidelity_to(reference, cur), std::nullopt, std::nullopt});
  const int n_rec = static_cast<int>(std::ceil(tau_max / cfg.record_every - 1e-9));
  auto tau_at = [&](int k) { return std::min(tau_max, k * cfg.record_every); };

  if (psi.n_qubits <= cfg.dense_max_qubits) {
    const Eigen::MatrixXcd m = to_matrix(h, psi.n_qubits);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("exact_ite: eigensolver failed");
    const Eigen::VectorXcd coeff = es.eigenvectors().adjoint() * cur.amplitudes;
    const Eigen::ArrayXd shifted = es.eigenvalues().array() - es.eigenvalues()[0];
    for (int k = 1; k <= n_rec; ++k) {
      const double tau = tau_at(k);
      const Eigen::VectorXcd c = ((-tau * shifted).exp().cast<cplx>() * coeff.array()).matrix();
      StateVector s(psi.n_qubits, es.eigenvectors() * c);
      const double nrm = s.norm();
      s.normalize();
      out.trace.add(TraceRow{tau, energy_of(op, s), fidelity_to(reference, s), nrm, std::nullopt});
      cur = s;
    }
    out.state = cur;
    return out;
  }

  double dt = cfg.record_every;
  for (int k = 1; k <= n_rec; ++k) {
    double t = tau_at(k - 1);
    const double target = tau_at(k);
    while (t < target - 1e-15) {
      const double step = std::min(dt, target - t);
      if (krylov_step(op, cur.amplitudes, step, cfg.krylov_dim, cfg.krylov_tol)) {
        t += step;
      } else {
        dt = 0.5 * step;
        if (dt < 1e-8) throw std::runtime_error("exact_ite: Krylov step size underflow");
      }
    }
    out.trace.add(TraceRow{target, energy_of(op, cur), fidelity_to(reference, cur), std::nullopt, std::nullopt});
  }
  out.state = cur;
  return out;
}

EvolutionResult trotterized_ite(const ProblemHamiltonian& h, const TrotterSchedule& schedule, const StateVector& psi,
                                const std::optional<StateVector>& reference) {
  if (psi.n_qubits != h.n_qubits) throw std::invalid_argument("trotterized_ite: state does not match the register");
  struct LocalTerm {
    LocalFrame frame;
    Eigen::MatrixXcd m;
  };
  std::vector<LocalTerm> local;
  for (const auto& term : h.terms) {
    LocalTerm lt;
    if (h.kind == SystemKind::Fermionic) {
      lt.frame = orbital_frame(term.support);
      lt.m = to_matrix(localize(term.fermion, lt.frame), lt.frame.size());
    } else {
      lt.frame = spin_frame(term.support);
      lt.m = to_matrix(localize(term.spin, lt.frame), lt.frame.size());
    }
    local.push_back(std::move(lt));
  }
  for (const auto& st : schedule.per_step) {
    if (st.term < 0 || st.term >= static_cast<int>(local.size())) throw std::invalid_argument("trotterized_ite: schedule does not match H");
  }
  std::map<std::pair<int, double>, Eigen::MatrixXcd> cache;
  const CompiledOperator op(h.total());
  EvolutionResult out;
  StateVector cur = psi;
  cur.normalize();
  out.trace.add(TraceRow{0.0, energy_of(op, cur), fidelity_to(reference, cur), std::nullopt, std::nullopt});
  for (int s = 0; s < schedule.n_steps; ++s) {
    double c_norm = 1.0;
    for (const auto& st : schedule.per_step) {
      const auto key = std::make_pair(st.term, st.fraction);
      auto it = cache.find(key);
      if (it == cache.end()) {
        const auto& lt = local[static_cast<std::size_t>(st.term)];
        it = cache.emplace(key, expm_taylor(lt.m, cplx(-schedule.dtau * st.fraction, 0.0))).first;
      }
      apply_local(cur, local[static_cast<std::size_t>(st.term)].frame, it->second);
      const double nrm = cur.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) throw std::runtime_error("trotterized_ite: state norm vanished");
      c_norm *= nrm;
      cur.amplitudes /= nrm;
    }
    out.trace.add(TraceRow{(s + 1) * schedule.dtau, energy_of(op, cur), fidelity_to(reference, cur), c_norm, std::nullopt});
  }
  out.state = cur;
  return out;
}

double estimate_tau_eta(double gap, double gamma_init, double eta) {
  if (!(gap > 0.0)) throw std::invalid_argument("estimate_tau_eta: gap must be positive");
  if (!(gamma_init > 0.0 && gamma_init <= 1.0)) throw std::invalid_argument("estimate_tau_eta: overlap must be in (0, 1]");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("estimate_tau_eta: precision must be in (0, 1]");
  return std::log(1.0 / (gamma_init * eta)) / gap;
}

}  // namespace qitelab
