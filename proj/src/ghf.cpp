// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qitelab/fgs.hpp"
#include "qitelab/random.hpp"

namespace qitelab {

namespace {

constexpr cplx kI{0.0, 1.0};

// Real part of scale * U sgn(D) U^dagger for the Hermitian matrix i*m.
Eigen::MatrixXd signed_projection(const Eigen::MatrixXd& m, cplx scale, bool* degenerate) {
  const Eigen::MatrixXcd h = kI * m.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed in sign projection");
  Eigen::VectorXd s(es.eigenvalues().size());
  bool deg = false;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double d = es.eigenvalues()[i];
    if (std::abs(d) < 1e-12) deg = true;
    s[i] = d < 0.0 && std::abs(d) >= 1e-12 ? -1.0 : 1.0;
  }
  if (degenerate != nullptr) *degenerate = deg;
  const Eigen::MatrixXcd p = es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::MatrixXd out = (scale * p).real();
  return 0.5 * (out - out.transpose());
}

// Mean-field one-body matrix h with (i/4) a^T F a = sum h_pq c+_p c_q + const,
// for F without pairing blocks.
Eigen::MatrixXcd one_body_hamiltonian(const Eigen::MatrixXd& f) {
  const auto l = f.rows() / 2;
  Eigen::MatrixXcd h(l, l);
  for (Eigen::Index p = 0; p < l; ++p) {
    for (Eigen::Index q = 0; q < l; ++q) {
      const double a = f(2 * p, 2 * q);
      const double b = f(2 * p, 2 * q + 1);
      const double c = f(2 * p + 1, 2 * q);
      const double d = f(2 * p + 1, 2 * q + 1);
      h(p, q) = kI * 0.5 * cplx(a + d, c - b);
    }
  }
  return 0.5 * (h + h.adjoint());
}

// Lowest-n_particles filling of the mean-field orbitals.
CovarianceMatrix aufbau_update(const Eigen::MatrixXd& f, int n_particles, bool* degenerate) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(one_body_hamiltonian(f));
  const auto& eps = es.eigenvalues();
  if (degenerate != nullptr) {
    *degenerate = n_particles > 0 && n_particles < eps.size() &&
                  std::abs(eps[n_particles] - eps[n_particles - 1]) < 1e-12;
  }
  const Eigen::MatrixXcd c = es.eigenvectors().leftCols(n_particles);
  return covariance_from_density(c.conjugate() * c.transpose());
}

double commutator_norm(const Eigen::MatrixXd& g, const Eigen::MatrixXd& f) {
  return (g * f - f * g).cwiseAbs().maxCoeff();
}

struct RunOutcome {
  CovarianceMatrix gamma;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
  std::vector<double> energies;
  double max_purity = 0.0;
};

RunOutcome run_once(const MajoranaPolynomialEnergy& e, const GhfConfig& cfg, int n_particles, Rng& rng) {
  const int l = e.n_modes();
  RunOutcome out;
  CovarianceMatrix gamma = cfg.number_conserving ? random_slater_covariance(l, n_particles, rng)
                                                 : random_pure_covariance(l, rng);
  Eigen::MatrixXd f;
  double energy = ghf_energy_and_gradient(gamma, e, &f);

  // Warm-up: self-consistent fixed point iteration, keeping the lowest energy seen.
  CovarianceMatrix best = gamma;
  double best_energy = energy;
  Eigen::MatrixXd best_f = f;
  for (int it = 0; it < cfg.warmup_iterations; ++it) {
    bool deg = false;
    const Eigen::MatrixXd ff = cfg.number_conserving ? project_number_conserving(f) : f;
    CovarianceMatrix next = cfg.number_conserving ? aufbau_update(ff, n_particles, &deg) : self_consistent_update(ff, &deg);
    out.degenerate = out.degenerate || deg;
    const double change = (next.gamma - gamma.gamma).cwiseAbs().maxCoeff();
    gamma = next;
    energy = ghf_energy_and_gradient(gamma, e, &f);
    if (energy < best_energy) {
      best = gamma;
      best_energy = energy;
      best_f = f;
    }
    if (change < cfg.warmup_tolerance) break;
  }
  gamma = best;
  energy = best_energy;
  f = best_f;

  out.energies.push_back(energy);
  out.max_purity = gamma.purity_residual();
  double step = cfg.flow_step;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    if (cfg.number_conserving) f = project_number_conserving(f);
    const Eigen::MatrixXd comm = gamma.gamma * f - f * gamma.gamma;
    if (comm.cwiseAbs().maxCoeff() < cfg.tolerance) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd dgamma = 0.5 * (gamma.gamma * comm - comm * gamma.gamma);
    bool accepted = false;
    while (step > 1e-12) {
      Eigen::MatrixXd trial = gamma.gamma + step * dgamma;
      if (cfg.number_conserving) trial = project_number_conserving(trial);
      CovarianceMatrix tc(project_pure(trial));
      Eigen::MatrixXd tf;
      const double te = ghf_energy_and_gradient(tc, e, &tf);
      if (te <= energy + 1e-12) {
        gamma = tc;
        energy = te;
        f = tf;
        out.energies.push_back(te);
        out.max_purity = std::max(out.max_purity, tc.purity_residual());
        accepted = true;
        step = std::min(cfg.flow_step, 2.0 * step);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = commutator_norm(gamma.gamma, f) < cfg.tolerance;
      break;
    }
  }
  out.gamma = gamma;
  out.energy = energy;
  out.iterations = it;
  return out;
}

}  // namespace

CovarianceMatrix self_consistent_update(const Eigen::MatrixXd& f, bool* degenerate) {
  return CovarianceMatrix(signed_projection(f, kI, degenerate));
}

Eigen::MatrixXd project_pure(const Eigen::MatrixXd& gamma) { return signed_projection(gamma, -kI, nullptr); }

Eigen::MatrixXd project_number_conserving(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  const auto l = m.rows() / 2;
  for (Eigen::Index p = 0; p < l; ++p) {
    for (Eigen::Index q = 0; q < l; ++q) {
      const double x = 0.5 * (m(2 * p, 2 * q) + m(2 * p + 1, 2 * q + 1));
      const double y = 0.5 * (m(2 * p, 2 * q + 1) - m(2 * p + 1, 2 * q));
      out(2 * p, 2 * q) = x;
      out(2 * p + 1, 2 * q + 1) = x;
      out(2 * p, 2 * q + 1) = y;
      out(2 * p + 1, 2 * q) = -y;
    }
  }
  return out;
}

GhfResult ghf_minimize(const MajoranaPolynomialEnergy& e, const GhfConfig& cfg) {
  if (e.n_modes() < 1) throw std::invalid_argument("ghf_minimize: empty system");
  if (cfg.restarts < 1) throw std::invalid_argument("ghf_minimize: need at least one restart");
  if (cfg.flow_step <= 0.0) throw std::invalid_argument("ghf_minimize: flow step must be positive");
  const int n_particles = cfg.n_particles >= 0 ? cfg.n_particles : e.n_modes() / 2;
  if (cfg.number_conserving && n_particles > e.n_modes()) throw std::invalid_argument("ghf_minimize: too many particles");
  GhfResult result;
  result.energy = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(cfg.seed + 1000003ULL * static_cast<std::uint64_t>(r));
    RunOutcome o = run_once(e, cfg, n_particles, rng);
    result.history.push_back(GhfRestart{r, o.iterations, o.energy, o.gamma.purity_residual(), o.converged});
    if (o.energy < result.energy) {
      result.energy = o.energy;
      result.gamma = o.gamma;
      result.converged = o.converged;
      result.iterations = o.iterations;
      result.degenerate_spectrum = o.degenerate;
      result.flow_energies = std::move(o.energies);
      result.max_purity_residual = o.max_purity;
    }
  }
  result.parity = result.gamma.parity();
  return result;
}

std::string ghf_summary_csv(const GhfResult& r) {
  std::ostringstream out;
  out << "restart,iterations,energy,purity_residual,converged\n";
  char buf[160];
  for (const auto& h : r.history) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.12f,%.3e,%d\n", h.restart, h.iterations, h.energy, h.purity_residual,
                  h.converged ? 1 : 0);
    out << buf;
  }
  return out.str();
}

}  // namespace qitelab
