// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qitelab/qite.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "qitelab/diagnostics.hpp"

namespace qitelab {

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::ConjugateGradient: return "cg";
    case SolverMethod::TruncatedSvd: return "svd";
    case SolverMethod::ClosedForm: return "closed-form";
  }
  return "?";
}

SolverMethod solver_method_from_string(const std::string& s) {
  if (s == "cg") return SolverMethod::ConjugateGradient;
  if (s == "svd" || s == "truncated-svd") return SolverMethod::TruncatedSvd;
  if (s == "closed-form") return SolverMethod::ClosedForm;
  throw std::invalid_argument("unknown solver '" + s + "' (cg | svd | closed-form)");
}

namespace {

constexpr cplx kI{0.0, 1.0};

struct KeyHash {
  std::size_t operator()(const PauliKey& k) const { return std::hash<Index>()(k.x * 0x9E3779B97F4A7C15ULL ^ k.z); }
};

// Pauli-basis system from a string-expectation oracle with memoization.
template <class Expect>
LinearSystem pauli_system(const std::vector<PauliString>& basis, const SpinOperator& h, Expect&& expect, long* count) {
  std::unordered_map<PauliKey, cplx, KeyHash> cache;
  auto value = [&](const PauliString& s) {
    const PauliKey key{s.x, s.z};
    auto it = cache.find(key);
    if (it == cache.end()) {
      PauliString bare = s;
      bare.phase = 1.0;
      // The state is normalized, so the identity is exactly 1.
      it = cache.emplace(key, key == PauliKey{} ? cplx(1.0, 0.0) : expect(bare)).first;
    }
    return s.phase * it->second;
  };
  const auto n = static_cast<Eigen::Index>(basis.size());
  LinearSystem sys;
  sys.s.resize(n, n);
  sys.b.resize(n);
  const auto terms = h.terms();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = 2.0 * value(pauli_product(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)])).real();
      sys.s(i, j) = v;
      sys.s(j, i) = v;
    }
    cplx sh{};
    for (const auto& [c, t] : terms) sh += c * value(pauli_product(basis[static_cast<std::size_t>(i)], t));
    sys.b[i] = -2.0 * sh.imag();
  }
  if (count != nullptr) *count = static_cast<long>(cache.size());
  return sys;
}

// tr(rho s) for a Pauli string on the frame qubits.
cplx pauli_trace(const Eigen::MatrixXcd& rho, const PauliString& s) {
  const cplx base = s.phase * std::pow(kI, std::popcount(s.x & s.z));
  cplx acc{};
  for (Index a = 0; a < static_cast<Index>(rho.rows()); ++a) {
    const cplx v = rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a ^ s.x));
    acc += (std::popcount(a & s.z) & 1) ? -v : v;
  }
  return base * acc;
}

Eigen::SparseMatrix<cplx> sparse_matrix(const SpinOperator& op, int n_qubits) {
  const Eigen::MatrixXcd m = to_matrix(op, n_qubits);
  return m.sparseView();
}

double energy_of(const CompiledOperator& op, const StateVector& psi) {
  Eigen::VectorXcd hpsi(psi.amplitudes.size());
  op.apply(psi.amplitudes, hpsi);
  return psi.amplitudes.dot(hpsi).real() / psi.amplitudes.squaredNorm();
}

Solution pseudo_inverse(const LinearSystem& sys, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sys.s + sys.s.transpose()));
  if (es.info() != Eigen::Success) throw std::runtime_error("solve_for_a: eigensolver failed");
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    const double l = es.eigenvalues()[i];
    if (top > 0.0 && l > cutoff * top) inv[i] = 1.0 / l;
  }
  Solution out;
  out.a = es.eigenvectors() * inv.asDiagonal() * (es.eigenvectors().transpose() * (-sys.b));
  out.residual = (sys.s * out.a + sys.b).norm();
  return out;
}

}  // namespace

LinearSystem build_linear_system(const std::vector<PauliString>& basis, const SpinOperator& h, const StateVector& psi,
                                 long* expectation_count) {
  for (const auto& s : basis) {
    if (s.phase != cplx(1.0, 0.0)) throw std::invalid_argument("build_linear_system: basis strings must be Hermitian");
  }
  return pauli_system(basis, h, [&](const PauliString& s) { return expectation(s, psi); }, expectation_count);
}

LinearSystem build_linear_system(const std::vector<SpinOperator>& basis, const SpinOperator& h,
                                 const StateVector& psi) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::VectorXcd> v;
  for (const auto& op : basis) {
    if (!op.is_hermitian()) throw std::invalid_argument("build_linear_system: basis operator is not Hermitian");
    v.push_back(apply_operator(op, psi).amplitudes);
  }
  const Eigen::VectorXcd hpsi = apply_operator(h, psi).amplitudes;
  LinearSystem sys;
  sys.s.resize(n, n);
  sys.b.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double x = 2.0 * v[static_cast<std::size_t>(i)].dot(v[static_cast<std::size_t>(j)]).real();
      sys.s(i, j) = x;
      sys.s(j, i) = x;
    }
    sys.b[i] = -2.0 * v[static_cast<std::size_t>(i)].dot(hpsi).imag();
  }
  return sys;
}

LinearSystem build_linear_system(const std::vector<Eigen::SparseMatrix<cplx>>& basis,
                                 const Eigen::SparseMatrix<cplx>& h, const Eigen::MatrixXcd& rho) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  // tr(X B) = sum over the non-zeros B(r, c) of X(c, r).
  auto trace_with = [](const Eigen::MatrixXcd& x, const Eigen::SparseMatrix<cplx>& b) {
    cplx acc{};
    for (Eigen::Index k = 0; k < b.outerSize(); ++k) {
      for (Eigen::SparseMatrix<cplx>::InnerIterator it(b, k); it; ++it) acc += x(it.col(), it.row()) * it.value();
    }
    return acc;
  };
  std::vector<Eigen::MatrixXcd> x;
  for (const auto& b : basis) {
    if (b.rows() != rho.rows() || b.cols() != rho.cols()) throw std::invalid_argument("build_linear_system: size mismatch");
    x.push_back(rho * b);
  }
  LinearSystem sys;
  sys.s.resize(n, n);
  sys.b.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& xi = x[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = 2.0 * trace_with(xi, basis[static_cast<std::size_t>(j)]).real();
      sys.s(i, j) = v;
      sys.s(j, i) = v;
    }
    sys.b[i] = -2.0 * trace_with(xi, h).imag();
  }
  return sys;
}

Solution solve_for_a(const LinearSystem& sys, const SolverConfig& cfg) {
  const auto n = sys.b.size();
  if (sys.s.rows() != n || sys.s.cols() != n) throw std::invalid_argument("solve_for_a: S and b sizes differ");
  if (cfg.method == SolverMethod::ClosedForm) throw std::invalid_argument("solve_for_a: closed form has no matrix system");
  if (n == 0) return Solution{Eigen::VectorXd(0), 0.0, 0, false};
  if ((sys.s - sys.s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, sys.s.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("solve_for_a: S is not symmetric");
  }
  const double bnorm = sys.b.norm();
  if (bnorm == 0.0) {
    Solution zero;
    zero.a = Eigen::VectorXd::Zero(n);
    return zero;
  }
  if (cfg.method == SolverMethod::TruncatedSvd) return pseudo_inverse(sys, cfg.svd_cutoff);

  // Conjugate gradients from a = 0 stay in the range of S and reach the
  // minimal-norm solution of a consistent system.
  const int max_it = cfg.max_iterations > 0 ? cfg.max_iterations : static_cast<int>(10 * n);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = -sys.b;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const double target = cfg.tolerance * bnorm;
  bool converged = false;
  int it = 0;
  for (; it < max_it; ++it) {
    const Eigen::VectorXd sp = sys.s * p;
    const double psp = p.dot(sp);
    if (!(psp > 0.0)) break;
    const double alpha = rr / psp;
    a += alpha * p;
    r -= alpha * sp;
    const double rr_new = r.squaredNorm();
    if (std::sqrt(rr_new) <= target) {
      converged = true;
      ++it;
      break;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  Solution out;
  out.a = a;
  out.iterations = it;
  out.residual = (sys.s * a + sys.b).norm();
  if (converged && out.residual <= 10.0 * target) return out;
  Solution svd = pseudo_inverse(sys, cfg.svd_cutoff);
  svd.iterations = it;
  svd.fallback = true;
  return svd;
}

Eigen::MatrixXcd closed_form_generator(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& h, double* residual) {
  if (rho.rows() != rho.cols() || h.rows() != rho.rows() || h.cols() != rho.cols()) {
    throw std::invalid_argument("closed_form_generator: size mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
  if (es.info() != Eigen::Success) throw std::runtime_error("closed_form_generator: eigensolver failed");
  const auto& lam = es.eigenvalues();
  const auto& u = es.eigenvectors();
  const Eigen::MatrixXcd ht = u.adjoint() * h * u;
  const double top = std::max(lam.maxCoeff(), 0.0);
  Eigen::MatrixXcd at = Eigen::MatrixXcd::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < at.rows(); ++i) {
    for (Eigen::Index j = 0; j < at.cols(); ++j) {
      const double sum = std::max(lam[i], 0.0) + std::max(lam[j], 0.0);
      if (sum <= 1e-14 * top) continue;
      at(i, j) = kI * ((lam[i] - lam[j]) / sum) * ht(i, j);
    }
  }
  Eigen::MatrixXcd a = u * at * u.adjoint();
  a = 0.5 * (a + a.adjoint());
  if (residual != nullptr) *residual = (rho * a + a * rho - kI * (rho * h - h * rho)).norm();
  return a;
}

EvolutionResult qite_evolve(const ProblemHamiltonian& h, const DomainPlan& plan, const QiteConfig& cfg,
                            const StateVector& psi, const std::optional<StateVector>& reference) {
  if (psi.n_qubits != h.n_qubits) throw std::invalid_argument("qite_evolve: state does not match the register");
  if (plan.group_of_term.size() != h.terms.size() || plan.kind != h.kind) {
    throw std::invalid_argument("qite_evolve: plan was built for another Hamiltonian");
  }
  if (!(cfg.dtau > 0.0) || cfg.n_steps < 0) throw std::invalid_argument("qite_evolve: need dtau > 0 and n >= 0");
  const bool closed = cfg.solver.method == SolverMethod::ClosedForm;
  if (closed && plan.basis != BasisKind::FullPauli) {
    throw std::invalid_argument("qite_evolve: the closed form needs the complete Pauli basis");
  }

  struct Prepared {
    LocalFrame frame;
    int qubits = 0;
    Eigen::MatrixXcd h_dense;                    // closed form
    Eigen::SparseMatrix<cplx> h_sparse;          // fermionic path
    SpinOperator h_local;                        // Pauli path
    std::vector<PauliString> pauli;              // local strings
    std::vector<Eigen::SparseMatrix<cplx>> ops;  // local fermionic generators
  };
  std::vector<Prepared> prep;
  for (const auto& g : plan.groups) {
    Prepared p;
    if (plan.kind == SystemKind::Spin) {
      p.frame = spin_frame(g.domain);
      p.qubits = p.frame.size();
      p.h_local = localize(g.spin, p.frame);
      if (closed) {
        if (p.qubits > cfg.closed_form_cap) throw std::length_error("qite_evolve: domain exceeds the closed-form cap");
        p.h_dense = to_matrix(p.h_local, p.qubits);
      } else {
        std::vector<int> local(static_cast<std::size_t>(p.qubits));
        for (int l = 0; l < p.qubits; ++l) local[static_cast<std::size_t>(l)] = l;
        p.pauli = spin_basis(local, cfg.basis_cap);
      }
    } else {
      p.frame = orbital_frame(g.domain);
      p.qubits = p.frame.size();
      p.h_sparse = sparse_matrix(localize(g.fermion, p.frame), p.qubits);
      for (const auto& op : fermionic_generators(g.domain)) p.ops.push_back(sparse_matrix(localize(op, p.frame), p.qubits));
    }
    prep.push_back(std::move(p));
  }

  const CompiledOperator energy_op(h.total());
  EvolutionResult out;
  StateVector cur = psi;
  cur.normalize();
  out.trace.add(TraceRow{0.0, energy_of(energy_op, cur), reference ? std::optional<double>(fidelity(*reference, cur))
                                                                   : std::nullopt,
                         std::nullopt, std::nullopt});
  if (plan.groups.empty() || cfg.n_steps == 0) {
    out.state = cur;
    return out;
  }
  const TrotterSchedule sched = make_trotter_schedule(static_cast<int>(plan.groups.size()), cfg.dtau, cfg.n_steps);
  for (int step = 0; step < cfg.n_steps; ++step) {
    double worst = 0.0;
    for (const auto& st : sched.per_step) {
      const Prepared& p = prep[static_cast<std::size_t>(st.term)];
      const Eigen::MatrixXcd rho = reduced_density_matrix(cur, p.frame);
      Eigen::MatrixXcd a;
      double residual = 0.0;
      if (closed) {
        a = closed_form_generator(rho, p.h_dense, &residual);
      } else if (plan.kind == SystemKind::Spin) {
        const LinearSystem sys =
            pauli_system(p.pauli, p.h_local, [&](const PauliString& s) { return pauli_trace(rho, s); }, nullptr);
        const Solution sol = solve_for_a(sys, cfg.solver);
        residual = sol.residual;
        SpinOperator op;
        for (std::size_t i = 0; i < p.pauli.size(); ++i) {
          if (sol.a[static_cast<Eigen::Index>(i)] != 0.0) op.add(p.pauli[i], sol.a[static_cast<Eigen::Index>(i)]);
        }
        a = to_matrix(op, p.qubits);
      } else {
        const LinearSystem sys = build_linear_system(p.ops, p.h_sparse, rho);
        const Solution sol = solve_for_a(sys, cfg.solver);
        residual = sol.residual;
        Eigen::SparseMatrix<cplx> sum(rho.rows(), rho.cols());
        for (std::size_t i = 0; i < p.ops.size(); ++i) sum += sol.a[static_cast<Eigen::Index>(i)] * p.ops[i];
        a = Eigen::MatrixXcd(sum);
      }
      worst = std::max(worst, residual);
      apply_local(cur, p.frame, expm_taylor(a, cplx(0.0, -cfg.dtau * st.fraction)));
    }
    out.trace.add(TraceRow{(step + 1) * cfg.dtau, energy_of(energy_op, cur),
                           reference ? std::optional<double>(fidelity(*reference, cur)) : std::nullopt, std::nullopt,
                           worst});
  }
  out.state = cur;
  return out;
}

}  // namespace qitelab
