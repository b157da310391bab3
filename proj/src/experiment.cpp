// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qitelab/diagnostics.hpp"
#include "qitelab/evolution.hpp"
#include "qitelab/experiment.hpp"
#include "qitelab/fgs.hpp"
#include "qitelab/qite.hpp"

namespace qitelab {

namespace {

namespace fs = std::filesystem;

// Largest domain the closed-form and fermionic local paths accept (qubits).
constexpr int kClosedFormCap = 10;
constexpr int kFermionicFrameCap = 12;

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string num(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12f", *v);
  return buf;
}

int lattice_dimension(const ProblemHamiltonian& h) {
  if (!h.lattice) return 1;
  return h.lattice->kind == LatticeKind::Ring ? 1 : 2;
}

SolverMethod resolve_solver(const EvolverSpec& e, const DomainPlan& plan) {
  if (e.solver != "auto") return solver_method_from_string(e.solver);
  if (plan.kind == SystemKind::Fermionic) return SolverMethod::ConjugateGradient;
  return plan.max_domain() <= 4 ? SolverMethod::ConjugateGradient : SolverMethod::ClosedForm;
}

void check_feasible(const ProblemHamiltonian& h, const DomainPlan& plan, const EvolverSpec& e, SolverMethod m) {
  const int k = plan.max_domain();
  int limit = 0;
  std::string what;
  if (plan.kind == SystemKind::Fermionic) {
    limit = kFermionicFrameCap / 2;
    what = "fermionic domain (orbitals)";
    if (m == SolverMethod::ClosedForm) throw InfeasibleError("closed-form solver needs the complete Pauli basis (spin systems)");
  } else if (m == SolverMethod::ClosedForm) {
    limit = kClosedFormCap;
    what = "closed-form domain (sites)";
  } else {
    limit = e.basis_cap;
    what = "full-Pauli domain (sites)";
  }
  if (k <= limit) return;
  std::ostringstream msg;
  msg << "refusing QITE run: max |D| = " << k << " exceeds the " << what << " cap " << limit << "; basis size 4^" << k
      << " = " << std::pow(4.0, k) << ", estimated cost m n e^{k nu^d} = "
      << estimate_running_time(static_cast<double>(plan.groups.size()), e.n_steps(), std::log(4.0), e.nu,
                               lattice_dimension(h));
  throw InfeasibleError(msg.str());
}

EvolutionResult initial_only(const ProblemHamiltonian& h, const StateVector& psi,
                             const std::optional<StateVector>& reference) {
  EvolutionResult r;
  r.state = psi;
  r.trace.add(TraceRow{0.0, expectation(h.total(), psi).real(),
                       reference ? std::optional<double>(fidelity(*reference, psi)) : std::nullopt, std::nullopt,
                       std::nullopt});
  return r;
}

}  // namespace

ProblemHamiltonian build_system(const SystemSpec& s) {
  if (s.model == "fcidump") {
    if (s.fcidump.empty()) {
      throw ConfigError("system '" + (s.preset.empty() ? s.model : s.preset) +
                        "' is fixture-gated: set system.fcidump to an FCIDUMP file");
    }
    if (!fs::exists(s.fcidump)) throw ConfigError("missing FCIDUMP fixture '" + s.fcidump + "'");
    return build_active_space_hamiltonian(read_fcidump(s.fcidump));
  }
  const LatticeGraph g = build_lattice(lattice_kind_from_string(s.lattice), s.dims);
  if (s.model == "tfim") return build_tfim(g, s.alpha, s.b, s.prune);
  if (s.model == "fermi-hubbard") return build_fermi_hubbard(g, s.t, s.u);
  HeisenbergCouplings c;
  c.j = s.j;
  c.j1 = s.j1;
  c.j2 = s.j2;
  c.alpha = s.alpha;
  c.prune_below = s.prune;
  if (s.coupling == "j1j2") c.kind = HeisenbergCouplings::Kind::J1J2;
  if (s.coupling == "long-range") c.kind = HeisenbergCouplings::Kind::LongRange;
  return build_heisenberg(g, c, s.b);
}

StateVector initial_state(const ProblemHamiltonian& h, const InitialSpec& s) {
  if (s.kind == "determinant") {
    Index occ = 0;
    for (int q : s.occupied) {
      if (q < 0 || q >= h.n_qubits) throw ConfigError("initial.occupied: qubit " + std::to_string(q) + " out of range");
      occ |= Index{1} << q;
    }
    return StateVector::basis(h.n_qubits, occ);
  }
  CovarianceMatrix gamma;
  if (s.kind == "file") {
    gamma = read_covariance(read_text(s.file));
  } else {
    GhfConfig cfg;
    cfg.seed = s.seed;
    cfg.restarts = s.restarts;
    if (h.kind == SystemKind::Fermionic) {
      cfg.number_conserving = true;
      cfg.n_particles = h.n_electrons;
    }
    gamma = ghf_minimize(MajoranaPolynomialEnergy::from_spin(h.total(), h.n_qubits), cfg).gamma;
  }
  if (gamma.n_modes() != h.n_qubits) throw ConfigError("initial state has the wrong number of modes");
  return synthesize_fgs_state(gamma);
}

SpectrumResult system_spectrum(const ProblemHamiltonian& h, int k) {
  SpectrumConfig cfg;
  cfg.k = k;
  if (h.kind == SystemKind::Fermionic) {
    // Alpha modes sit on even qubits.
    const Index alpha = 0x5555555555555555ULL & ((Index{1} << h.n_qubits) - 1);
    const int n_el = h.n_electrons;
    const int ms2 = h.ms2;
    cfg.sector = [alpha, n_el, ms2](Index i) {
      const int na = std::popcount(i & alpha);
      const int nb = std::popcount(i & ~alpha);
      return na + nb == n_el && na - nb == ms2;
    };
  }
  return spectrum(h.total(), h.n_qubits, cfg);
}

std::string output_directory(const ExperimentConfig& cfg) {
  fs::path dir(cfg.output);
  if (dir.is_relative()) {
    const char* root = std::getenv("QITE_LAB_OUT");
    if (root != nullptr && *root != '\0') dir = fs::path(root) / dir;
  }
  return dir.string();
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  const ProblemHamiltonian h = build_system(cfg.system);
  const EvolverSpec& e = cfg.evolver;
  const bool molecular = h.kind == SystemKind::Fermionic && !h.lattice;

  // Lattice plans do not need the state, so infeasible runs stop here.
  std::optional<DomainPlan> plan;
  SolverMethod method = SolverMethod::ConjugateGradient;
  if (e.kind == "qite" && !molecular) {
    plan = plan_domains(h, e.nu, cfg.seed);
    method = resolve_solver(e, *plan);
    check_feasible(h, *plan, e, method);
  }
  if (e.kind == "qite" && molecular && !cfg.spectrum) {
    throw ConfigError("molecular QITE domains need the ground state: set diagnostics.spectrum = on");
  }
  if (e.kind == "exact-ite" && h.n_qubits > 26) throw InfeasibleError("exact ITE register above 26 qubits");

  const fs::path dir(output_directory(cfg));
  fs::create_directories(dir);
  write_text(dir / "config.echo", cfg.to_text());

  std::optional<SpectrumResult> spec;
  if (cfg.spectrum) spec = system_spectrum(h);
  std::optional<StateVector> reference;
  if (spec) reference = spec->ground;

  if (cfg.mutual_information || (e.kind == "qite" && molecular)) {
    if (h.kind != SystemKind::Fermionic) {
      if (cfg.mutual_information) throw ConfigError("diagnostics.mi needs a fermionic system");
    } else {
      const auto mi = mutual_information(spec->ground, h.n_sites);
      write_text(dir / "mi.csv", mutual_information_csv(mi));
      if (e.kind == "qite") {
        plan = plan_domains(h, mi.mi, e.nu);
        method = resolve_solver(e, *plan);
        check_feasible(h, *plan, e, method);
      }
    }
  }

  const StateVector psi = initial_state(h, cfg.initial);
  EvolutionResult result;
  std::string plan_text;
  if (e.kind == "exact-ite") {
    ExactIteConfig ecfg;
    ecfg.record_every = e.dtau;
    result = e.n_steps() == 0 ? initial_only(h, psi, reference) : exact_ite(h.total(), psi, e.tau, reference, ecfg);
    plan_text = "# qitelab domain plan v1\nevolver exact-ite (no domains)\n";
  } else if (e.kind == "trot-ite") {
    const bool split = e.split == "on" || (e.split == "auto" && h.kind == SystemKind::Spin);
    const ProblemHamiltonian hh = split ? split_pauli_terms(h) : h;
    if (e.n_steps() == 0) {
      result = initial_only(h, psi, reference);
    } else {
      result = trotterized_ite(hh, make_trotter_schedule(hh, e.dtau, e.n_steps()), psi, reference);
    }
    std::ostringstream o;
    o << "# qitelab domain plan v1\nevolver trot-ite split " << (split ? "pauli" : "grouped") << " terms "
      << hh.terms.size() << "\n";
    for (std::size_t i = 0; i < hh.terms.size(); ++i) {
      o << "term " << i << " support";
      for (std::size_t k = 0; k < hh.terms[i].support.size(); ++k) o << (k ? "," : " ") << hh.terms[i].support[k];
      o << "\n";
    }
    plan_text = o.str();
  } else {
    QiteConfig qcfg;
    qcfg.dtau = e.dtau;
    qcfg.n_steps = e.n_steps();
    qcfg.basis_cap = e.basis_cap;
    qcfg.closed_form_cap = kClosedFormCap;
    qcfg.solver.method = method;
    qcfg.solver.tolerance = e.tolerance;
    qcfg.solver.svd_cutoff = e.svd_cutoff;
    result = qite_evolve(h, *plan, qcfg, psi, reference);
    plan_text = plan->to_text() + "solver " + to_string(method) + "\n";
  }

  std::string trace = result.trace.to_csv();
  const auto eol = trace.find('\n');
  char dt[32];
  std::snprintf(dt, sizeof(dt), "%.10g", e.dtau);
  trace.insert(eol + 1, "# evolver " + e.kind + " dtau " + dt + " seed " + std::to_string(cfg.seed) + "\n");
  write_text(dir / "trace.csv", trace);
  write_text(dir / "plan.txt", plan_text);

  RunSummary s;
  const auto& rows = result.trace.rows();
  s.e_init = rows.front().energy;
  s.e_final = rows.back().energy;
  s.f_init = rows.front().fidelity;
  s.f_final = rows.back().fidelity;
  if (spec) {
    s.e0 = spec->energies[0];
    s.e1 = spec->energies[1];
  }
  s.out_dir = dir.string();
  std::ostringstream sum;
  sum << "# qitelab summary v1\n";
  sum << "E_init,E_final,F_init,F_final,E0,E1\n";
  sum << num(s.e_init) << "," << num(s.e_final) << "," << num(s.f_init) << "," << num(s.f_final) << "," << num(s.e0)
      << "," << num(s.e1) << "\n";
  write_text(dir / "summary.csv", sum.str());
  return s;
}

}  // namespace qitelab
