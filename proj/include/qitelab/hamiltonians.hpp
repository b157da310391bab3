// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qitelab/operators.hpp"

namespace qitelab {

enum class LatticeKind { Ring, TriangularLadder, Honeycomb };

std::string to_string(LatticeKind k);
LatticeKind lattice_kind_from_string(const std::string& s);

struct LatticeGraph {
  LatticeKind kind = LatticeKind::Ring;
  int n_sites = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, sorted
  std::vector<std::pair<double, double>> coords;
  bool periodic_x = true;
  bool periodic_y = false;

  std::vector<std::vector<int>> adjacency() const;
  // All-pairs hop counts (BFS), n_sites x n_sites.
  std::vector<std::vector<int>> distances() const;
};

// ring: dims = {L}; triangular ladder: {2, 6}; honeycomb: {2, 6} brick-wall
// rows x columns (12 sites, three hexagons, horizontal PBC).
LatticeGraph build_lattice(LatticeKind kind, const std::vector<int>& dims, bool periodic_x = true);
int manhattan_distance(const LatticeGraph& g, int i, int j);

enum class SystemKind { Spin, Fermionic };

struct HamiltonianTerm {
  std::vector<int> support;  // sites (spin) or spatial orbitals (fermionic)
  SpinOperator spin;         // register operator (JW image for fermionic terms)
  FermionOperator fermion;   // empty for spin systems
};

struct ProblemHamiltonian {
  SystemKind kind = SystemKind::Spin;
  int n_sites = 0;
  int n_qubits = 0;  // spin: n_sites; fermionic: 2 n_sites
  int n_electrons = 0;
  int ms2 = 0;
  double constant = 0.0;
  std::vector<HamiltonianTerm> terms;
  std::optional<LatticeGraph> lattice;

  SpinOperator total() const;  // sum of terms plus constant
};

struct HeisenbergCouplings {
  enum class Kind { NearestNeighbour, J1J2, LongRange } kind = Kind::NearestNeighbour;
  double j = 1.0;
  double j1 = 1.0;
  double j2 = 0.0;
  double alpha = 1.0;
  double prune_below = 0.0;  // drop long-range couplings with |J| below this
};

ProblemHamiltonian build_heisenberg(const LatticeGraph& g, const HeisenbergCouplings& c, double b);
ProblemHamiltonian build_tfim(const LatticeGraph& g, double alpha, double b, double prune_below = 0.0);
ProblemHamiltonian build_fermi_hubbard(const LatticeGraph& g, double t, double u);

struct FcidumpData {
  int n_orb = 0;
  int n_elec = 0;
  int ms2 = 0;
  Eigen::MatrixXd h;          // n_orb x n_orb
  std::vector<double> g;      // n_orb^4, index ((p*n+q)*n+r)*n+s = (pq|rs)
  double core = 0.0;

  double eri(int p, int q, int r, int s) const;
};

FcidumpData parse_fcidump(const std::string& text);
FcidumpData read_fcidump(const std::string& path);
std::string serialize_fcidump(const FcidumpData& f);

ProblemHamiltonian build_active_space_hamiltonian(const FcidumpData& f);

struct TrotterStep {
  int term = 0;
  double fraction = 0.5;
  friend bool operator==(const TrotterStep&, const TrotterStep&) = default;
};

struct TrotterSchedule {
  std::vector<TrotterStep> per_step;  // palindrome over one step
  int n_steps = 0;
  double dtau = 0.0;
};

TrotterSchedule make_trotter_schedule(int n_terms, double dtau, int n_steps);
inline TrotterSchedule make_trotter_schedule(const ProblemHamiltonian& h, double dtau, int n_steps) {
  return make_trotter_schedule(static_cast<int>(h.terms.size()), dtau, n_steps);
}

// Spin Hamiltonian with one term per Pauli string: single-site fields first,
// then couplings by increasing lattice distance (|i - j| without a lattice),
// each distance shell ordered X..X, Y..Y, Z..Z. The terms are identical as an
// operator sum; only the Trotter splitting changes. Fermionic input is
// returned unchanged.
ProblemHamiltonian split_pauli_terms(const ProblemHamiltonian& h);

}  // namespace qitelab
