// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration and the run pipeline behind the qite_lab tool.
//
// Config files are flat key = value lines grouped in [sections]:
//
//   [system]
//   preset = hm1
//   [evolver]
//   kind = qite
//   nu = 2
//
// Keys are addressed as "section.key"; command-line flags override them.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qitelab/diagnostics.hpp"
#include "qitelab/hamiltonians.hpp"
#include "qitelab/operators.hpp"

namespace qitelab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The run would exceed the basis or cost limits; the message carries the estimate.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_text(const std::string& text);
KeyValues read_config_file(const std::string& path);

struct SystemSpec {
  std::string preset;                 // empty: explicit parameters below
  std::string model = "heisenberg";   // heisenberg | tfim | fermi-hubbard | fcidump
  std::string lattice = "ring";
  std::vector<int> dims{10};
  std::string coupling = "nn";        // heisenberg: nn | j1j2 | long-range
  double j = 1.0;
  double j1 = 1.0;
  double j2 = 0.0;
  double alpha = 1.0;
  double b = 0.0;
  double t = 1.0;
  double u = 1.0;
  double prune = 0.0;
  std::string fcidump;
};

struct InitialSpec {
  std::string kind = "ghf";  // ghf | determinant | file
  int restarts = 3;
  std::uint64_t seed = 7;
  std::vector<int> occupied;  // determinant: occupied qubits
  std::string file;           // covariance matrix file
};

struct EvolverSpec {
  std::string kind = "trot-ite";  // exact-ite | trot-ite | qite
  double dtau = 0.1;
  double tau = 10.0;
  int nu = 1;
  std::string solver = "auto";  // auto | cg | svd | closed-form
  double tolerance = 1e-10;
  double svd_cutoff = 1e-8;
  int basis_cap = 7;
  std::string split = "auto";   // trot-ite Pauli splitting: auto | on | off

  int n_steps() const;
};

struct ExperimentConfig {
  SystemSpec system;
  InitialSpec initial;
  EvolverSpec evolver;
  bool spectrum = true;
  bool mutual_information = false;
  std::string output = "run";
  std::uint64_t seed = 0;  // domain tie-breaking

  // Preset first, then explicit keys. Unknown keys are errors.
  static ExperimentConfig from_values(const KeyValues& kv);
  // Every resolved key; reading it back gives the same config.
  std::string to_text() const;
};

struct Preset {
  std::string name;
  std::string label;
  std::string description;
  bool fixture_gated = false;
};

const std::vector<Preset>& presets();
std::string presets_table();

ProblemHamiltonian build_system(const SystemSpec& s);
// Initial state for the system; reads files and runs GHF as configured.
StateVector initial_state(const ProblemHamiltonian& h, const InitialSpec& s);

// Lowest levels. Fermionic systems are restricted to their electron number and
// spin projection.
SpectrumResult system_spectrum(const ProblemHamiltonian& h, int k = 2);

struct RunSummary {
  double e_init = 0.0;
  double e_final = 0.0;
  std::optional<double> f_init;
  std::optional<double> f_final;
  std::optional<double> e0;
  std::optional<double> e1;
  std::string out_dir;
};

// Output root: $QITE_LAB_OUT if set, else the working directory.
std::string output_directory(const ExperimentConfig& cfg);

// Writes trace.csv, summary.csv, plan.txt and config.echo.
RunSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace qitelab
