// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0
//
// qite_lab: experiment runner.
//
//   qite_lab run [--config FILE] [--preset NAME] [--evolver KIND] [--nu N] ...
//   qite_lab presets
//   qite_lab sweep --config FILE --param KEY --values A,B,C [--jobs N]
//   qite_lab spectrum|ghf|mi [--config FILE] [--preset NAME] ...
//
// Output files go to $QITE_LAB_OUT/<output.dir> (or ./<output.dir>).
// Exit codes: 0 success, 1 runtime failure, 2 config error, 3 infeasible run.

#include <CLI11.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qitelab/experiment.hpp"
#include "qitelab/fgs.hpp"

using namespace qitelab;

namespace {

// Flags shared by every subcommand that builds a system.
struct Overrides {
  std::string config;
  std::string preset;
  std::string evolver;
  std::string solver;
  std::string out;
  std::optional<int> nu;
  std::optional<double> dtau;
  std::optional<double> tau;
  std::optional<long long> seed;
  std::vector<std::string> set;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "config file ([section] key = value)");
    app->add_option("--preset", preset, "system preset (see `qite_lab presets`)");
    app->add_option("--evolver", evolver, "exact-ite | trot-ite | qite");
    app->add_option("--nu", nu, "QITE Manhattan distance");
    app->add_option("--dtau", dtau, "imaginary time step");
    app->add_option("--tau", tau, "total imaginary time");
    app->add_option("--solver", solver, "auto | cg | svd | closed-form");
    app->add_option("--seed", seed, "domain tie-breaking seed");
    app->add_option("--out", out, "output directory (relative to $QITE_LAB_OUT)");
    app->add_option("--set", set, "override any key: section.key=value");
  }

  KeyValues resolve() const {
    KeyValues kv = config.empty() ? KeyValues{} : read_config_file(config);
    auto put = [&](const std::string& k, const std::string& v) {
      if (!v.empty()) kv[k] = v;
    };
    put("system.preset", preset);
    put("evolver.kind", evolver);
    put("evolver.solver", solver);
    put("output.dir", out);
    if (nu) kv["evolver.nu"] = std::to_string(*nu);
    if (dtau) kv["evolver.dtau"] = CLI::detail::to_string(*dtau);
    if (tau) kv["evolver.tau"] = CLI::detail::to_string(*tau);
    if (seed) kv["run.seed"] = std::to_string(*seed);
    for (const auto& s : set) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
      kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    // A preset chosen on the command line replaces the file's explicit system.
    if (!preset.empty()) {
      for (auto it = kv.begin(); it != kv.end();) {
        const bool from_file_system = it->first.rfind("system.", 0) == 0 && it->first != "system.preset" &&
                                      it->first != "system.fcidump";
        it = from_file_system ? kv.erase(it) : std::next(it);
      }
    }
    return kv;
  }
};

void print_summary(const RunSummary& s) {
  std::printf("output   %s\n", s.out_dir.c_str());
  std::printf("E_init   %.8f\nE_final  %.8f\n", s.e_init, s.e_final);
  if (s.f_init) std::printf("F_init   %.6f\nF_final  %.6f\n", *s.f_init, *s.f_final);
  if (s.e0) std::printf("E0       %.8f\nE1       %.8f\n", *s.e0, *s.e1);
}

int run_sweep(const KeyValues& base, const std::string& param, const std::vector<std::string>& values, int jobs) {
  const ExperimentConfig probe = ExperimentConfig::from_values(base);
  std::vector<ExperimentConfig> runs;
  for (const auto& v : values) {
    KeyValues kv = base;
    kv[param] = v;
    kv["output.dir"] = probe.output + "/" + param + "=" + v;
    runs.push_back(ExperimentConfig::from_values(kv));
  }
  int failures = 0;
  std::size_t next = 0;
  int running = 0;
  while (next < runs.size() || running > 0) {
    while (running < std::max(jobs, 1) && next < runs.size()) {
      const pid_t pid = fork();
      if (pid < 0) throw std::runtime_error("sweep: fork failed");
      if (pid == 0) {
        try {
          run_experiment(runs[next]);
          _exit(0);
        } catch (const std::exception& e) {
          std::fprintf(stderr, "sweep %s: %s\n", runs[next].output.c_str(), e.what());
          _exit(1);
        }
      }
      ++next;
      ++running;
    }
    int status = 0;
    if (wait(&status) > 0) {
      --running;
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ++failures;
    }
  }
  std::printf("sweep %s: %zu runs, %d failed\n", param.c_str(), runs.size(), failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qitelab experiment runner"};
  app.require_subcommand(1);

  Overrides run_o;
  auto* run = app.add_subcommand("run", "run one experiment");
  run_o.attach(run);

  app.add_subcommand("presets", "list system presets");

  Overrides sweep_o;
  std::string param;
  std::vector<std::string> values;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "run one experiment per value of a key");
  sweep_o.attach(sweep);
  sweep->add_option("--param", param, "key to vary (section.key)")->required();
  sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sweep->add_option("--jobs", jobs, "parallel processes");

  Overrides spec_o;
  int levels = 2;
  auto* spec = app.add_subcommand("spectrum", "lowest energies of the system");
  spec_o.attach(spec);
  spec->add_option("--levels", levels, "number of levels");

  Overrides ghf_o;
  std::string write_gamma;
  bool with_fidelity = false;
  auto* ghf = app.add_subcommand("ghf", "generalized Hartree-Fock baseline");
  ghf_o.attach(ghf);
  ghf->add_option("--write", write_gamma, "write the covariance matrix to FILE");
  ghf->add_flag("--fidelity", with_fidelity, "also report the ground-state fidelity");

  Overrides mi_o;
  auto* mi = app.add_subcommand("mi", "orbital mutual information of the ground state");
  mi_o.attach(mi);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("presets")) {
      std::fputs(presets_table().c_str(), stdout);
      return 0;
    }
    if (run->parsed()) {
      print_summary(run_experiment(ExperimentConfig::from_values(run_o.resolve())));
      return 0;
    }
    if (sweep->parsed()) return run_sweep(sweep_o.resolve(), param, values, jobs);
    if (spec->parsed()) {
      const auto h = build_system(ExperimentConfig::from_values(spec_o.resolve()).system);
      const auto r = system_spectrum(h, levels);
      std::printf("# qitelab spectrum v1\n# method %s\nlevel,energy,residual\n", r.method.c_str());
      for (std::size_t i = 0; i < r.energies.size(); ++i) {
        std::printf("%zu,%.12f,%.3e\n", i, r.energies[i], i < r.residuals.size() ? r.residuals[i] : 0.0);
      }
      return 0;
    }
    if (ghf->parsed()) {
      const auto cfg = ExperimentConfig::from_values(ghf_o.resolve());
      const auto h = build_system(cfg.system);
      InitialSpec init = cfg.initial;
      init.kind = "ghf";
      GhfConfig g;
      g.seed = init.seed;
      g.restarts = init.restarts;
      if (h.kind == SystemKind::Fermionic) {
        g.number_conserving = true;
        g.n_particles = h.n_electrons;
      }
      const auto r = ghf_minimize(MajoranaPolynomialEnergy::from_spin(h.total(), h.n_qubits), g);
      std::fputs(ghf_summary_csv(r).c_str(), stdout);
      std::printf("# energy %.10f parity %d\n", r.energy, r.parity);
      if (with_fidelity) {
        const auto s = system_spectrum(h);
        std::printf("# fidelity %.8f\n", fidelity(synthesize_fgs_state(r.gamma), s.ground));
      }
      if (!write_gamma.empty()) {
        std::ofstream out(write_gamma);
        out << write_covariance(r.gamma);
      }
      return 0;
    }
    if (mi->parsed()) {
      const auto h = build_system(ExperimentConfig::from_values(mi_o.resolve()).system);
      if (h.kind != SystemKind::Fermionic) throw ConfigError("mi needs a fermionic system");
      const auto s = system_spectrum(h);
      std::fputs(mutual_information_csv(mutual_information(s.ground, h.n_sites)).c_str(), stdout);
      std::printf("# Z_s1 %.8f\n", multiref_diagnostic(s.ground, h.n_sites));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
