// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qitelab/experiment.hpp"

namespace qitelab {

namespace {

namespace pt = boost::property_tree;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<int> parse_ints(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (item.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected a comma-separated integer list, got '" + text + "'");
    }
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

long long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "on" || text == "true" || text == "1" || text == "yes") return true;
  if (text == "off" || text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected on/off, got '" + text + "'");
}

void check_choice(const std::string& key, const std::string& v, const std::set<std::string>& allowed) {
  if (allowed.count(v)) return;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : " | ") + a;
  throw ConfigError(key + ": '" + v + "' is not one of " + list);
}

void apply_preset(SystemSpec& s, const std::string& name) {
  s = SystemSpec{};
  s.preset = name;
  if (name == "hm1") {
    s.dims = {10};
  } else if (name == "hm2") {
    s.coupling = "long-range";
    s.alpha = 1.0;
    s.b = 0.4;
  } else if (name == "hm3") {
    s.lattice = "triangular_ladder";
    s.dims = {2, 6};
    s.b = 0.4;
  } else if (name == "tfim1" || name == "tfim2") {
    s.model = "tfim";
    s.alpha = name == "tfim1" ? 0.3 : 0.1;
    s.b = 0.4;
  } else if (name == "j1j2") {
    s.lattice = "honeycomb";
    s.dims = {2, 6};
    s.coupling = "j1j2";
    s.j1 = 1.0;
    s.j2 = -0.5;
    s.b = 0.1;
  } else if (name == "fhm") {
    s.model = "fermi-hubbard";
    s.t = 1.0;
    s.u = 1.0;
  } else {
    bool molecular = false;
    for (const auto& p : presets()) molecular |= p.fixture_gated && p.name == name;
    if (!molecular) throw ConfigError("system.preset: unknown preset '" + name + "' (see `qite_lab presets`)");
    s.model = "fcidump";
  }
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  KeyValues kv;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      kv[section] = body.data();
      continue;
    }
    for (const auto& [key, value] : body) kv[section + "." + key] = value.data();
  }
  return kv;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

int EvolverSpec::n_steps() const { return static_cast<int>(std::lround(tau / dtau)); }

ExperimentConfig ExperimentConfig::from_values(const KeyValues& kv) {
  ExperimentConfig c;
  if (auto it = kv.find("system.preset"); it != kv.end() && !it->second.empty()) apply_preset(c.system, it->second);
  for (const auto& [key, v] : kv) {
    SystemSpec& s = c.system;
    EvolverSpec& e = c.evolver;
    if (key == "system.preset") continue;
    if (key == "system.model") {
      check_choice(key, v, {"heisenberg", "tfim", "fermi-hubbard", "fcidump"});
      s.model = v;
    } else if (key == "system.lattice") {
      try {
        lattice_kind_from_string(v);
      } catch (const std::exception& ex) {
        throw ConfigError(key + ": " + ex.what());
      }
      s.lattice = v;
    } else if (key == "system.dims") {
      s.dims = parse_ints(key, v);
    } else if (key == "system.coupling") {
      check_choice(key, v, {"nn", "j1j2", "long-range"});
      s.coupling = v;
    } else if (key == "system.j") {
      s.j = parse_double(key, v);
    } else if (key == "system.j1") {
      s.j1 = parse_double(key, v);
    } else if (key == "system.j2") {
      s.j2 = parse_double(key, v);
    } else if (key == "system.alpha") {
      s.alpha = parse_double(key, v);
    } else if (key == "system.b") {
      s.b = parse_double(key, v);
    } else if (key == "system.t") {
      s.t = parse_double(key, v);
    } else if (key == "system.u") {
      s.u = parse_double(key, v);
    } else if (key == "system.prune") {
      s.prune = parse_double(key, v);
    } else if (key == "system.fcidump") {
      s.fcidump = v;
    } else if (key == "initial.kind") {
      check_choice(key, v, {"ghf", "determinant", "file"});
      c.initial.kind = v;
    } else if (key == "initial.restarts") {
      c.initial.restarts = static_cast<int>(parse_int(key, v));
    } else if (key == "initial.seed") {
      c.initial.seed = static_cast<std::uint64_t>(parse_int(key, v));
    } else if (key == "initial.occupied") {
      c.initial.occupied = parse_ints(key, v);
    } else if (key == "initial.file") {
      c.initial.file = v;
    } else if (key == "evolver.kind") {
      check_choice(key, v, {"exact-ite", "trot-ite", "qite"});
      e.kind = v;
    } else if (key == "evolver.dtau") {
      e.dtau = parse_double(key, v);
    } else if (key == "evolver.tau") {
      e.tau = parse_double(key, v);
    } else if (key == "evolver.nu") {
      e.nu = static_cast<int>(parse_int(key, v));
    } else if (key == "evolver.solver") {
      check_choice(key, v, {"auto", "cg", "svd", "closed-form"});
      e.solver = v;
    } else if (key == "evolver.tolerance") {
      e.tolerance = parse_double(key, v);
    } else if (key == "evolver.svd_cutoff") {
      e.svd_cutoff = parse_double(key, v);
    } else if (key == "evolver.basis_cap") {
      e.basis_cap = static_cast<int>(parse_int(key, v));
    } else if (key == "evolver.split") {
      check_choice(key, v, {"auto", "on", "off"});
      e.split = v;
    } else if (key == "diagnostics.spectrum") {
      c.spectrum = parse_bool(key, v);
    } else if (key == "diagnostics.mi") {
      c.mutual_information = parse_bool(key, v);
    } else if (key == "output.dir") {
      c.output = v;
    } else if (key == "run.seed") {
      c.seed = static_cast<std::uint64_t>(parse_int(key, v));
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (!(c.evolver.dtau > 0.0)) throw ConfigError("evolver.dtau: must be positive");
  if (c.evolver.tau < 0.0) throw ConfigError("evolver.tau: must be non-negative");
  if (c.evolver.nu < 0) throw ConfigError("evolver.nu: must be non-negative");
  if (c.initial.restarts < 1) throw ConfigError("initial.restarts: must be at least 1");
  if (std::abs(c.evolver.n_steps() * c.evolver.dtau - c.evolver.tau) > 1e-9 * std::max(1.0, c.evolver.tau)) {
    throw ConfigError("evolver.tau: must be a multiple of evolver.dtau");
  }
  return c;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream o;
  const SystemSpec& s = system;
  o << "# qitelab config v1\n";
  o << "[system]\n";
  o << "preset = " << s.preset << "\n";
  o << "model = " << s.model << "\n";
  o << "lattice = " << s.lattice << "\n";
  o << "dims = " << join(s.dims) << "\n";
  o << "coupling = " << s.coupling << "\n";
  o << "j = " << fmt(s.j) << "\nj1 = " << fmt(s.j1) << "\nj2 = " << fmt(s.j2) << "\n";
  o << "alpha = " << fmt(s.alpha) << "\nb = " << fmt(s.b) << "\n";
  o << "t = " << fmt(s.t) << "\nu = " << fmt(s.u) << "\nprune = " << fmt(s.prune) << "\n";
  o << "fcidump = " << s.fcidump << "\n";
  o << "[initial]\n";
  o << "kind = " << initial.kind << "\nrestarts = " << initial.restarts << "\nseed = " << initial.seed << "\n";
  o << "occupied = " << join(initial.occupied) << "\nfile = " << initial.file << "\n";
  o << "[evolver]\n";
  o << "kind = " << evolver.kind << "\ndtau = " << fmt(evolver.dtau) << "\ntau = " << fmt(evolver.tau) << "\n";
  o << "nu = " << evolver.nu << "\nsolver = " << evolver.solver << "\ntolerance = " << fmt(evolver.tolerance) << "\n";
  o << "svd_cutoff = " << fmt(evolver.svd_cutoff) << "\nbasis_cap = " << evolver.basis_cap << "\n";
  o << "split = " << evolver.split << "\n";
  o << "[diagnostics]\n";
  o << "spectrum = " << (spectrum ? "on" : "off") << "\nmi = " << (mutual_information ? "on" : "off") << "\n";
  o << "[output]\ndir = " << output << "\n";
  o << "[run]\nseed = " << seed << "\n";
  return o.str();
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"hm1", "HM I", "Heisenberg ring, NN, B=0, J=1, L=10", false},
      {"hm2", "HM II", "Heisenberg ring, LR, B=0.4, alpha=1, L=10", false},
      {"hm3", "HM III", "Heisenberg triangular ladder 2x6, NN, B=0.4, J=1, L=12", false},
      {"tfim1", "TFIM I", "transverse-field Ising ring, LR, B=0.4, alpha=0.3, L=10", false},
      {"tfim2", "TFIM II", "transverse-field Ising ring, LR, B=0.4, alpha=0.1, L=10 (dtau=0.01)", false},
      {"j1j2", "J1J2", "Heisenberg honeycomb 2x6, SR, B=0.1, J1=1, J2=-0.5, L=12", false},
      {"fhm", "FHM", "Fermi-Hubbard ring, NN, t=1, U=1, L=10 (20 qubits)", false},
      {"ne", "Ne (0)", "cc-pVDZ, AS (8,8)", true},
      {"fe_nta1", "Fe(III)-NTA (1)", "def2-QZVPP, AS (5,5)", true},
      {"fe_nta3", "Fe(III)-NTA (3)", "def2-QZVPP, AS (5,5)", true},
      {"o2_0", "O2 (0)", "cc-pVQZ, AS (8,6)", true},
      {"o2_2", "O2 (2)", "cc-pVQZ, AS (8,6)", true},
      {"o3", "O3 (0)", "cc-pVQZ, AS (12,9)", true},
  };
  return list;
}

std::string presets_table() {
  std::ostringstream o;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-8s %-16s %s\n", "preset", "system", "parameters");
  o << buf;
  for (const auto& p : presets()) {
    std::snprintf(buf, sizeof(buf), "%-8s %-16s %s%s\n", p.name.c_str(), p.label.c_str(), p.description.c_str(),
                  p.fixture_gated ? "  [fixture-gated: set system.fcidump]" : "");
    o << buf;
  }
  return o.str();
}

}  // namespace qitelab
