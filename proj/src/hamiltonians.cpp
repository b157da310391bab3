// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qitelab/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qitelab {

std::string to_string(LatticeKind k) {
  switch (k) {
    case LatticeKind::Ring: return "ring";
    case LatticeKind::TriangularLadder: return "triangular_ladder";
    default: return "honeycomb";
  }
}

LatticeKind lattice_kind_from_string(const std::string& s) {
  if (s == "ring") return LatticeKind::Ring;
  if (s == "triangular_ladder") return LatticeKind::TriangularLadder;
  if (s == "honeycomb") return LatticeKind::Honeycomb;
  throw std::invalid_argument("unknown lattice kind: " + s);
}

std::vector<std::vector<int>> LatticeGraph::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_sites));
  for (const auto& [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  return adj;
}

std::vector<std::vector<int>> LatticeGraph::distances() const {
  const auto adj = adjacency();
  const auto n = static_cast<std::size_t>(n_sites);
  std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    std::deque<int> queue{static_cast<int>(s)};
    d[s][s] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (d[s][static_cast<std::size_t>(v)] < 0) {
          d[s][static_cast<std::size_t>(v)] = d[s][static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return d;
}

namespace {

void add_edge(std::set<std::pair<int, int>>& edges, int a, int b) {
  if (a == b) return;
  edges.insert({std::min(a, b), std::max(a, b)});
}

}  // namespace

LatticeGraph build_lattice(LatticeKind kind, const std::vector<int>& dims, bool periodic_x) {
  LatticeGraph g;
  g.kind = kind;
  g.periodic_x = periodic_x;
  std::set<std::pair<int, int>> edges;
  switch (kind) {
    case LatticeKind::Ring: {
      if (dims.size() != 1 || dims[0] < 2) throw std::invalid_argument("ring needs one dimension L >= 2");
      const int l = dims[0];
      g.n_sites = l;
      for (int i = 0; i < l; ++i) {
        if (i + 1 < l || periodic_x) add_edge(edges, i, (i + 1) % l);
        const double phi = 2.0 * M_PI * i / l;
        g.coords.emplace_back(std::cos(phi), std::sin(phi));
      }
      break;
    }
    case LatticeKind::TriangularLadder: {
      if (dims != std::vector<int>{2, 6}) throw std::invalid_argument("triangular ladder is defined for 2x6");
      const int c = dims[1];
      g.n_sites = 2 * c;
      // Row 0: sites 0..c-1 at y=0; row 1: sites c..2c-1 shifted by half a cell.
      for (int r = 0; r < 2; ++r) {
        for (int i = 0; i < c; ++i) g.coords.emplace_back(i + 0.5 * r, r * std::sqrt(3.0) / 2.0);
      }
      for (int i = 0; i < c; ++i) {
        const bool wrap = i + 1 == c;
        if (!wrap || periodic_x) {
          add_edge(edges, i, (i + 1) % c);
          add_edge(edges, c + i, c + (i + 1) % c);
          add_edge(edges, c + i, (i + 1) % c);
        }
        add_edge(edges, i, c + i);
      }
      break;
    }
    case LatticeKind::Honeycomb: {
      if (dims != std::vector<int>{2, 6}) throw std::invalid_argument("honeycomb is defined as a 2x6 brick wall");
      const int rows = dims[0];
      const int cols = dims[1];
      g.n_sites = rows * cols;
      for (int r = 0; r < rows; ++r) {
        for (int i = 0; i < cols; ++i) g.coords.emplace_back(i, r);
      }
      for (int r = 0; r < rows; ++r) {
        for (int i = 0; i < cols; ++i) {
          const int s = r * cols + i;
          if (i + 1 < cols || periodic_x) add_edge(edges, s, r * cols + (i + 1) % cols);
          if (r + 1 < rows && (r + i) % 2 == 0) add_edge(edges, s, s + cols);
        }
      }
      break;
    }
  }
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

int manhattan_distance(const LatticeGraph& g, int i, int j) {
  if (i < 0 || j < 0 || i >= g.n_sites || j >= g.n_sites) throw std::out_of_range("site out of range");
  return g.distances()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

SpinOperator ProblemHamiltonian::total() const {
  SpinOperator h = SpinOperator::identity(constant);
  for (const auto& t : terms) h += t.spin;
  return h;
}

namespace {

SpinOperator heisenberg_pair(int i, int j, double c) {
  SpinOperator op;
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) op.add(PauliString{{i, p}, {j, p}}, c);
  return op;
}

void add_field_terms(ProblemHamiltonian& h, double b) {
  if (b == 0.0) return;
  for (int i = 0; i < h.n_sites; ++i) {
    h.terms.push_back(HamiltonianTerm{{i}, SpinOperator(PauliString{{i, Pauli::Z}}, b), {}});
  }
}

std::vector<std::vector<double>> long_range_couplings(const LatticeGraph& g, double alpha) {
  const auto d = g.distances();
  const auto n = static_cast<std::size_t>(g.n_sites);
  std::vector<std::vector<double>> j(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (d[a][b] <= 0) throw std::invalid_argument("coincident or disconnected sites in long-range coupling");
      j[a][b] = std::pow(static_cast<double>(d[a][b]), -alpha);
    }
  }
  return j;
}

}  // namespace

ProblemHamiltonian build_heisenberg(const LatticeGraph& g, const HeisenbergCouplings& c, double b) {
  ProblemHamiltonian h;
  h.kind = SystemKind::Spin;
  h.n_sites = g.n_sites;
  h.n_qubits = g.n_sites;
  h.lattice = g;
  const auto n = static_cast<std::size_t>(g.n_sites);
  std::vector<std::vector<double>> j(n, std::vector<double>(n, 0.0));
  switch (c.kind) {
    case HeisenbergCouplings::Kind::NearestNeighbour:
      for (const auto& [a, bb] : g.edges) j[static_cast<std::size_t>(a)][static_cast<std::size_t>(bb)] = c.j;
      break;
    case HeisenbergCouplings::Kind::J1J2: {
      const auto d = g.distances();
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t bb = a + 1; bb < n; ++bb) {
          if (d[a][bb] == 1) j[a][bb] = c.j1;
          if (d[a][bb] == 2) j[a][bb] = c.j2;
        }
      }
      break;
    }
    case HeisenbergCouplings::Kind::LongRange:
      if (c.alpha <= 0.0) throw std::invalid_argument("long-range exponent must be positive");
      j = long_range_couplings(g, c.alpha);
      break;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t bb = a + 1; bb < n; ++bb) {
      const double v = j[a][bb];
      if (v == 0.0 || std::abs(v) < c.prune_below) continue;
      const int ia = static_cast<int>(a);
      const int ib = static_cast<int>(bb);
      h.terms.push_back(HamiltonianTerm{{ia, ib}, heisenberg_pair(ia, ib, v), {}});
    }
  }
  add_field_terms(h, b);
  return h;
}

ProblemHamiltonian build_tfim(const LatticeGraph& g, double alpha, double b, double prune_below) {
  if (alpha <= 0.0) throw std::invalid_argument("long-range exponent must be positive");
  ProblemHamiltonian h;
  h.kind = SystemKind::Spin;
  h.n_sites = g.n_sites;
  h.n_qubits = g.n_sites;
  h.lattice = g;
  const auto j = long_range_couplings(g, alpha);
  for (int a = 0; a < g.n_sites; ++a) {
    for (int bb = a + 1; bb < g.n_sites; ++bb) {
      const double v = j[static_cast<std::size_t>(a)][static_cast<std::size_t>(bb)];
      if (std::abs(v) < prune_below) continue;
      h.terms.push_back(HamiltonianTerm{{a, bb}, SpinOperator(PauliString{{a, Pauli::X}, {bb, Pauli::X}}, v), {}});
    }
  }
  add_field_terms(h, b);
  return h;
}

namespace {

void finish_fermionic_term(ProblemHamiltonian& h, std::vector<int> support, FermionOperator op) {
  op = op.normal_ordered();
  if (op.empty()) return;
  HamiltonianTerm t;
  t.support = std::move(support);
  t.spin = jordan_wigner(op, h.n_qubits);
  t.fermion = std::move(op);
  h.terms.push_back(std::move(t));
}

}  // namespace

ProblemHamiltonian build_fermi_hubbard(const LatticeGraph& g, double t, double u) {
  ProblemHamiltonian h;
  h.kind = SystemKind::Fermionic;
  h.n_sites = g.n_sites;
  h.n_qubits = 2 * g.n_sites;
  h.n_electrons = g.n_sites;
  h.ms2 = g.n_sites % 2;  // half filling, lowest spin projection
  h.lattice = g;
  for (const auto& [p, q] : g.edges) {
    FermionOperator hop = (FermionOperator::excitation(p, q) + FermionOperator::excitation(q, p)) * cplx{-t};
    finish_fermionic_term(h, {p, q}, hop);
  }
  if (u != 0.0) {
    for (int p = 0; p < g.n_sites; ++p) {
      const FermionOperator e = FermionOperator::excitation(p, p);
      finish_fermionic_term(h, {p}, (e * e - e) * cplx{0.5 * u});
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// FCIDUMP

double FcidumpData::eri(int p, int q, int r, int s) const {
  const auto n = static_cast<std::size_t>(n_orb);
  return g[((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n + static_cast<std::size_t>(r)) * n +
           static_cast<std::size_t>(s)];
}

namespace {

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

int header_int(const std::string& header, const std::string& key, bool required, int fallback) {
  std::size_t pos = 0;
  while ((pos = header.find(key, pos)) != std::string::npos) {
    const bool boundary = pos == 0 || !std::isalnum(static_cast<unsigned char>(header[pos - 1]));
    std::size_t eq = pos + key.size();
    while (eq < header.size() && header[eq] == ' ') ++eq;
    if (boundary && eq < header.size() && header[eq] == '=') {
      try {
        return std::stoi(header.substr(eq + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("FCIDUMP header: bad value for " + key);
      }
    }
    pos += key.size();
  }
  if (required) throw std::invalid_argument("FCIDUMP header: missing " + key);
  return fallback;
}

void set_checked(double& slot, bool& seen, double v) {
  if (seen && std::abs(slot - v) > 1e-12) throw std::invalid_argument("FCIDUMP: conflicting duplicate entry");
  slot = v;
  seen = true;
}

}  // namespace

FcidumpData parse_fcidump(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string header;
  bool started = false;
  bool closed = false;
  while (std::getline(in, line)) {
    const std::string u = upper(line);
    if (!started) {
      const auto pos = u.find("&FCI");
      if (pos == std::string::npos) {
        if (u.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw std::invalid_argument("FCIDUMP: missing &FCI header");
      }
      started = true;
    }
    header += " " + u;
    const std::string trimmed = u.substr(0, u.find_last_not_of(" \t\r") + 1);
    if (u.find("&END") != std::string::npos || (!trimmed.empty() && trimmed.back() == '/')) {
      closed = true;
      break;
    }
  }
  if (!started || !closed) throw std::invalid_argument("FCIDUMP: malformed header");

  FcidumpData f;
  f.n_orb = header_int(header, "NORB", true, 0);
  f.n_elec = header_int(header, "NELEC", true, 0);
  f.ms2 = header_int(header, "MS2", false, 0);
  if (f.n_orb <= 0 || f.n_orb > 32) throw std::invalid_argument("FCIDUMP: unsupported NORB");
  const auto n = static_cast<std::size_t>(f.n_orb);
  f.h = Eigen::MatrixXd::Zero(f.n_orb, f.n_orb);
  f.g.assign(n * n * n * n, 0.0);
  std::vector<char> seen_g(f.g.size(), 0);
  std::vector<char> seen_h(n * n, 0);
  bool seen_core = false;

  auto gidx = [n](int p, int q, int r, int s) {
    return ((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n + static_cast<std::size_t>(r)) * n +
           static_cast<std::size_t>(s);
  };

  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), 'D', 'E');
    std::replace(line.begin(), line.end(), 'd', 'e');
    std::istringstream ls(line);
    double v = 0.0;
    int i = 0;
    int j = 0;
    int k = 0;
    int l = 0;
    if (!(ls >> v >> i >> j >> k >> l)) throw std::invalid_argument("FCIDUMP: malformed integral line: " + line);
    for (int idx : {i, j, k, l}) {
      if (idx < 0 || idx > f.n_orb) throw std::invalid_argument("FCIDUMP: index out of range");
    }
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      set_checked(f.core, seen_core, v);
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0) throw std::invalid_argument("FCIDUMP: index out of range");
      const int p = i - 1;
      const int q = j - 1;
      bool s1 = seen_h[static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)] != 0;
      set_checked(f.h(p, q), s1, v);
      bool s2 = seen_h[static_cast<std::size_t>(q) * n + static_cast<std::size_t>(p)] != 0;
      set_checked(f.h(q, p), s2, v);
      seen_h[static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)] = 1;
      seen_h[static_cast<std::size_t>(q) * n + static_cast<std::size_t>(p)] = 1;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0) throw std::invalid_argument("FCIDUMP: index out of range");
      const int p = i - 1;
      const int q = j - 1;
      const int r = k - 1;
      const int s = l - 1;
      const int perms[8][4] = {{p, q, r, s}, {q, p, r, s}, {p, q, s, r}, {q, p, s, r},
                               {r, s, p, q}, {s, r, p, q}, {r, s, q, p}, {s, r, q, p}};
      for (const auto& pm : perms) {
        const std::size_t idx = gidx(pm[0], pm[1], pm[2], pm[3]);
        bool sg = seen_g[idx] != 0;
        set_checked(f.g[idx], sg, v);
        seen_g[idx] = 1;
      }
    }
  }
  return f;
}

FcidumpData read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open FCIDUMP file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fcidump(ss.str());
}

std::string serialize_fcidump(const FcidumpData& f) {
  std::ostringstream out;
  out << " &FCI NORB=" << f.n_orb << ",NELEC=" << f.n_elec << ",MS2=" << f.ms2 << ",\n";
  out << "  ORBSYM=";
  for (int p = 0; p < f.n_orb; ++p) out << "1,";
  out << "\n  ISYM=1,\n &END\n";
  char buf[128];
  auto emit = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof(buf), "%.17g %d %d %d %d\n", v, i, j, k, l);
    out << buf;
  };
  for (int p = 0; p < f.n_orb; ++p) {
    for (int q = 0; q <= p; ++q) {
      for (int r = 0; r < f.n_orb; ++r) {
        for (int s = 0; s <= r; ++s) {
          if (p * (p + 1) / 2 + q < r * (r + 1) / 2 + s) continue;
          const double v = f.eri(p, q, r, s);
          if (v != 0.0) emit(v, p + 1, q + 1, r + 1, s + 1);
        }
      }
    }
  }
  for (int p = 0; p < f.n_orb; ++p) {
    for (int q = 0; q <= p; ++q) {
      if (f.h(p, q) != 0.0) emit(f.h(p, q), p + 1, q + 1, 0, 0);
    }
  }
  emit(f.core, 0, 0, 0, 0);
  return out.str();
}

ProblemHamiltonian build_active_space_hamiltonian(const FcidumpData& f) {
  ProblemHamiltonian h;
  h.kind = SystemKind::Fermionic;
  h.n_sites = f.n_orb;
  h.n_qubits = 2 * f.n_orb;
  h.n_electrons = f.n_elec;
  h.ms2 = f.ms2;
  h.constant = f.core;
  const int n = f.n_orb;
  std::map<std::vector<int>, FermionOperator> grouped;
  auto support_of = [](std::initializer_list<int> idx) {
    std::vector<int> s(idx);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };
  std::vector<FermionOperator> e(static_cast<std::size_t>(n * n));
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) e[static_cast<std::size_t>(p * n + q)] = FermionOperator::excitation(p, q);
  }
  auto E = [&](int p, int q) -> const FermionOperator& { return e[static_cast<std::size_t>(p * n + q)]; };
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (f.h(p, q) != 0.0) grouped[support_of({p, q})] += E(p, q) * cplx{f.h(p, q)};
    }
  }
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
          const double v = f.eri(p, q, r, s);
          if (v == 0.0) continue;
          FermionOperator t = E(p, q) * E(r, s);
          if (q == r) t -= E(p, s);
          grouped[support_of({p, q, r, s})] += t * cplx{0.5 * v};
        }
      }
    }
  }
  for (auto& [support, op] : grouped) finish_fermionic_term(h, support, op);
  return h;
}

// ---------------------------------------------------------------------------

TrotterSchedule make_trotter_schedule(int n_terms, double dtau, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("trotter schedule needs n >= 1");
  if (!(dtau > 0.0)) throw std::invalid_argument("trotter schedule needs dtau > 0");
  if (n_terms < 1) throw std::invalid_argument("trotter schedule needs at least one term");
  TrotterSchedule s;
  s.n_steps = n_steps;
  s.dtau = dtau;
  for (int j = 0; j < n_terms; ++j) s.per_step.push_back({j, 0.5});
  for (int j = n_terms - 1; j >= 0; --j) s.per_step.push_back({j, 0.5});
  return s;
}

ProblemHamiltonian split_pauli_terms(const ProblemHamiltonian& h) {
  if (h.kind != SystemKind::Spin) return h;
  struct Piece {
    int distance;
    int letter;
    HamiltonianTerm term;
  };
  std::vector<Piece> pieces;
  double identity = 0.0;
  for (const auto& t : h.terms) {
    for (const auto& [c, s] : t.spin.terms()) {
      HamiltonianTerm ht;
      for (const auto& [site, p] : s.factors()) ht.support.push_back(site);
      if (ht.support.empty()) {
        identity += c.real();
        continue;
      }
      ht.spin = SpinOperator(s, c);
      int distance = 0;
      for (std::size_t a = 0; a < ht.support.size(); ++a) {
        for (std::size_t b = a + 1; b < ht.support.size(); ++b) {
          const int i = ht.support[a];
          const int j = ht.support[b];
          distance = std::max(distance, h.lattice ? manhattan_distance(*h.lattice, i, j) : std::abs(j - i));
        }
      }
      pieces.push_back({distance, static_cast<int>(s.at(ht.support.front())), std::move(ht)});
    }
  }
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.letter < b.letter;
  });
  ProblemHamiltonian out = h;
  out.constant += identity;
  out.terms.clear();
  for (auto& p : pieces) out.terms.push_back(std::move(p.term));
  return out;
}

}  // namespace qitelab
