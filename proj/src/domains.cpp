// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "qitelab/qite.hpp"

namespace qitelab {

std::string to_string(BasisKind b) { return b == BasisKind::FullPauli ? "full-pauli" : "singles-doubles"; }

std::string to_string(DomainRule r) {
  switch (r) {
    case DomainRule::Manhattan: return "manhattan";
    case DomainRule::NearestSites: return "nearest-sites";
    case DomainRule::MutualInformation: return "mutual-information";
  }
  return "?";
}

int DomainPlan::max_domain() const {
  int m = 0;
  for (const auto& g : groups) m = std::max(m, static_cast<int>(g.domain.size()));
  return m;
}

bool DomainPlan::full_domain() const {
  return std::all_of(groups.begin(), groups.end(),
                     [&](const DomainGroup& g) { return static_cast<int>(g.domain.size()) == n_sites; });
}

namespace {

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::size_t basis_size(const DomainPlan& p, const DomainGroup& g) {
  const auto k = g.domain.size();
  if (p.basis == BasisKind::FullPauli) return k >= 31 ? 0 : std::size_t{1} << (2 * k);
  return fermionic_generators(g.domain).size();
}

void check_support(const std::vector<int>& support, int n) {
  if (support.empty()) throw std::invalid_argument("domain: empty support");
  for (int s : support) {
    if (s < 0 || s >= n) throw std::out_of_range("domain: support index out of range");
  }
}

}  // namespace

std::string DomainPlan::to_text() const {
  std::ostringstream out;
  out << "# qitelab domain plan v1\n";
  out << "kind " << (kind == SystemKind::Spin ? "spin" : "fermionic") << " rule " << to_string(rule) << " basis "
      << to_string(basis) << " nu " << nu << " sites " << n_sites << " seed " << seed << " groups " << groups.size()
      << " full_domain " << (full_domain() ? 1 : 0) << "\n";
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    out << "group " << i << " terms " << join(g.members) << " support " << join(g.support) << " domain "
        << join(g.domain) << " basis_size " << basis_size(*this, g) << "\n";
  }
  return out.str();
}

std::vector<int> manhattan_domain(const LatticeGraph& g, const std::vector<int>& support, int nu) {
  check_support(support, g.n_sites);
  if (nu < 0) throw std::invalid_argument("domain: nu must be non-negative");
  const auto dist = g.distances();
  std::vector<int> d;
  for (int q = 0; q < g.n_sites; ++q) {
    for (int p : support) {
      if (dist[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] <= nu) {
        d.push_back(q);
        break;
      }
    }
  }
  return d;
}

std::vector<int> nearest_sites_domain(const LatticeGraph& g, const std::vector<int>& support, int nu, Rng& rng) {
  check_support(support, g.n_sites);
  if (nu < 0) throw std::invalid_argument("domain: nu must be non-negative");
  const auto dist = g.distances();
  const std::set<int> in(support.begin(), support.end());
  std::vector<std::pair<int, int>> cand;  // (distance, site)
  for (int q = 0; q < g.n_sites; ++q) {
    if (in.count(q)) continue;
    int d = g.n_sites;
    for (int p : support) d = std::min(d, dist[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)]);
    cand.push_back({d, q});
  }
  // Seeded shuffle (Fisher-Yates), then a stable sort by distance.
  for (std::size_t i = cand.size(); i > 1; --i) std::swap(cand[i - 1], cand[rng.below(i)]);
  std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<int> d(support.begin(), support.end());
  for (std::size_t i = 0; i < cand.size() && static_cast<int>(i) < nu; ++i) d.push_back(cand[i].second);
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

std::vector<int> mutual_information_domain(const Eigen::MatrixXd& mi, const std::vector<int>& support, int nu) {
  if (mi.rows() != mi.cols()) throw std::invalid_argument("domain: mutual information must be square");
  const int n = static_cast<int>(mi.rows());
  check_support(support, n);
  if (nu < 0) throw std::invalid_argument("domain: nu must be non-negative");
  const std::set<int> in(support.begin(), support.end());
  std::vector<std::pair<double, int>> cand;
  for (int q = 0; q < n; ++q) {
    if (in.count(q)) continue;
    double best = -1.0;
    for (int p : support) best = std::max(best, mi(p, q));
    cand.push_back({best, q});
  }
  std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<int> d(support.begin(), support.end());
  for (std::size_t i = 0; i < cand.size() && static_cast<int>(i) < nu; ++i) d.push_back(cand[i].second);
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

namespace {

DomainPlan group_terms(const ProblemHamiltonian& h, const std::vector<std::vector<int>>& domains) {
  DomainPlan plan;
  plan.kind = h.kind;
  plan.basis = h.kind == SystemKind::Spin ? BasisKind::FullPauli : BasisKind::SinglesDoubles;
  plan.n_sites = h.n_sites;
  std::map<std::vector<int>, int> index;
  for (std::size_t t = 0; t < h.terms.size(); ++t) {
    const auto& term = h.terms[t];
    auto [it, inserted] = index.try_emplace(domains[t], static_cast<int>(plan.groups.size()));
    if (inserted) {
      DomainGroup g;
      g.domain = domains[t];
      if (h.kind == SystemKind::Fermionic) {
        for (int p : g.domain) {
          for (int m = 4 * p; m < 4 * p + 4; ++m) g.majoranas.push_back(m);
        }
      }
      plan.groups.push_back(std::move(g));
    }
    DomainGroup& g = plan.groups[static_cast<std::size_t>(it->second)];
    g.members.push_back(static_cast<int>(t));
    g.spin += term.spin;
    g.fermion += term.fermion;
    std::vector<int> u;
    std::set_union(g.support.begin(), g.support.end(), term.support.begin(), term.support.end(), std::back_inserter(u));
    g.support = u;
    plan.group_of_term.push_back(it->second);
  }
  for (auto& g : plan.groups) {
    g.spin.prune();
    g.fermion.prune();
  }
  return plan;
}

}  // namespace

DomainPlan plan_domains(const ProblemHamiltonian& h, int nu, std::uint64_t seed) {
  if (!h.lattice) throw std::invalid_argument("plan_domains: lattice systems need a geometry; pass mutual information");
  if (nu < 0) throw std::invalid_argument("plan_domains: nu must be non-negative");
  Rng rng(seed);
  std::vector<std::vector<int>> domains;
  for (const auto& t : h.terms) {
    domains.push_back(h.kind == SystemKind::Spin ? manhattan_domain(*h.lattice, t.support, nu)
                                                 : nearest_sites_domain(*h.lattice, t.support, nu, rng));
  }
  DomainPlan plan = group_terms(h, domains);
  plan.rule = h.kind == SystemKind::Spin ? DomainRule::Manhattan : DomainRule::NearestSites;
  plan.nu = nu;
  plan.seed = seed;
  return plan;
}

DomainPlan plan_domains(const ProblemHamiltonian& h, const Eigen::MatrixXd& mutual_information, int nu) {
  if (h.kind != SystemKind::Fermionic) throw std::invalid_argument("plan_domains: mutual information needs a fermionic H");
  if (mutual_information.rows() != h.n_sites) throw std::invalid_argument("plan_domains: MI size does not match H");
  std::vector<std::vector<int>> domains;
  for (const auto& t : h.terms) domains.push_back(mutual_information_domain(mutual_information, t.support, nu));
  DomainPlan plan = group_terms(h, domains);
  plan.rule = DomainRule::MutualInformation;
  plan.nu = nu;
  return plan;
}

std::vector<PauliString> spin_basis(const std::vector<int>& domain, int cap) {
  const int k = static_cast<int>(domain.size());
  if (k > cap) {
    const double n = std::pow(4.0, k);
    std::ostringstream msg;
    msg << "spin basis on " << k << " sites has " << n << " strings; the Gram matrix needs " << n * n * 8.0 / 1e9
        << " GB (cap is " << cap << " sites)";
    throw std::length_error(msg.str());
  }
  static constexpr Pauli kLetters[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  const std::size_t n = std::size_t{1} << (2 * k);
  std::vector<PauliString> out;
  out.reserve(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    PauliString s;
    for (int l = 0; l < k; ++l) {
      const auto digit = (idx >> (2 * (k - 1 - l))) & 3u;
      s.set(domain[static_cast<std::size_t>(l)], kLetters[digit]);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<FermionOperator> fermionic_generators(const std::vector<int>& domain) {
  std::vector<FermionOperator> out;
  const cplx i{0.0, 1.0};
  auto keep = [&](FermionOperator op) {
    op = op.normal_ordered();
    op.prune(1e-12);
    if (!op.empty()) out.push_back(std::move(op));
  };
  for (int p : domain) {
    for (int q : domain) {
      if (p == q) continue;
      keep((FermionOperator::excitation(p, q) - FermionOperator::excitation(q, p)) * i);
    }
  }
  for (int p : domain) {
    for (int r : domain) {
      if (!(p < r)) continue;
      for (int q : domain) {
        for (int s : domain) {
          if (!(q < s)) continue;
          const FermionOperator e = FermionOperator::excitation(p, q) * FermionOperator::excitation(r, s);
          keep((e - e.adjoint()) * i);
        }
      }
    }
  }
  return out;
}

std::vector<SpinOperator> fermionic_basis(const std::vector<int>& domain, int n_orbitals) {
  for (int p : domain) {
    if (p < 0 || p >= n_orbitals) throw std::out_of_range("fermionic_basis: orbital out of range");
  }
  std::vector<SpinOperator> out;
  for (const auto& g : fermionic_generators(domain)) out.push_back(jordan_wigner(g, 2 * n_orbitals));
  return out;
}

double required_manhattan_distance(double c, double n, double m, double eps) {
  if (!(c >= 0.0) || !(n > 0.0) || !(m > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("required_manhattan_distance: inputs must be positive");
  }
  return 2.0 * c * std::log(2.0 * std::sqrt(2.0) * n * m / eps);
}

double estimate_running_time(double m, double n, double k, double nu, double d) {
  if (m < 0.0 || n < 0.0 || k < 0.0 || nu < 0.0 || d < 0.0) {
    throw std::invalid_argument("estimate_running_time: inputs must be non-negative");
  }
  return m * n * std::exp(k * std::pow(nu, d));
}

}  // namespace qitelab
