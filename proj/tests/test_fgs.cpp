// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>
#include <bit>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "qitelab/diagnostics.hpp"
#include "qitelab/fgs.hpp"
#include "qitelab/hamiltonians.hpp"
#include "qitelab/random.hpp"

using namespace qitelab;
using Catch::Approx;

namespace {

const cplx kI{0.0, 1.0};

// Recursive cofactor expansion along the first row.
double pfaffian_oracle(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  double sum = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    if (a(0, j) == 0.0) continue;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 1; k < n; ++k) {
      if (k != j) keep.push_back(k);
    }
    Eigen::MatrixXd sub(n - 2, n - 2);
    for (std::size_t r = 0; r < keep.size(); ++r) {
      for (std::size_t c = 0; c < keep.size(); ++c) sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a(keep[r], keep[c]);
    }
    sum += ((j % 2 == 1) ? 1.0 : -1.0) * a(0, j) * pfaffian_oracle(sub);
  }
  return sum;
}

Eigen::MatrixXd random_antisymmetric(Eigen::Index n, Rng& rng) {
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return a - a.transpose();
}

// Fock-space Majorana matrices built from explicit ladder operators.
std::vector<Eigen::MatrixXcd> fock_majoranas(int l) {
  const Eigen::Index dim = Eigen::Index{1} << l;
  std::vector<Eigen::MatrixXcd> out;
  for (int j = 0; j < l; ++j) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (((i >> j) & 1) == 0) continue;
      const int below = std::popcount(static_cast<unsigned>(i & ((Eigen::Index{1} << j) - 1)));
      c(i ^ (Eigen::Index{1} << j), i) = (below % 2 == 0) ? 1.0 : -1.0;
    }
    const Eigen::MatrixXcd cd = c.adjoint();
    out.push_back(cd + c);
    out.push_back(kI * (cd - c));
  }
  return out;
}

struct GaussianOracle {
  Eigen::VectorXcd psi;
  Eigen::MatrixXd gamma;
};

// Ground state of a random quadratic Hamiltonian (i/4) sum h_kl a_k a_l.
GaussianOracle random_gaussian_state(int l, Rng& rng) {
  const auto maj = fock_majoranas(l);
  const Eigen::MatrixXd h = random_antisymmetric(2 * l, rng);
  const Eigen::Index dim = Eigen::Index{1} << l;
  Eigen::MatrixXcd hq = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < 2 * l; ++k) {
    for (int m = 0; m < 2 * l; ++m) hq += 0.25 * kI * h(k, m) * maj[k] * maj[m];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hq);
  GaussianOracle o;
  o.psi = es.eigenvectors().col(0);
  o.gamma = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  for (int k = 0; k < 2 * l; ++k) {
    for (int m = 0; m < 2 * l; ++m) {
      if (k != m) o.gamma(k, m) = (kI * o.psi.dot(maj[k] * maj[m] * o.psi)).real();
    }
  }
  return o;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("pfaffian examples", "[fgs]") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 2.5, -2.5, 0;
  CHECK(pfaffian(a) == Approx(2.5));
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 4);
  b(0, 1) = b(2, 3) = 1;
  b(1, 0) = b(3, 2) = -1;
  CHECK(pfaffian(b) == Approx(1.0));
  CHECK_THROWS(pfaffian(Eigen::MatrixXd::Zero(3, 3)));
  CHECK(pfaffian(Eigen::MatrixXd(0, 0)) == 1.0);
}

TEST_CASE("pfaffian matches cofactor oracle and squares to the determinant", "[fgs][property]") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = random_antisymmetric(8, rng);
    CHECK(std::abs(pfaffian(a) - pfaffian_oracle(a)) < 1e-10 * std::max(1.0, std::abs(pfaffian_oracle(a))));
  }
  for (int n = 2; n <= 16; n += 2) {
    const Eigen::MatrixXd a = random_antisymmetric(n, rng);
    const double pf = pfaffian(a);
    CHECK(pf * pf == Approx(a.determinant()).epsilon(1e-8));
  }
}

TEST_CASE("pfaffian gradient matches finite differences", "[fgs][property]") {
  Rng rng(12);
  std::vector<Eigen::MatrixXd> cases = {random_antisymmetric(2, rng), random_antisymmetric(4, rng),
                                        random_antisymmetric(6, rng), random_antisymmetric(8, rng)};
  // Singular cases: rank-2 4x4 and a 6x6 with a zero row.
  const Eigen::VectorXd u = Eigen::VectorXd::Random(4);
  const Eigen::VectorXd v = Eigen::VectorXd::Random(4);
  cases.push_back(u * v.transpose() - v * u.transpose());
  Eigen::MatrixXd z = random_antisymmetric(6, rng);
  z.row(2).setZero();
  z.col(2).setZero();
  cases.push_back(z);
  for (const auto& a : cases) {
    const Eigen::MatrixXd g = pfaffian_gradient(a);
    const double h = 1e-5;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index s = r + 1; s < a.rows(); ++s) {
        Eigen::MatrixXd p = a;
        Eigen::MatrixXd m = a;
        p(r, s) += h;
        p(s, r) -= h;
        m(r, s) -= h;
        m(s, r) += h;
        const double fd = (pfaffian(p) - pfaffian(m)) / (2 * h);
        CHECK(std::abs(g(r, s) - fd) < 1e-6);
        CHECK(g(s, r) == Approx(-g(r, s)).margin(1e-12));
      }
    }
  }
}

TEST_CASE("vacuum is even and basis states follow occupation parity", "[fgs]") {
  const auto vac = CovarianceMatrix::vacuum(3);
  CHECK(vac.parity() == 1);
  CHECK(vac.is_pure());
  // -i a_0 a_1 = 1 - 2 n_0 has value 1 on the vacuum.
  MajoranaMonomial z;
  z.coefficient = -kI;
  z.mask = 0b11;
  CHECK(std::abs(wick_expectation(vac, z) - cplx(1.0)) < 1e-14);
  CHECK(std::abs(wick_expectation(vac, MajoranaMonomial{}) - cplx(1.0)) < 1e-14);
  for (Index occ = 0; occ < 8; ++occ) {
    CHECK(CovarianceMatrix::basis_state(3, occ).parity() == (std::popcount(occ) % 2 == 0 ? 1 : -1));
  }
}

TEST_CASE("wick expectation matches Fock space for short monomials", "[fgs][property]") {
  Rng rng(13);
  for (int l = 1; l <= 3; ++l) {
    const auto maj = fock_majoranas(l);
    for (int trial = 0; trial < 5; ++trial) {
      const auto o = random_gaussian_state(l, rng);
      const CovarianceMatrix cov(o.gamma);
      REQUIRE(cov.is_pure(1e-10));
      for (Index mask = 0; mask < (Index{1} << (2 * l)); ++mask) {
        if (std::popcount(mask) > 6) continue;
        Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(Eigen::Index{1} << l, Eigen::Index{1} << l);
        for (Index m = mask; m != 0; m &= m - 1) prod = prod * maj[static_cast<std::size_t>(std::countr_zero(m))];
        const cplx fock = o.psi.dot(prod * o.psi);
        MajoranaMonomial mono;
        mono.mask = mask;
        CHECK(std::abs(wick_expectation(cov, mono) - fock) < 1e-10);
      }
      // Unsorted index list: a_2 a_0 = -a_0 a_2.
      if (l >= 2) {
        const cplx fock = o.psi.dot(maj[2] * maj[0] * o.psi);
        CHECK(std::abs(wick_expectation(cov, std::vector<int>{2, 0}) - fock) < 1e-10);
      }
    }
  }
  CHECK_THROWS(wick_expectation(CovarianceMatrix::vacuum(2), std::vector<int>{1, 1}));
}

TEST_CASE("parity of random Gaussian states matches the Fock parity", "[fgs][property]") {
  Rng rng(14);
  int odd = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto o = random_gaussian_state(3, rng);
    double parity = 0.0;
    for (Eigen::Index i = 0; i < o.psi.size(); ++i) {
      parity += std::norm(o.psi[i]) * ((std::popcount(static_cast<unsigned>(i)) % 2 == 0) ? 1.0 : -1.0);
    }
    CHECK(CovarianceMatrix(o.gamma).parity() == (parity > 0 ? 1 : -1));
    if (parity < 0) ++odd;
  }
  CHECK(odd > 0);
  CHECK(odd < 40);
}

TEST_CASE("covariance from state matches the Fock oracle", "[fgs]") {
  Rng rng(15);
  const auto o = random_gaussian_state(3, rng);
  const auto cov = covariance_from_state(StateVector(3, o.psi));
  CHECK(max_abs(cov.gamma - o.gamma) < 1e-12);
}

TEST_CASE("covariance utilities", "[fgs]") {
  Rng rng(16);
  const auto c = random_pure_covariance(3, rng);
  CHECK(c.is_pure(1e-10));
  CHECK_NOTHROW(validate_covariance(c));
  const auto pq = c.to_pq();
  CHECK(pq.ordering == Ordering::PQ);
  CHECK(pq.gamma(0, 3) == c.gamma(0, 1));
  CHECK(max_abs(pq.to_interleaved().gamma - c.gamma) == 0.0);
  CHECK(pq.parity() == c.parity());
  const auto back = read_covariance(write_covariance(pq));
  CHECK(back.ordering == Ordering::PQ);
  CHECK(max_abs(back.gamma - pq.gamma) == 0.0);
  CHECK_THROWS(read_covariance("ordering interleaved\nmodes 1\n0 1\n"));
  CHECK_THROWS(read_covariance("ordering sideways\nmodes 1\n0 1\n-1 0\n"));
  CHECK_THROWS(read_covariance("ordering interleaved\nmodes 1\n0 2\n-2 0\n"));
  Eigen::MatrixXd bad = c.gamma;
  bad(0, 1) += 1e-6;
  CHECK_THROWS(validate_covariance(CovarianceMatrix(bad)));
  CHECK_THROWS(CovarianceMatrix(Eigen::MatrixXd::Zero(3, 3)));
  int odd = 0;
  for (int i = 0; i < 40; ++i) odd += random_pure_covariance(2, rng).parity() < 0 ? 1 : 0;
  CHECK(odd > 0);
  CHECK(odd < 40);
}

TEST_CASE("one-body density round trip", "[fgs]") {
  Rng rng(17);
  const auto c = random_slater_covariance(4, 2, rng);
  CHECK(c.is_pure(1e-10));
  CHECK(is_number_conserving(c));
  const Eigen::MatrixXcd rho = one_body_density(c);
  CHECK(rho.trace().real() == Approx(2.0));
  CHECK((rho * rho - rho).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(max_abs(covariance_from_density(rho).gamma - c.gamma) < 1e-12);
  CHECK_FALSE(is_number_conserving(random_pure_covariance(4, rng)));
}

TEST_CASE("ghf energy matches statevector expectations", "[fgs]") {
  Rng rng(18);
  const auto ring = build_lattice(LatticeKind::Ring, {4});
  const std::vector<SpinOperator> ops = {build_heisenberg(ring, {}, 0.3).total(), build_tfim(ring, 0.5, 0.4).total()};
  for (const auto& h : ops) {
    const auto e = MajoranaPolynomialEnergy::from_spin(h, 4);
    for (int trial = 0; trial < 5; ++trial) {
      const auto o = random_gaussian_state(4, rng);
      const double sv = expectation(h, StateVector(4, o.psi)).real();
      CHECK(ghf_energy(CovarianceMatrix(o.gamma), e) == Approx(sv).margin(1e-10));
    }
  }
  // Field-only TFIM on the vacuum: B sum Z_i = B L.
  const auto field = build_tfim(ring, 50.0, 0.7, 1e-3).total();
  CHECK(ghf_energy(CovarianceMatrix::vacuum(4), MajoranaPolynomialEnergy::from_spin(field, 4)) == Approx(0.7 * 4));
  CHECK(ghf_energy(CovarianceMatrix::vacuum(2), MajoranaPolynomialEnergy(2)) == 0.0);
  CHECK_THROWS(MajoranaPolynomialEnergy::from_spin(SpinOperator(PauliString{{0, Pauli::X}}), 2));
  CHECK_THROWS(MajoranaPolynomialEnergy::from_spin(SpinOperator(PauliString{{0, Pauli::Z}}, kI), 2));
}

TEST_CASE("ghf energy agrees with closed Heisenberg and Ising forms", "[fgs]") {
  // Closed forms in 0-based Majorana indices for sites i < j:
  //   XX + YY -> (-1)^{j-i} [Pf(2i+1 .. 2j) - Pf(2i, 2i+2 .. 2j-1, 2j+1)]
  //   ZZ      -> Pf(2i, 2i+1, 2j, 2j+1)
  //   XX      -> (-1)^{j-i} Pf(2i+1 .. 2j)
  //   Z_i     -> -Gamma_{2i, 2i+1}
  const int n = 5;
  Rng rng(19);
  const auto g = build_lattice(LatticeKind::Ring, {n});
  HeisenbergCouplings lr;
  lr.kind = HeisenbergCouplings::Kind::LongRange;
  lr.alpha = 1.3;
  const double b = 0.35;
  const auto hm = build_heisenberg(g, lr, b);
  const auto tf = build_tfim(g, 1.3, b);
  const auto dist = g.distances();
  auto sub_pf = [](const Eigen::MatrixXd& gm, const std::vector<int>& idx) {
    Eigen::MatrixXd s(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c) s(r, c) = gm(idx[r], idx[c]);
    return pfaffian_oracle(s);
  };
  for (int trial = 0; trial < 3; ++trial) {
    const auto gam = random_pure_covariance(n, rng).gamma;
    double e_hm = 0.0;
    double e_tf = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double jij = std::pow(dist[i][j], -1.3);
        std::vector<int> s1;
        for (int k = 2 * i + 1; k <= 2 * j; ++k) s1.push_back(k);
        std::vector<int> s2 = {2 * i};
        for (int k = 2 * i + 2; k <= 2 * j - 1; ++k) s2.push_back(k);
        s2.push_back(2 * j + 1);
        const double sign = ((j - i) % 2 == 0) ? 1.0 : -1.0;
        e_hm += jij * (sign * (sub_pf(gam, s1) - sub_pf(gam, s2)) + sub_pf(gam, {2 * i, 2 * i + 1, 2 * j, 2 * j + 1}));
        e_tf += jij * sign * sub_pf(gam, s1);
      }
      e_hm -= b * gam(2 * i, 2 * i + 1);
      e_tf -= b * gam(2 * i, 2 * i + 1);
    }
    CHECK(ghf_energy(CovarianceMatrix(gam), MajoranaPolynomialEnergy::from_spin(hm.total(), n)) == Approx(e_hm).margin(1e-10));
    CHECK(ghf_energy(CovarianceMatrix(gam), MajoranaPolynomialEnergy::from_spin(tf.total(), n)) == Approx(e_tf).margin(1e-10));
  }
}

TEST_CASE("mean-field matrix equals four times the matrix finite difference", "[fgs][property]") {
  Rng rng(20);
  // Random 3-mode polynomial with every degree-2 and degree-4 monomial.
  MajoranaPolynomialEnergy quartic(3);
  for (Index mask = 1; mask < 64; ++mask) {
    const int d = std::popcount(mask);
    if (d == 2 || d == 4) quartic.add(rng.normal(), mask);
  }
  HeisenbergCouplings lr;
  lr.kind = HeisenbergCouplings::Kind::LongRange;
  MajoranaPolynomialEnergy spin = MajoranaPolynomialEnergy::from_spin(build_heisenberg(build_lattice(LatticeKind::Ring, {6}), lr, 0.2).total(), 6);
  for (const MajoranaPolynomialEnergy* e : {&quartic, &spin}) {
    for (double scale : {1.0, 0.6}) {  // pure and mixed covariance
      const CovarianceMatrix c(scale * random_pure_covariance(e->n_modes(), rng).gamma);
      const Eigen::MatrixXd f = mean_field_matrix(c, *e);
      CHECK(max_abs(f + f.transpose()) < 1e-12);
      const double h = 1e-5;
      double worst = 0.0;
      for (Eigen::Index k = 0; k < f.rows(); ++k) {
        for (Eigen::Index l = k + 1; l < f.rows(); ++l) {
          Eigen::MatrixXd dp = c.gamma;
          Eigen::MatrixXd dm = c.gamma;
          dp(k, l) += h / 2;
          dp(l, k) -= h / 2;
          dm(k, l) -= h / 2;
          dm(l, k) += h / 2;
          const double fd = (ghf_energy(CovarianceMatrix(dp), *e) - ghf_energy(CovarianceMatrix(dm), *e)) / (2 * h);
          worst = std::max(worst, std::abs(f(k, l) - 4.0 * fd));
        }
      }
      CHECK(worst < 1e-6);
    }
  }
  // Quadratic energies have a constant mean-field matrix; E = 0 gives F = 0.
  MajoranaPolynomialEnergy quad(2);
  quad.add(0.7, 0b0011);
  quad.add(-0.2, 0b0110);
  const auto f1 = mean_field_matrix(random_pure_covariance(2, rng), quad);
  const auto f2 = mean_field_matrix(random_pure_covariance(2, rng), quad);
  CHECK(max_abs(f1 - f2) == 0.0);
  CHECK(max_abs(mean_field_matrix(random_pure_covariance(2, rng), MajoranaPolynomialEnergy(2))) == 0.0);
}

TEST_CASE("single-mode minimization reaches the analytic minimum", "[fgs]") {
  const double eps = 0.8;
  // -eps Z: vacuum, energy -eps. +eps Z: occupied, energy -eps, odd parity.
  auto down = ghf_minimize(MajoranaPolynomialEnergy::from_spin(SpinOperator(PauliString{{0, Pauli::Z}}, -eps), 1));
  CHECK(down.energy == Approx(-eps));
  CHECK(max_abs(down.gamma.gamma - CovarianceMatrix::vacuum(1).gamma) < 1e-10);
  CHECK(down.parity == 1);
  auto up = ghf_minimize(MajoranaPolynomialEnergy::from_spin(SpinOperator(PauliString{{0, Pauli::Z}}, eps), 1));
  CHECK(up.energy == Approx(-eps));
  CHECK(up.parity == -1);
  const auto mf = self_consistent_update(mean_field_matrix(CovarianceMatrix::vacuum(1),
                                                           MajoranaPolynomialEnergy::from_spin(SpinOperator(PauliString{{0, Pauli::Z}}, eps), 1)));
  CHECK(max_abs(mf.gamma - CovarianceMatrix::basis_state(1, 1).gamma) < 1e-12);
}

TEST_CASE("ghf flow keeps purity and never raises the energy", "[fgs][property]") {
  // Gapped mean field, so the flow alone converges in a few hundred steps.
  const auto h = build_tfim(build_lattice(LatticeKind::Ring, {6}), 1.0, 0.7).total();
  const auto e = MajoranaPolynomialEnergy::from_spin(h, 6);
  GhfConfig cfg;
  cfg.restarts = 3;
  cfg.warmup_iterations = 0;
  const auto r = ghf_minimize(e, cfg);
  REQUIRE(r.flow_energies.size() > 10);
  for (std::size_t i = 1; i < r.flow_energies.size(); ++i) CHECK(r.flow_energies[i] <= r.flow_energies[i - 1] + 1e-10);
  CHECK(r.max_purity_residual < 1e-6);
  CHECK(r.converged);
  CHECK(r.gamma.is_pure());
  CHECK(r.energy >= spectrum(h, 6).energies[0] - 1e-10);
  CHECK(r.history.size() == 3);
  const std::string csv = ghf_summary_csv(r);
  CHECK(csv.rfind("restart,iterations,energy,purity_residual,converged\n", 0) == 0);
  // Same seed, same answer.
  CHECK(ghf_minimize(e, cfg).energy == r.energy);
}

TEST_CASE("ghf reproduces the transverse-field Ising mean-field reference", "[fgs]") {
  const auto h = build_tfim(build_lattice(LatticeKind::Ring, {10}), 0.3, 0.4);
  GhfConfig cfg;
  cfg.restarts = 2;
  const auto r = ghf_minimize(MajoranaPolynomialEnergy::from_spin(h.total(), 10), cfg);
  CHECK(r.energy == Approx(-6.8874).margin(5e-3));
  const auto exact = spectrum(h.total(), 10);
  CHECK(100.0 * fidelity(synthesize_fgs_state(r.gamma), exact.ground) == Approx(96.410).margin(0.5));
}

TEST_CASE("number-conserving mode returns Slater determinants", "[fgs]") {
  const auto h = build_fermi_hubbard(build_lattice(LatticeKind::Ring, {4}), 1.0, 2.0);
  const auto e = MajoranaPolynomialEnergy::from_spin(h.total(), 8);
  GhfConfig cfg;
  cfg.number_conserving = true;
  cfg.n_particles = 4;
  cfg.restarts = 2;
  const auto r = ghf_minimize(e, cfg);
  CHECK(is_number_conserving(r.gamma, 1e-8));
  CHECK(one_body_density(r.gamma).trace().real() == Approx(4.0));
  const auto psi = synthesize_fgs_state(r.gamma);
  CHECK(expectation(h.total(), psi).real() == Approx(r.energy).margin(1e-8));
  CHECK(max_abs(covariance_from_state(psi).gamma - r.gamma.gamma) < 1e-8);
}

TEST_CASE("synthesis base cases", "[fgs]") {
  const auto vac = synthesize_fgs_state(CovarianceMatrix::vacuum(3));
  CHECK(std::norm(vac.amplitudes[0]) == Approx(1.0));
  for (int l : {1, 2, 3}) {
    const auto odd = CovarianceMatrix::basis_state(l, Index{1} << (l - 1));
    const auto gen = gaussian_generator(odd);
    CHECK(gen.odd);
    const auto psi = synthesize_fgs_state(odd);
    CHECK(std::norm(psi.amplitudes[static_cast<Eigen::Index>(Index{1} << (l - 1))]) == Approx(1.0));
    // Generic path, bypassing the Slater shortcut.
    const auto ref = StateVector::basis(l, Index{1} << (l - 1));
    const auto viaexp = apply_exp_hermitian(gen.hermitian_generator(), cplx(0.0, -1.0), ref).state;
    CHECK(std::norm(viaexp.amplitudes[static_cast<Eigen::Index>(Index{1} << (l - 1))]) == Approx(1.0));
  }
  Eigen::MatrixXd mixed = 0.5 * CovarianceMatrix::vacuum(2).gamma;
  CHECK_THROWS(synthesize_fgs_state(CovarianceMatrix(mixed)));
}

TEST_CASE("synthesized states reproduce the covariance and energy", "[fgs][property]") {
  Rng rng(21);
  const auto h = build_heisenberg(build_lattice(LatticeKind::Ring, {3}), {}, 0.25).total();
  const auto e = MajoranaPolynomialEnergy::from_spin(h, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_pure_covariance(3, rng);
    const auto gen = gaussian_generator(c);
    CHECK(gen.odd == (c.parity() < 0));
    const auto psi = synthesize_fgs_state(c);
    double parity = 0.0;
    for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
      parity += std::norm(psi.amplitudes[i]) * ((std::popcount(static_cast<unsigned>(i)) % 2 == 0) ? 1.0 : -1.0);
    }
    CHECK((parity > 0) == !gen.odd);
    if (trial < 10) {
      CHECK(max_abs(covariance_from_state(psi).gamma - c.gamma) < 1e-8);
      CHECK(expectation(h, psi).real() == Approx(ghf_energy(c, e)).margin(1e-8));
    }
  }
}

TEST_CASE("gaussian generator conventions", "[fgs]") {
  Rng rng(22);
  const int l = 2;
  const auto maj = fock_majoranas(l);
  for (int trial = 0; trial < 3; ++trial) {
    // Random SO(4) rotation.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Random(2 * l, 2 * l));
    Eigen::MatrixXd r = qr.householderQ();
    if (r.determinant() < 0) r.col(0) *= -1.0;
    const auto gen = generator_from_rotation(r);
    CHECK(max_abs(gen.g.exp() - r) < 1e-10);
    CHECK(max_abs(gen.g + gen.g.transpose()) < 1e-14);
    // U = exp(1/4 sum G a a); U^dagger a_mu U = sum R_mu,nu a_nu.
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(4, 4);
    for (int a = 0; a < 2 * l; ++a)
      for (int b = 0; b < 2 * l; ++b) k += 0.25 * gen.g(a, b) * maj[a] * maj[b];
    const Eigen::MatrixXcd u = k.exp();
    for (int mu = 0; mu < 2 * l; ++mu) {
      Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(4, 4);
      for (int nu = 0; nu < 2 * l; ++nu) rhs += r(mu, nu) * maj[nu];
      CHECK((u.adjoint() * maj[mu] * u - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
    // JW image of the Hermitian generator matches i K, and M, Delta rebuild it up to a constant.
    CHECK((to_matrix(gen.hermitian_generator(), l) - kI * k).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXcd diff = to_matrix(jordan_wigner(gen.ladder_generator(), l), l) - kI * k;
    CHECK((diff - diff(0, 0) * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((gen.m() - gen.m().adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((gen.delta() + gen.delta().transpose()).cwiseAbs().maxCoeff() < 1e-14);
  }
  // Rotations with -1 eigenvalues: a_1 -> -a_1, a_3 -> -a_3.
  Eigen::MatrixXd flip = Eigen::MatrixXd::Identity(4, 4);
  flip(1, 1) = flip(3, 3) = -1;
  CHECK(max_abs(generator_from_rotation(flip).g.exp() - flip) < 1e-10);
  Eigen::MatrixXd refl = Eigen::MatrixXd::Identity(4, 4);
  refl(0, 0) = -1;
  CHECK_THROWS(generator_from_rotation(refl));
}

TEST_CASE("slater determinants", "[fgs]") {
  Eigen::MatrixXcd occ = Eigen::MatrixXcd::Zero(4, 2);
  occ(0, 0) = occ(1, 1) = 1.0;
  const auto psi = slater_determinant(occ, 4);
  CHECK(std::norm(psi.amplitudes[3]) == Approx(1.0));
  const double th = 0.37;
  Eigen::MatrixXcd rot(2, 1);
  rot << std::cos(th), std::sin(th);
  const auto two = slater_determinant(rot, 2);
  CHECK(two.amplitudes[1].real() == Approx(std::cos(th)));
  CHECK(two.amplitudes[2].real() == Approx(std::sin(th)));
  Eigen::MatrixXcd bad(2, 1);
  bad << 1.0, 0.1;
  CHECK_THROWS(slater_determinant(bad, 2));

  // Restricted determinant of the hopping orbitals for a 4-site Hubbard ring.
  const auto h = build_fermi_hubbard(build_lattice(LatticeKind::Ring, {4}), 1.0, 1.5);
  Eigen::MatrixXd hop = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) hop(i, (i + 1) % 4) = hop((i + 1) % 4, i) = -1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hop);
  Eigen::MatrixXcd orb = Eigen::MatrixXcd::Zero(8, 4);
  for (int k = 0; k < 2; ++k) {
    for (int p = 0; p < 4; ++p) {
      orb(2 * p, 2 * k) = es.eigenvectors()(p, k);
      orb(2 * p + 1, 2 * k + 1) = es.eigenvectors()(p, k);
    }
  }
  const auto det = slater_determinant(orb, 8);
  CHECK(det.norm() == Approx(1.0));
  const Eigen::MatrixXcd rho = orb.conjugate() * orb.transpose();
  const double sv = expectation(h.total(), det).real();
  CHECK(ghf_energy(covariance_from_density(rho), MajoranaPolynomialEnergy::from_spin(h.total(), 8)) == Approx(sv).margin(1e-10));
  CHECK(max_abs(covariance_from_state(det).gamma - covariance_from_density(rho).gamma) < 1e-10);
}
