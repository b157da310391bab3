// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>
#include <bit>
#include <cmath>
#include <numeric>

#include "qitelab/diagnostics.hpp"
#include "qitelab/hamiltonians.hpp"
#include "qitelab/random.hpp"

using namespace qitelab;
using Catch::Approx;

namespace {

// Random state with a fixed fermion-number parity.
StateVector random_parity_state(int n, int parity, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index(1) << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::popcount(static_cast<Index>(i)) % 2 == parity) v[i] = cplx(rng.normal(), rng.normal());
  }
  StateVector s(n, v);
  s.normalize();
  return s;
}

// Fermionic swap of adjacent modes m and m+1.
void fswap(StateVector& psi, int m) {
  Eigen::VectorXcd out(psi.amplitudes.size());
  for (Index i = 0; i < static_cast<Index>(out.size()); ++i) {
    const Index a = (i >> m) & 1;
    const Index b = (i >> (m + 1)) & 1;
    Index j = i & ~((Index{3}) << m);
    j |= (a << (m + 1)) | (b << m);
    out[static_cast<Eigen::Index>(j)] = (a && b) ? -psi.amplitudes[static_cast<Eigen::Index>(i)]
                                                 : psi.amplitudes[static_cast<Eigen::Index>(i)];
  }
  psi.amplitudes = out;
}

// Moves the modes of the listed orbitals to the front with fermionic swaps and
// traces out the rest as plain qubits.
Eigen::MatrixXcd dense_orbital_rdm(StateVector psi, const std::vector<int>& orbitals) {
  std::vector<int> order(static_cast<std::size_t>(psi.n_qubits));
  std::iota(order.begin(), order.end(), 0);
  int front = 0;
  for (int p : orbitals) {
    for (int mode : {2 * p, 2 * p + 1}) {
      int pos = static_cast<int>(std::find(order.begin(), order.end(), mode) - order.begin());
      while (pos > front) {
        fswap(psi, pos - 1);
        std::swap(order[static_cast<std::size_t>(pos)], order[static_cast<std::size_t>(pos - 1)]);
        --pos;
      }
      ++front;
    }
  }
  const Eigen::Index dk = Eigen::Index(1) << front;
  const Eigen::Index dr = psi.amplitudes.size() / dk;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dr; ++r) {
    const Eigen::VectorXcd block = psi.amplitudes.segment(r * dk, dk);
    rho += block * block.adjoint();
  }
  return rho;
}

// Exchange of orbitals p and p+1 (two modes each).
void swap_orbitals(StateVector& psi, int p) {
  const int m = 2 * p;
  fswap(psi, m + 1);
  fswap(psi, m);
  fswap(psi, m + 2);
  fswap(psi, m + 1);
}

double rdm_entropy(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  double s = 0.0;
  for (double w : es.eigenvalues()) {
    if (w > 1e-14) s -= w * std::log(w);
  }
  return s;
}

}  // namespace

TEST_CASE("spectrum of small operators", "[diagnostics]") {
  const auto r = spectrum(SpinOperator(PauliString({{0, Pauli::Z}})), 1);
  REQUIRE(r.energies.size() == 2);
  CHECK(r.energies[0] == Approx(-1.0));
  CHECK(r.energies[1] == Approx(1.0));
  CHECK(r.method == "dense");
  CHECK_FALSE(r.degenerate_ground);
}

TEST_CASE("lanczos agrees with dense diagonalization on 12 qubits", "[diagnostics][property]") {
  const auto h = build_tfim(build_lattice(LatticeKind::Ring, {12}), 0.3, 0.4).total();
  SpectrumConfig dense;
  dense.dense_max_qubits = 12;
  SpectrumConfig lanczos;
  lanczos.dense_max_qubits = 0;
  const auto a = spectrum(h, 12, dense);
  const auto b = spectrum(h, 12, lanczos);
  REQUIRE(a.method == "dense");
  REQUIRE(b.method == "lanczos");
  CHECK(std::abs(a.energies[0] - b.energies[0]) < 1e-9);
  CHECK(std::abs(a.energies[1] - b.energies[1]) < 1e-9);
  CHECK(fidelity(a.ground, b.ground) == Approx(1.0).margin(1e-9));

  const CompiledOperator op(h);
  Eigen::VectorXcd hg(b.ground.amplitudes.size());
  op.apply(b.ground.amplitudes, hg);
  CHECK((hg - b.energies[0] * b.ground.amplitudes).norm() <= 1e-8 * h.coefficient_norm());
}

TEST_CASE("spectra restricted to a conserved sector", "[diagnostics]") {
  const auto h = build_heisenberg(build_lattice(LatticeKind::Ring, {4}), {}, 0.0).total();
  // All spins up: every bond contributes +1.
  SpectrumConfig up;
  up.sector = [](Index i) { return i == 0; };
  const auto r = spectrum(h, 4, up);
  REQUIRE(r.energies.size() == 1);
  CHECK(r.energies[0] == Approx(4.0));
  CHECK(std::norm(r.ground.amplitudes[0]) == Approx(1.0));

  // One flipped spin: magnon energies 4 - 4(1 - cos k) with k = 0, pi/2, pi, 3pi/2.
  SpectrumConfig one;
  one.k = 3;
  one.sector = [](Index i) { return std::popcount(i) == 1; };
  const auto m = spectrum(h, 4, one);
  REQUIRE(m.energies.size() == 3);
  CHECK(m.energies[0] == Approx(-4.0));
  CHECK(m.energies[1] == Approx(0.0).margin(1e-12));
  CHECK(m.energies[2] == Approx(0.0).margin(1e-12));
  for (Eigen::Index i = 0; i < 16; ++i) {
    if (std::popcount(static_cast<Index>(i)) != 1) CHECK(m.ground.amplitudes[i] == cplx(0.0));
  }

  // Lanczos with the same mask on 12 qubits; half filling of a Hubbard ring.
  const auto fh = build_fermi_hubbard(build_lattice(LatticeKind::Ring, {6}), 1.0, 1.0).total();
  SpectrumConfig dense;
  dense.dense_max_qubits = 12;
  dense.sector = [](Index i) { return std::popcount(i) == 6; };
  SpectrumConfig lanczos = dense;
  lanczos.dense_max_qubits = 0;
  const auto a = spectrum(fh, 12, dense);
  const auto b = spectrum(fh, 12, lanczos);
  REQUIRE(b.method == "lanczos");
  CHECK(std::abs(a.energies[0] - b.energies[0]) < 1e-9);
  CHECK(std::abs(a.energies[1] - b.energies[1]) < 1e-9);
  CHECK(a.energies[0] >= spectrum(fh, 12, SpectrumConfig{}).energies[0] - 1e-9);
  CHECK(std::abs(expectation(fh, b.ground).real() - b.energies[0]) < 1e-9);

  SpectrumConfig none;
  none.sector = [](Index) { return false; };
  CHECK_THROWS(spectrum(h, 4, none));
}

TEST_CASE("fidelity", "[diagnostics]") {
  const auto psi = random_parity_state(4, 0, 1);
  CHECK(fidelity(psi, psi) == Approx(1.0));
  StateVector phased = psi;
  phased.amplitudes *= std::polar(1.0, 0.83);
  CHECK(fidelity(psi, phased) == Approx(1.0).margin(1e-14));
  CHECK(fidelity(StateVector::basis(3, 1), StateVector::basis(3, 2)) == 0.0);
  CHECK_THROWS(fidelity(StateVector(3), StateVector(4)));
}

TEST_CASE("orbital reduced density matrices", "[diagnostics]") {
  // Determinant: orbital 0 doubly occupied, orbital 1 alpha only, orbital 2 empty.
  const auto det = StateVector::basis(6, 0b000111);
  const auto r0 = orbital_rdm(det, {0});
  CHECK(std::abs(r0(3, 3) - 1.0) < 1e-14);
  CHECK(std::abs(r0.trace() - 1.0) < 1e-14);
  CHECK(std::abs(orbital_rdm(det, {1})(1, 1) - 1.0) < 1e-14);
  CHECK(std::abs(orbital_rdm(det, {2})(0, 0) - 1.0) < 1e-14);

  for (int seed = 0; seed < 6; ++seed) {
    const auto psi = random_parity_state(6, seed % 2, 40 + seed);
    for (const std::vector<int>& orbs : {std::vector<int>{1}, std::vector<int>{2}, std::vector<int>{0, 2},
                                         std::vector<int>{1, 2}}) {
      const auto rho = orbital_rdm(psi, orbs);
      CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
      CHECK((rho - dense_orbital_rdm(psi, orbs)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  // Product of two uncorrelated orbitals.
  Rng rng(9);
  Eigen::Vector4cd a;
  Eigen::Vector4cd b;
  a.setZero();
  b.setZero();
  a[0] = cplx(rng.normal(), 0.0);
  a[3] = cplx(rng.normal(), rng.normal());
  b[1] = cplx(rng.normal(), rng.normal());
  b[2] = cplx(rng.normal(), rng.normal());
  a.normalize();
  b.normalize();
  Eigen::VectorXcd v(16);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) v[i + 4 * j] = a[i] * b[j];
  }
  const StateVector prod(4, v);
  const Eigen::MatrixXcd ra = orbital_rdm(prod, {0});
  const Eigen::MatrixXcd rb = orbital_rdm(prod, {1});
  Eigen::MatrixXcd kron(16, 16);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) kron.block(4 * i, 4 * j, 4, 4) = rb(i, j) * ra;
  }
  CHECK((orbital_rdm(prod, {0, 1}) - kron).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(orbital_rdm(det, {0, 1, 2}));
  CHECK_THROWS(orbital_rdm(det, {3}));
}

TEST_CASE("mutual information and the multi-reference diagnostic", "[diagnostics]") {
  const auto det = StateVector::basis(8, 0b00110110);
  const auto m = mutual_information(det, 4);
  CHECK(m.mi.cwiseAbs().maxCoeff() == 0.0);
  CHECK(multiref_diagnostic(det, 4) == 0.0);

  // (|20> + |02>)/sqrt(2): each orbital is an even mixture of empty and doubly occupied.
  Eigen::VectorXcd pair = Eigen::VectorXcd::Zero(16);
  pair[0b0011] = pair[0b1100] = 1.0 / std::sqrt(2.0);
  const auto mp = mutual_information(StateVector(4, pair), 2);
  CHECK(mp.s1[0] == Approx(std::log(2.0)));
  CHECK(mp.s2(0, 1) == Approx(0.0).margin(1e-12));
  CHECK(mp.mi(0, 1) == Approx(std::log(2.0)));

  // |k>|k> summed over the four orbital configurations: both marginals are maximally mixed.
  Eigen::VectorXcd max = Eigen::VectorXcd::Zero(16);
  for (int k = 0; k < 4; ++k) max[k + 4 * k] = 0.5;
  CHECK(multiref_diagnostic(StateVector(4, max), 2) == Approx(1.0));

  const std::string csv = mutual_information_csv(mp);
  CHECK(csv.rfind("orbital,0,1\n0,0,", 0) == 0);
}

TEST_CASE("mutual information matches the direct entropy combination", "[diagnostics][property]") {
  for (int seed = 0; seed < 4; ++seed) {
    const auto psi = random_parity_state(8, seed % 2, 70 + seed);
    const auto m = mutual_information(psi, 4);
    CHECK((m.mi - m.mi.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 4; ++i) {
      CHECK(m.mi(i, i) == 0.0);
      for (int j = i + 1; j < 4; ++j) {
        const double direct = rdm_entropy(dense_orbital_rdm(psi, {i})) + rdm_entropy(dense_orbital_rdm(psi, {j})) -
                              rdm_entropy(dense_orbital_rdm(psi, {i, j}));
        CHECK(std::abs(2.0 * m.mi(i, j) - direct) < 1e-10);
      }
    }
  }
}

TEST_CASE("multi-reference diagnostic ignores the orbital order", "[diagnostics][property]") {
  for (int seed = 0; seed < 3; ++seed) {
    StateVector psi = random_parity_state(8, 0, 90 + seed);
    const double z = multiref_diagnostic(psi, 4);
    CHECK(z >= 0.0);
    CHECK(z <= 1.0);
    swap_orbitals(psi, 0);
    swap_orbitals(psi, 2);
    swap_orbitals(psi, 1);
    CHECK(std::abs(multiref_diagnostic(psi, 4) - z) < 1e-10);
  }
}
