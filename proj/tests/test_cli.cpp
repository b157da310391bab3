// Copyright 2026 The qitelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qitelab/experiment.hpp"

using namespace qitelab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qitelab_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the tool with the output root in the scratch directory.
Result tool(const std::string& args) {
  const char* bin = std::getenv("QITE_LAB_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd = "QITE_LAB_OUT='" + scratch().string() + "' '" + bin + "' " + args + " 2>&1";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) r.out += buf;
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int data_rows(const std::string& csv) {
  int n = 0;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line.rfind("tau,", 0) != 0) ++n;
  }
  return n;
}

const std::string kRing4 = "--set system.dims=4 --set initial.kind=determinant --set initial.occupied=0,2 ";

}  // namespace

TEST_CASE("config text parsing", "[cli]") {
  const KeyValues kv = parse_config_text(
      "# comment\n[system]\npreset = hm1\n; other comment\n[evolver]\nkind = qite\nnu = 2\n");
  CHECK(kv.at("system.preset") == "hm1");
  CHECK(kv.at("evolver.kind") == "qite");
  CHECK(kv.at("evolver.nu") == "2");

  const ExperimentConfig c = ExperimentConfig::from_values(kv);
  CHECK(c.system.model == "heisenberg");
  CHECK(c.system.dims == std::vector<int>{10});
  CHECK(c.evolver.nu == 2);
  CHECK(c.evolver.n_steps() == 100);
  // The echo is a fixed point.
  CHECK(ExperimentConfig::from_values(parse_config_text(c.to_text())).to_text() == c.to_text());

  CHECK_THROWS_AS(ExperimentConfig::from_values({{"system.bogus", "1"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_values({{"evolver.nu", "two"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_values({{"evolver.kind", "vqe"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_values({{"evolver.tau", "1.05"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_values({{"system.preset", "hm9"}}), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[system\nx = 1\n"), ConfigError);
}

TEST_CASE("presets list the lattice systems and gate the molecules", "[cli]") {
  const Result r = tool("presets");
  CHECK(r.code == 0);
  CHECK(r.out.find("HM I ") != std::string::npos);
  CHECK(r.out.find("B=0, J=1, L=10") != std::string::npos);
  CHECK(r.out.find("FHM") != std::string::npos);
  CHECK(r.out.find("t=1, U=1") != std::string::npos);
  for (const auto& p : presets()) CHECK(r.out.find(p.name) != std::string::npos);
  CHECK(r.out.find("O3 (0)") != std::string::npos);
  CHECK(r.out.find("fixture-gated") != std::string::npos);
}

TEST_CASE("every lattice preset builds its system", "[cli]") {
  for (const auto& p : presets()) {
    if (p.fixture_gated) continue;
    const auto h = build_system(ExperimentConfig::from_values({{"system.preset", p.name}}).system);
    CHECK(h.n_qubits >= 10);
  }
}

TEST_CASE("a zero-step run records the initial state only", "[cli]") {
  const Result r = tool("run " + kRing4 + "--tau 0 --out zero");
  REQUIRE(r.code == 0);
  const std::string trace = slurp(scratch() / "zero" / "trace.csv");
  CHECK(trace.rfind("# qitelab trace v1\n", 0) == 0);
  CHECK(data_rows(trace) == 1);
  // Neel state of the 4-ring: <H> = -4, ground energy -8.
  CHECK(trace.find("0,-4.000000000000,") != std::string::npos);
  const std::string summary = slurp(scratch() / "zero" / "summary.csv");
  CHECK(summary.find("E_init,E_final,F_init,F_final,E0,E1") != std::string::npos);
  CHECK(summary.find("-8.000000000000") != std::string::npos);
  for (const char* f : {"plan.txt", "config.echo"}) CHECK(fs::exists(scratch() / "zero" / f));
}

TEST_CASE("runs are deterministic and the echo reproduces them", "[cli][property]") {
  for (const std::string evolver : {"exact-ite", "trot-ite", "qite"}) {
    const std::string base = "run " + kRing4 + "--set system.b=0.3 --evolver " + evolver + " --nu 0 --tau 1 ";
    REQUIRE(tool(base + "--out det_a_" + evolver).code == 0);
    REQUIRE(tool(base + "--out det_b_" + evolver).code == 0);
    const fs::path a = scratch() / ("det_a_" + evolver);
    const fs::path b = scratch() / ("det_b_" + evolver);
    CHECK(data_rows(slurp(a / "trace.csv")) == 11);
    for (const char* f : {"trace.csv", "summary.csv", "plan.txt"}) CHECK(slurp(a / f) == slurp(b / f));

    REQUIRE(tool("run --config '" + (a / "config.echo").string() + "' --out det_c_" + evolver).code == 0);
    const fs::path c = scratch() / ("det_c_" + evolver);
    for (const char* f : {"trace.csv", "summary.csv", "plan.txt"}) CHECK(slurp(a / f) == slurp(c / f));
  }
}

TEST_CASE("ghf initial state with the hm preset geometry", "[cli]") {
  // GHF start on a small ring; F_init is reported against the exact ground state.
  const Result r = tool("run --set system.dims=6 --evolver trot-ite --tau 0.5 --out ghf6");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("F_init") != std::string::npos);
  const std::string plan = slurp(scratch() / "ghf6" / "plan.txt");
  CHECK(plan.find("split pauli") != std::string::npos);
}

TEST_CASE("refusals and errors have distinct exit codes", "[cli]") {
  const Result infeasible = tool("run --preset hm1 --evolver qite --nu 3 --solver cg --out refuse");
  CHECK(infeasible.code == 3);
  CHECK(infeasible.out.find("refusing QITE run") != std::string::npos);
  CHECK(infeasible.out.find("estimated cost") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch() / "refuse" / "trace.csv"));

  const Result fixture = tool("run --preset ne --out ne");
  CHECK(fixture.code == 2);
  CHECK(fixture.out.find("fixture-gated") != std::string::npos);
  CHECK(tool("run --preset ne --set system.fcidump=/nonexistent/ne.fcidump").code == 2);

  CHECK(tool("run --set system.bogus=1").code == 2);
  std::ofstream(scratch() / "broken.cfg") << "[system\nmodel = tfim\n";
  CHECK(tool("run --config '" + (scratch() / "broken.cfg").string() + "'").code == 2);
  CHECK(tool("nonsense").code != 0);
}

TEST_CASE("sweep, spectrum, ghf and mi subcommands", "[cli]") {
  const Result sweep = tool("sweep " + kRing4 + "--evolver qite --tau 0.2 --out sw --param evolver.nu --values 0,1 --jobs 2");
  CHECK(sweep.code == 0);
  for (const char* d : {"evolver.nu=0", "evolver.nu=1"}) CHECK(fs::exists(scratch() / "sw" / d / "summary.csv"));

  const Result spec = tool("spectrum --set system.dims=4");
  CHECK(spec.code == 0);
  CHECK(spec.out.find("0,-8.000000000000") != std::string::npos);

  const Result ghf = tool("ghf --set system.dims=4 --fidelity --write '" + (scratch() / "g.cov").string() + "'");
  CHECK(ghf.code == 0);
  CHECK(ghf.out.find("# fidelity") != std::string::npos);
  REQUIRE(fs::exists(scratch() / "g.cov"));
  const Result from_file = tool("run --set system.dims=4 --set initial.kind=file --set initial.file='" +
                                (scratch() / "g.cov").string() + "' --tau 0 --out fromfile");
  CHECK(from_file.code == 0);

  const Result mi = tool("mi --set system.model=fermi-hubbard --set system.dims=3");
  CHECK(mi.code == 0);
  CHECK(mi.out.rfind("orbital,0,1,2\n", 0) == 0);
  CHECK(mi.out.find("# Z_s1") != std::string::npos);
  CHECK(tool("mi --set system.dims=4").code == 2);
}

TEST_CASE("molecular fixture runs through the pipeline", "[cli]") {
  const std::string fixture = std::string(QITELAB_DATA_DIR) + "/fcidump/two_orbital.fcidump";
  const Result r = tool("run --set system.model=fcidump --set system.fcidump=" + fixture +
                        " --evolver qite --nu 0 --tau 0.5 --set diagnostics.mi=on --out mol");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(scratch() / "mol" / "mi.csv"));
  CHECK(slurp(scratch() / "mol" / "plan.txt").find("rule mutual-information") != std::string::npos);
}
