#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "rashba/runner.hpp"
#include "rashba/scenario.hpp"
#include "rashba/snapshot.hpp"

using namespace rashba;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("rashba_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(RASHBA_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> csv_column(const std::string& text, std::size_t col) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string cell;
    for (std::size_t i = 0; i <= col && std::getline(ls, cell, ','); ++i) {
    }
    out.push_back(cell);
  }
  return out;
}

const char* kTinyKinetic =
    "[scenario]\nname = tiny\nmodel = kinetic\nseed = 3\n\n"
    "[model]\nepsilon = 0.2\nalpha = 0.5\ntau = 0.5\n\n"
    "[potential]\nkind = cosine\namplitude = 0.2\nm1 = 1\nm2 = 0\n\n"
    "[grid]\nNx1 = 8\nNx2 = 8\nNp1 = 16\nNp2 = 16\ndt = 0.025\n\n"
    "[initial]\nkind = spin-helix\namplitude = 0.3\n\n"
    "[output]\nt_end = 0.1\ninterval = 0.05\n";

}  // namespace

// Parsing --------------------------------------------------------------------------

TEST(Config, MinimalFileGivesDocumentedDefaults) {
  const auto s = parse_config_text("[scenario]\nmodel = qdd\n");
  EXPECT_EQ(s, Scenario{});
  EXPECT_EQ(s.params.epsilon, 0.1);
  EXPECT_EQ(s.params.kappa, 1.0);
  EXPECT_EQ(s.grid.Nx1, 32);
  EXPECT_EQ(s.grid.Np1, 48);
  EXPECT_EQ(s.grid.pmax, 6.0);
  EXPECT_EQ(s.initial.kind, "uniform");
  EXPECT_EQ(s.output.t_end, 1.0);
  EXPECT_EQ(s.model_name(), "qdd");
}

TEST(Config, NegativeEpsilonRejected) {
  const auto msg = message_of("[scenario]\nmodel = qdd\n[model]\nepsilon = -1\n");
  EXPECT_NE(msg.find("ε must be positive"), std::string::npos) << msg;
  EXPECT_NE(message_of("[model]\nalpha = -2\n").find("α must be non-negative"), std::string::npos);
  EXPECT_NE(message_of("[model]\ntau = 0\n").find("τ must be positive"), std::string::npos);
  EXPECT_NE(message_of("[model]\nkappa = 0\n").find("κ must be positive"), std::string::npos);
}

TEST(Config, ErrorsCarrySourceLine) {
  EXPECT_NE(message_of("[scenario]\nmodel = qdd\n[grid]\nNx3 = 4\n").find("<text>:4: unknown key 'Nx3' in [grid]"),
            std::string::npos);
  EXPECT_NE(message_of("[scenario]\n[gird]\n").find("<text>:2: unknown section [gird]"), std::string::npos);
  EXPECT_NE(message_of("[model]\nalpha = 1\nalpha = 2\n").find("repeated"), std::string::npos);
  EXPECT_NE(message_of("[model]\nalpha = fast\n").find("must be a number"), std::string::npos);
  EXPECT_NE(message_of("[grid]\nNx1 = 7\n").find("Nx1 must be even"), std::string::npos);
  EXPECT_NE(message_of("[scenario]\nmodel = validate:nope\n").find("unknown validation suite"), std::string::npos);
  EXPECT_NE(message_of("[potential]\nkind = cosine\nwidth = 2\n").find("does not apply"), std::string::npos);
  EXPECT_NE(message_of("alpha = 1\n").find("outside of any section"), std::string::npos);
}

TEST(Config, CommentsAndWhitespace) {
  const auto s = parse_config_text("# header\n[model]  \n  alpha = 0.25   # trailing\n; other comment\n\n");
  EXPECT_EQ(s.params.alpha, 0.25);
}

TEST(Config, OverridesApplyAfterFile) {
  const auto s = parse_config_text("[model]\nalpha = 1\n", "<text>", {"model.alpha=0.3", "grid.Nx1=16"});
  EXPECT_EQ(s.params.alpha, 0.3);
  EXPECT_EQ(s.grid.Nx1, 16);
  EXPECT_THROW(parse_config_text("", "<text>", {"alpha=0.3"}), ConfigError);
  EXPECT_THROW(parse_config_text("", "<text>", {"model.nope=1"}), ConfigError);
}

TEST(Config, EmitParseRoundTrip) {
  for (const auto& b : builtin_scenarios()) {
    const auto s = builtin_scenario(b.name);
    const auto text = emit_config(s);
    EXPECT_EQ(parse_config_text(text), s) << b.name;
    EXPECT_EQ(emit_config(parse_config_text(text)), text) << b.name;
  }
  auto s = parse_config_text(kTinyKinetic);
  s.params.alpha = 0.1 + 0.2;  // not representable in few digits
  EXPECT_EQ(parse_config_text(emit_config(s)).params.alpha, s.params.alpha);
}

TEST(Config, ShippedScenarioFilesMatchBuiltins) {
  const fs::path dir = fs::path(RASHBA_SOURCE_DIR) / "scenarios";
  for (const auto& b : builtin_scenarios()) {
    const fs::path file = dir / (b.name + ".ini");
    ASSERT_TRUE(fs::exists(file)) << file;
    EXPECT_EQ(parse_config(file.string()), builtin_scenario(b.name)) << b.name;
  }
  EXPECT_THROW(builtin_scenario("no-such"), ConfigError);
}

TEST(Config, HeatKernelReferenceNeedsMatchingSetup) {
  auto text = std::string(kTinyKinetic) + "reference = heat-kernel\n";
  EXPECT_NE(message_of(text).find("heat-kernel"), std::string::npos);
}

TEST(Config, TabulatedFilesResolveRelativeToConfig) {
  const auto dir = fresh_dir("tabulated");
  GridSpec g;
  g.Nx1 = g.Nx2 = 8;
  const Grid grid(g);
  {
    std::ofstream os(dir / "v.csv");
    write_snapshot(os, make_snapshot("V", grid.sample2([](double x1, double) { return std::cos(x1); }), g, 0.0),
                   SnapshotFormat::csv);
  }
  {
    std::ofstream os(dir / "run.ini");
    os << "[scenario]\nmodel = qdd\n[grid]\nNx1 = 8\nNx2 = 8\n[potential]\nkind = tabulated\nfile = v.csv\n";
  }
  const auto s = parse_config((dir / "run.ini").string());
  EXPECT_EQ(s.potential.kind, "tabulated");
  const auto v = build_potential(s.potential, grid);
  ASSERT_TRUE(v.has_value());
  EXPECT_NEAR(v->values()(1, 0), std::cos(grid.x1()[1]), 1e-15);
  {
    std::ofstream os(dir / "bad.ini");
    os << "[potential]\nkind = tabulated\nfile = missing.csv\n";
  }
  EXPECT_THROW(parse_config((dir / "bad.ini").string()), ConfigError);
}

// Runner -----------------------------------------------------------------------------

TEST(Runner, KineticRunWritesAllOutputs) {
  const auto dir = fresh_dir("runner_kinetic");
  EXPECT_EQ(run_scenario(parse_config_text(kTinyKinetic), dir), exit_pass);
  for (const char* f : {"manifest.txt", "diagnostics.csv", "snapshots.csv", "snapshots/kinetic_0000.csv",
                        "snapshots/kinetic_0002.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto manifest = slurp(dir / "manifest.txt");
  EXPECT_NE(manifest.find("status pass"), std::string::npos);
  EXPECT_NE(manifest.find("--- scenario\n[scenario]\nname = tiny"), std::string::npos);
  const auto snaps = read_snapshots((dir / "snapshots/kinetic_0002.csv").string());
  ASSERT_EQ(snaps.size(), 4u);
  EXPECT_EQ(snaps[0].shape, (std::vector<std::size_t>{8, 8}));
  EXPECT_DOUBLE_EQ(snaps[0].t, 0.1);
  EXPECT_EQ(csv_column(slurp(dir / "snapshots.csv"), 1), (std::vector<std::string>{"0", "0.05", "0.1"}));
}

TEST(Runner, HeatKernelErrorColumn) {
  const auto dir = fresh_dir("runner_heat");
  EXPECT_EQ(run_scenario(builtin_scenario("heat-kernel"), dir), exit_pass);
  const auto err = csv_column(slurp(dir / "snapshots.csv"), 4);
  ASSERT_EQ(err.size(), 6u);
  EXPECT_LT(std::stod(err.back()), 1e-4);
}

TEST(Runner, BothModelsPairedOnSharedAxis) {
  const auto dir = fresh_dir("runner_both");
  auto s = builtin_scenario("both-bump", {"output.t_end=0.2", "output.interval=0.1", "grid.Nx1=8", "grid.Nx2=8",
                                          "grid.Np1=16", "grid.Np2=16"});
  EXPECT_EQ(run_scenario(s, dir), exit_pass);
  const auto paired = slurp(dir / "paired_densities.csv");
  EXPECT_EQ(paired.rfind("t,", 0), 0u);
  const auto t = csv_column(paired, 0);
  EXPECT_EQ(t.size(), 3u * 64u);
  EXPECT_TRUE(fs::exists(dir / "snapshots/qdd_0002.csv"));
  EXPECT_TRUE(fs::exists(dir / "snapshots/kinetic_0002.csv"));
}

TEST(Runner, ValidationSuiteReport) {
  const auto dir = fresh_dir("runner_validate");
  EXPECT_EQ(run_scenario(builtin_scenario("pauli-algebra"), dir), exit_pass);
  const auto report = slurp(dir / "report.csv");
  EXPECT_NE(report.find("# suite pauli verdict=pass"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
}

TEST(Runner, IdentitiesScenarioReportsErrorsBelowTolerance) {
  const auto dir = fresh_dir("runner_identities");
  const auto s = builtin_scenario("moment-identities",
                                  {"validation.trials=2", "grid.Nx1=16", "grid.Nx2=16", "grid.pmax=8"});
  EXPECT_EQ(run_scenario(s, dir), exit_pass);
  const auto report = slurp(dir / "report.csv");
  std::istringstream is(report);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.rfind("trial", 0) != 0) continue;
    ++rows;
    std::istringstream ls(line);
    std::string name, err;
    std::getline(ls, name, ',');
    std::getline(ls, err, ',');
    EXPECT_LT(std::stod(err), 1e-7) << line;
  }
  EXPECT_EQ(rows, 6);
}

// Command line ------------------------------------------------------------------------

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli_codes");
  // 0: pass.
  EXPECT_EQ(run_cli("--scenario pauli-algebra --quiet --out " + (dir / "ok").string(), dir / "ok.log"), 0);
  // 1: a check failure (a tolerance no computation can meet).
  EXPECT_EQ(run_cli("--scenario moment-identities --quiet --set validation.trials=1 --set grid.Nx1=16 "
                    "--set grid.Nx2=16 --set grid.Np1=32 --set grid.Np2=32 --set validation.tolerance=1e-300 --out " +
                        (dir / "fail").string(),
                    dir / "fail.log"),
            1);
  EXPECT_NE(slurp(dir / "fail" / "manifest.txt").find("status check-failure"), std::string::npos);
  // 2: usage and configuration errors.
  EXPECT_EQ(run_cli("--bogus", dir / "u1.log"), 2);
  EXPECT_EQ(run_cli("--quiet", dir / "u2.log"), 2);
  EXPECT_EQ(run_cli("--scenario heat-kernel --set model.epsilon=-1 --out " + (dir / "cfg").string(), dir / "u3.log"), 2);
  EXPECT_NE(slurp(dir / "u3.log").find("ε must be positive"), std::string::npos);
  EXPECT_EQ(run_cli("--scenario heat-kernel --set grid.dt=1 --quiet --out " + (dir / "stab").string(), dir / "u4.log"),
            2);
  EXPECT_NE(slurp(dir / "stab" / "manifest.txt").find("status config-error"), std::string::npos);
  // 3: numerical abort (the density overflows the transform).
  {
    std::ofstream os(dir / "overflow.ini");
    os << "[scenario]\nmodel = kinetic\n[grid]\nNx1 = 8\nNx2 = 8\nNp1 = 8\nNp2 = 8\n"
          "[initial]\nbase = 1e308\n[output]\nt_end = 0.02\n";
  }
  EXPECT_EQ(run_cli("--config " + (dir / "overflow.ini").string() + " --quiet --out " + (dir / "nan").string(),
                    dir / "n.log"),
            3);
  EXPECT_NE(slurp(dir / "nan" / "manifest.txt").find("status numerical-abort"), std::string::npos);
}

TEST(Cli, ListPrintAndVersion) {
  const auto dir = fresh_dir("cli_info");
  EXPECT_EQ(run_cli("--list-scenarios", dir / "list.log"), 0);
  const auto list = slurp(dir / "list.log");
  for (const auto& b : builtin_scenarios()) EXPECT_NE(list.find(b.name), std::string::npos);
  EXPECT_EQ(run_cli("--scenario spin-decay --print-config", dir / "print.log"), 0);
  EXPECT_EQ(slurp(dir / "print.log"), emit_config(builtin_scenario("spin-decay")));
  EXPECT_EQ(run_cli("--version", dir / "version.log"), 0);
  EXPECT_NE(slurp(dir / "version.log").find(version), std::string::npos);
}

TEST(Cli, RunsAreDeterministic) {
  const auto dir = fresh_dir("cli_determinism");
  {
    std::ofstream os(dir / "tiny.ini");
    os << kTinyKinetic << "format = binary\n";
  }
  for (const char* run : {"a", "b"})
    ASSERT_EQ(run_cli("--config " + (dir / "tiny.ini").string() + " --quiet --out " + (dir / run).string(),
                      dir / (std::string(run) + ".log")),
              0);
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir / "a");
    auto a = slurp(e.path()), b = slurp(dir / "b" / rel);
    if (rel == "manifest.txt") {
      // Wall-clock timings are the only run-dependent lines.
      auto strip = [](const std::string& s) {
        std::istringstream is(s);
        std::string line, out;
        while (std::getline(is, line))
          if (line.rfind("time ", 0) != 0) out += line + '\n';
        return out;
      };
      a = strip(a);
      b = strip(b);
    }
    EXPECT_EQ(a, b) << rel;
    ++compared;
  }
  EXPECT_GE(compared, 6u);
}
