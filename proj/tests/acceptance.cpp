// Acceptance run: one PASS/FAIL line per criterion at the stated tolerances,
// using the built-in validation scenarios. Optional arguments select criteria
// by number. Exit status 0 iff every selected criterion passes.

#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <set>
#include <string>
#include <vector>

#include "rashba/runner.hpp"
#include "rashba/scenario.hpp"
#include "rashba/suites.hpp"

using namespace rashba;

namespace {

struct Outcome {
  bool passed = false;
  double seconds = 0.0;
  std::vector<std::string> lines;
};

void add_check(Outcome& o, const IdentityCheck& c) {
  std::ostringstream os;
  os << std::setprecision(4) << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.error
     << (c.control ? " >= " : " < ") << c.tolerance;
  if (!c.detail.empty()) os << "  [" << c.detail << "]";
  o.lines.push_back(os.str());
}

void add_report(Outcome& o, const ConvergenceReport& r) {
  std::ostringstream os;
  os << (r.passed() ? "ok   " : "FAIL ") << summary(r);
  std::string text = os.str();
  for (std::size_t at = text.find('\n'); at != std::string::npos; at = text.find('\n', at + 1))
    text.insert(at + 1, "     ");
  o.lines.push_back(text);
}

/// Whole suite as one criterion, with an optional wall-clock budget.
Outcome from_suite(const SuiteResult& s, double budget_seconds) {
  Outcome o;
  o.seconds = s.seconds;
  o.passed = s.passed();
  for (const auto& c : s.checks) add_check(o, c);
  for (const auto& r : s.convergence) add_report(o, r);
  if (budget_seconds > 0.0) {
    const bool in_time = s.seconds < budget_seconds;
    o.passed = o.passed && in_time;
    std::ostringstream os;
    os << std::setprecision(3) << (in_time ? "ok   " : "FAIL ") << "runtime " << s.seconds << " s < "
       << budget_seconds << " s";
    o.lines.push_back(os.str());
  }
  return o;
}

/// Subset of a suite selected by check and report name prefixes.
Outcome from_part(const SuiteResult& s, const std::vector<std::string>& prefixes, double budget_seconds) {
  auto selected = [&](const std::string& name) {
    for (const auto& p : prefixes)
      if (name.rfind(p, 0) == 0) return true;
    return false;
  };
  SuiteResult part{s.name};
  part.seconds = s.seconds;
  for (const auto& c : s.checks)
    if (selected(c.name)) part.checks.push_back(c);
  for (const auto& r : s.convergence)
    if (selected(r.name)) part.convergence.push_back(r);
  if (part.checks.empty() && part.convergence.empty()) {
    Outcome o;
    o.lines.push_back("FAIL no checks matched");
    return o;
  }
  return from_suite(part, budget_seconds);
}

SuiteResult run(const std::string& scenario) { return run_validation_suite(builtin_scenario(scenario)); }

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> evaluate;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  // Criteria 5 and 6 read one semiclassical run.
  std::optional<SuiteResult> semiclassical;
  auto semi = [&]() -> const SuiteResult& {
    if (!semiclassical) semiclassical = run("semiclassical-moments");
    return *semiclassical;
  };

  const std::vector<Criterion> criteria{
      {1, "Pauli algebra against explicit 2x2 matrices, 1000 pairs",
       [] { return from_suite(run("pauli-algebra"), 1.0); }},
      {2, "Theta moment identities, 32^2 x 64^2, eps = 0.1, 20 trials",
       [] { return from_suite(run("moment-identities"), 30.0); }},
      {3, "<T w> equals the moment-assembled formula, 10 states",
       [] { return from_suite(run("aux-formula"), 30.0); }},
      {4, "residual spin-orbit current", [] { return from_suite(run("residual-current"), 0.0); }},
      {5, "semiclassical <T g> closed form and linear scaling in eps",
       [&] { return from_part(semi(), {"bkTg-closed-form", "bkTg-scaling", "uniform bkTg"}, 0.0); }},
      {6, "semiclassical <T T g> against the drift-diffusion right side",
       [&] { return from_part(semi(), {"bkTTg"}, 120.0); }},
      {7, "drift-diffusion regressions: heat kernel, uniform decay, exp(-V)",
       [] { return from_suite(run("qdd-regressions"), 0.0); }},
      {8, "kinetic conservation: mass, BGK, precession",
       [] { return from_suite(run("kinetic-conservation"), 0.0); }},
      {9, "diffusion limit tau -> 0 on 32^2 x 48^2", [] { return from_suite(run("diffusion-limit"), 600.0); }},
      {10, "Moyal truncation: #0, #1, bracket antisymmetry",
       [] { return from_suite(run("moyal-truncation"), 0.0); }},
  };

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    ++ran;
    Outcome o;
    try {
      o = c.evaluate();
    } catch (const std::exception& e) {
      o.passed = false;
      o.lines.push_back(std::string("FAIL exception: ") + e.what());
    }
    failed += o.passed ? 0 : 1;
    std::cout << "criterion " << std::setw(2) << c.id << ' ' << (o.passed ? "PASS" : "FAIL") << "  " << c.title
              << "  (" << std::fixed << std::setprecision(2) << o.seconds << " s)" << std::defaultfloat << '\n';
    for (const auto& l : o.lines) std::cout << "      " << l << '\n';
    std::cout.flush();
  }
  std::cout << (ran - failed) << '/' << ran << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
