#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "rashba/suites.hpp"
#include "rashba/validation.hpp"
#include "support.hpp"

using namespace rashba;
using namespace rashba::test;

// Convergence fits -------------------------------------------------------------

TEST(FitConvergence, ExactPowerLaw) {
  const std::vector<double> h{0.2, 0.1, 0.05};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * x * x);
  const auto r = fit_convergence("quad", "h", h, e, 1.9, 2.1);
  EXPECT_NEAR(r.order, 2.0, 1e-12);
  EXPECT_NEAR(std::exp(r.intercept), 3.0, 1e-12);
  EXPECT_NEAR(r.r_squared, 1.0, 1e-12);
  EXPECT_TRUE(r.passed());
}

TEST(FitConvergence, OrderOutsideBandFails) {
  const auto r = fit_convergence("lin", "h", {0.4, 0.2, 0.1}, {0.4, 0.2, 0.1}, 1.9, 2.1);
  EXPECT_EQ(r.verdict, Verdict::fail);
  EXPECT_NE(r.detail.find("outside"), std::string::npos);
}

TEST(FitConvergence, ScatteredDataIsInconclusive) {
  const auto r = fit_convergence("noisy", "h", {0.4, 0.2, 0.1, 0.05}, {1e-2, 1e-4, 1e-2, 1e-4}, 0.5);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  EXPECT_LT(r.r_squared, 0.95);
}

TEST(FitConvergence, ZeroErrorIsInconclusive) {
  const auto r = fit_convergence("zero", "h", {0.4, 0.2, 0.1}, {1e-3, 0.0, 1e-4}, 0.5);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  const auto nan = fit_convergence("nan", "h", {0.4, 0.2, 0.1}, {1e-3, std::nan(""), 1e-4}, 0.5);
  EXPECT_EQ(nan.verdict, Verdict::inconclusive);
}

TEST(FitConvergence, RejectsTooFewOrMismatchedPoints) {
  EXPECT_THROW(fit_convergence("x", "h", {0.2, 0.1}, {1.0, 0.5}, 1.0), std::invalid_argument);
  EXPECT_THROW(fit_convergence("x", "h", {0.2, 0.1, 0.05}, {1.0, 0.5}, 1.0), std::invalid_argument);
}

TEST(FitConvergence, ReportCsvHeader) {
  const auto r = fit_convergence("quad", "h", {0.2, 0.1, 0.05}, {0.04, 0.01, 0.0025}, 1.9, 2.1);
  std::ostringstream os;
  write_report_csv(os, r);
  EXPECT_EQ(os.str().rfind("# quad verdict=pass order=", 0), 0u);
  EXPECT_NE(os.str().find("h,error\n0.20000000000000001,0.040000000000000001\n"), std::string::npos);
}

// Moment identities --------------------------------------------------------------

TEST(MomentIdentities, SmallRunPassesWithControls) {
  GridSpec s = small_spec(16, 64, 8.0);
  const auto r = check_moment_identities(Grid(s), 0.1, 2, 11);
  EXPECT_TRUE(r.passed()) << summary(r);
  EXPECT_LT(r.max_error(), 1e-7);
  bool saw_constant = false, saw_control = false;
  for (const auto& c : r.checks) {
    if (c.name.rfind("constant/", 0) == 0) {
      saw_constant = true;
      EXPECT_LT(c.error, 1e-14) << c.name;
    }
    if (c.name == "aliased-control") {
      saw_control = true;
      EXPECT_TRUE(c.control);
      EXPECT_GT(c.error, 1e-7);
      EXPECT_NE(c.detail.find("aliasing detected"), std::string::npos);
    }
  }
  EXPECT_TRUE(saw_constant);
  EXPECT_TRUE(saw_control);
}

TEST(MomentIdentities, AliasedModeFailsTheIdentity) {
  const Grid g(small_spec(16, 32, 8.0));
  std::mt19937_64 rng(3);
  const auto w = random_wigner(rng, g);
  ModeSum aliased;
  aliased.modes.push_back({static_cast<int>(g.nx1()) / 2 + 2, 0, 0.5, 0.3});
  EXPECT_GT(theta_identity_errors(aliased, w, 0.1, g).momentum, 1e-2);
}

TEST(MomentIdentities, SingleModeAtSixtyFourMomenta) {
  const Grid g(small_spec(16, 64, 8.0));
  std::mt19937_64 rng(4);
  const auto w = random_wigner(rng, g);
  ModeSum f;
  f.modes.push_back({1, 2, 0.8, 0.4});
  const auto e = theta_identity_errors(f, w, 0.1, g);
  EXPECT_LT(e.mass, 1e-7);
  EXPECT_LT(e.momentum, 1e-7);
  EXPECT_LT(e.even, 1e-7);
}

TEST(MomentIdentities, DeterministicForSeed) {
  const Grid g(small_spec(8, 32, 8.0));
  MomentIdentityOptions opt;
  opt.controls = false;
  const auto a = check_moment_identities(g, 0.1, 2, 99, opt);
  const auto b = check_moment_identities(g, 0.1, 2, 99, opt);
  std::ostringstream sa, sb;
  write_report_csv(sa, a);
  write_report_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str().find("seed=99"), std::string::npos);
  EXPECT_THROW(check_moment_identities(g, 0.1, 0, 1), std::invalid_argument);
  EXPECT_THROW(check_moment_identities(g, 0.0, 1, 1), std::invalid_argument);
}

// Moment formula for <T w> --------------------------------------------------------

TEST(AuxFormula, ZeroFieldGivesZeroOnBothSides) {
  const Grid g(small_spec(8, 16));
  ModelParams p;
  p.alpha = 1.0;
  const auto w = zero_wigner(g);
  const auto c = check_aux_formula(w, p, g);
  EXPECT_TRUE(c.passed);
  EXPECT_EQ(c.error, 0.0);
  EXPECT_EQ(l2_norm(aux_formula(w, p, g), g), 0.0);
}

TEST(AuxFormula, SemiclassicalEquilibriumPasses) {
  const Grid g(small_spec(16, 48, 8.0));
  ModelParams p;
  p.alpha = 1.0;
  p.epsilon = 0.1;
  const auto c = check_aux_formula(equilibrium_semiclassical(smooth_density(g), g), p, g);
  EXPECT_TRUE(c.passed) << c.error;
}

TEST(AuxFormula, OddInMomentumChargeTransport) {
  // w0 odd in p: <T w>_0 reduces to -d_j <p_j w0>, computed two ways.
  const Grid g(small_spec(16, 48, 8.0));
  WignerField w = zero_wigner(g);
  w[0] = g.sample4([](double x1, double x2, double p1, double p2) {
    return (1.0 + 0.3 * std::sin(x1 + x2)) * (p1 - 0.5 * p2) * gauss(p1, p2);
  });
  ModelParams p;
  p.alpha = 0.5;
  const auto c = check_aux_formula(w, p, g);
  EXPECT_TRUE(c.passed) << c.error;
  const auto lhs = moments(transport_apply(w, p, g), g)[0];
  Field2 ref = spectral::divergence(p_weighted_integral(w[0], g, 0), p_weighted_integral(w[0], g, 1), g);
  ref *= -1.0;
  EXPECT_LT(max_abs_diff(lhs, ref), 1e-10 * max_abs(ref));
  // The same derivative from the analytic moments <p1 w0> = c(x), <p2 w0> = -c(x)/2.
  const auto analytic = g.sample2([](double x1, double x2) { return -0.3 * std::cos(x1 + x2) * (1.0 - 0.5); });
  EXPECT_LT(max_abs_diff(lhs, analytic), 1e-8);
}

TEST(AuxFormula, RandomStatesSuite) {
  ModelParams p;
  p.alpha = 1.0;
  const auto r = suite_aux(small_spec(16, 32, 8.0), p, 3, 7);
  EXPECT_TRUE(r.passed()) << summary(r);
}

// Semiclassical moments -----------------------------------------------------------

TEST(Semiclassical, UniformDensityGivesZeroFirstMoment) {
  const Grid g(small_spec(8, 32));
  const auto n = uniform_density(g, 1.0, 0.3, 0.1, -0.2);
  for (double eps : {0.2, 0.1, 0.05}) {
    ModelParams p;
    p.alpha = 1.0;
    p.epsilon = eps;
    const auto m = moments(transport_apply(equilibrium_semiclassical(n, g), p, g), g);
    for (int k = 0; k < 4; ++k) EXPECT_LT(max_abs(m[k]), 1e-15);
  }
}

TEST(Semiclassical, FirstMomentAndScaling) {
  const Grid g(small_spec(16, 32, 8.0));
  ModelParams p;
  p.alpha = 1.0;
  const auto r = semiclassical_consistency(smooth_density(g), p, g, {0.2, 0.1, 0.05});
  EXPECT_TRUE(r.first_moment_passed());
  EXPECT_TRUE(r.first_moment_scaling.passed()) << summary(r.first_moment_scaling);
  EXPECT_NEAR(r.first_moment_scaling.order, 1.0, 1e-6);
  EXPECT_TRUE(r.second_moment.passed()) << summary(r.second_moment);
  EXPECT_LT(r.second_moment_relative, 5e-2);
  EXPECT_THROW(semiclassical_consistency(smooth_density(g), p, g, {0.1, 0.2, 0.05}), std::invalid_argument);
  EXPECT_THROW(semiclassical_consistency(smooth_density(g), p, g, {0.1, 0.05}), std::invalid_argument);
}

// Suites -----------------------------------------------------------------------------

TEST(Suites, PauliAndResidual) {
  EXPECT_TRUE(suite_pauli(1, 200).passed());
  const auto r = suite_residual(small_spec(16, 8), 0.1, 3);
  EXPECT_TRUE(r.passed()) << summary(r);
}

TEST(Suites, CsvCarriesEveryCheck) {
  const auto r = suite_pauli(1, 50);
  std::ostringstream os;
  write_suite_csv(os, r);
  std::size_t lines = 0;
  for (char c : os.str()) lines += c == '\n';
  ASSERT_TRUE(r.convergence.empty());
  EXPECT_EQ(lines, r.checks.size() + 2);
  EXPECT_EQ(os.str().rfind("# suite pauli verdict=pass", 0), 0u);
}

TEST(Suites, ControlSemantics) {
  SuiteResult r("x");
  r.control("must be large", 0.5, 0.1);
  EXPECT_TRUE(r.passed());
  r.control("too small", 0.01, 0.1);
  EXPECT_FALSE(r.passed());
}

// Diffusion limit ----------------------------------------------------------------------

TEST(DiffusionLimit, ErrorShrinksWithTauOnSmallGrid) {
  DiffusionStudyConfig cfg;
  cfg.grid = small_spec(8, 24);
  cfg.taus = {0.2, 0.1, 0.05};
  cfg.t_probe = 0.2;
  cfg.parallel = false;
  const Grid g(cfg.grid);
  const auto res = diffusion_limit_study(cfg, diffusion_study_initial(g));
  ASSERT_EQ(res.points.size(), 3u);
  EXPECT_GT(res.points[0].error, res.points[1].error);
  EXPECT_GT(res.points[1].error, res.points[2].error);
  for (const auto& pt : res.points) EXPECT_LT(pt.kinetic_mass_drift, 1e-10);
  EXPECT_GE(res.report.order, 0.8) << summary(res.report);
}

TEST(DiffusionLimit, BallisticRegimeDoesNotConverge) {
  DiffusionStudyConfig cfg;
  cfg.grid = small_spec(8, 24);
  cfg.taus = {8.0, 4.0, 2.0};
  cfg.t_probe = 0.2;
  cfg.parallel = false;
  const Grid g(cfg.grid);
  const auto res = diffusion_limit_study(cfg, diffusion_study_initial(g));
  EXPECT_FALSE(res.report.passed()) << summary(res.report);
  for (const auto& pt : res.points) EXPECT_GT(pt.error, 0.1);
}

TEST(DiffusionLimit, RejectsBadTauLists) {
  DiffusionStudyConfig cfg;
  cfg.grid = small_spec(8, 16);
  const Grid g(cfg.grid);
  cfg.taus = {0.1, 0.2, 0.05};
  EXPECT_THROW(diffusion_limit_study(cfg, diffusion_study_initial(g)), std::invalid_argument);
  cfg.taus = {0.2, 0.1};
  EXPECT_THROW(diffusion_limit_study(cfg, diffusion_study_initial(g)), std::invalid_argument);
}

TEST(SpinDecay, KineticRatesApproachDriftDiffusionRates) {
  const auto pt = kinetic_spin_decay(small_spec(8, 32), 1.0, 0.05, {0.3, 0.2, 0.4}, 5.0);
  EXPECT_LT(pt.max_relative_deviation, 0.1);
  EXPECT_DOUBLE_EQ(pt.expected[2], 8 * 0.05);
}
