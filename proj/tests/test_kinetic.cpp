#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "rashba/kinetic.hpp"
#include "rashba/validation.hpp"
#include "support.hpp"

using namespace rashba;
using namespace rashba::test;

namespace {

using V3 = std::array<double, 3>;

V3 cross3(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot3(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Rodrigues rotation of v about the unit axis k by angle th, written independently of the solver.
V3 rotate(const V3& v, const V3& k, double th) {
  const V3 kv = cross3(k, v);
  const double kd = dot3(k, v);
  V3 out;
  for (int i = 0; i < 3; ++i) out[i] = v[i] * std::cos(th) + kv[i] * std::sin(th) + k[i] * kd * (1 - std::cos(th));
  return out;
}

double max_density_diff(const SpinDensityField& a, const SpinDensityField& b) {
  double m = 0.0;
  for (int k = 0; k < 4; ++k) m = std::max(m, max_abs_diff(a[k], b[k]));
  return m;
}

}  // namespace

TEST(ModelParams, ValidationMessages) {
  ModelParams p;
  p.epsilon = -1;
  try {
    p.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "ε must be positive");
  }
  p = ModelParams{};
  p.alpha = -0.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.tau = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.collisionless = true;
  EXPECT_NO_THROW(p.validate());
  p.kappa = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Equilibrium, UniformUnpolarizedIsIsotropicMaxwellian) {
  const Grid g(small_spec(8, 16));
  const auto w = equilibrium_semiclassical(uniform_density(g, 1, 0, 0, 0), g);
  const auto ref = g.sample4([](double, double, double p1, double p2) { return gauss(p1, p2); });
  EXPECT_LT(max_abs_diff(w[0], ref), 1e-16);
  for (int k = 1; k < 4; ++k) EXPECT_EQ(max_abs(w[k]), 0.0);
}

TEST(Equilibrium, MomentsRecoverDensity) {
  const Grid g(small_spec(8, 64));
  const auto n = smooth_density(g);
  const auto m = moments(equilibrium_semiclassical(n, g), g);
  EXPECT_LT(l2_distance(m, n, g) / l2_norm(n, g), 1e-8);
}

TEST(Equilibrium, PointwisePhysicalWithRatiosPreserved) {
  const Grid g(small_spec(8, 16));
  const auto n = smooth_density(g);
  const auto w = equilibrium_semiclassical(n, g);
  const std::size_t np = g.np1() * g.np2();
  for (std::size_t x = 0; x < n[0].size(); ++x)
    for (std::size_t q = 0; q < np; ++q) {
      const std::size_t i = x * np + q;
      const double s = std::sqrt(w[1][i] * w[1][i] + w[2][i] * w[2][i] + w[3][i] * w[3][i]);
      EXPECT_LT(s, w[0][i]);
      if (w[0][i] > 1e-200) {
        EXPECT_NEAR(w[1][i] / w[0][i], n[1][x] / n[0][x], 1e-14);
      }
    }
}

TEST(Transport, ConstantEquilibriumHasZeroMoments) {
  const Grid g(small_spec(8, 32));
  ModelParams p;
  p.alpha = 1.3;
  p.epsilon = 0.2;
  const auto tw = transport_apply(equilibrium_semiclassical(uniform_density(g, 1.0, 0.2, -0.3, 0.4), g), p, g);
  const auto m = moments(tw, g);
  for (int k = 0; k < 4; ++k) EXPECT_LT(max_abs(m[k]), 1e-14);
}

TEST(Transport, MomentsMatchAssembledFormula) {
  const Grid g(small_spec(16, 48, 8.0));
  ModelParams p;
  p.alpha = 0.8;
  p.epsilon = 0.3;
  p.potential = PotentialField::cosine(g, 0.4, 1, -1);
  const auto c = check_aux_formula(smooth_wigner(g), p, g, 1e-8);
  EXPECT_TRUE(c.passed) << c.error;
}

TEST(Transport, SemiclassicalFirstMomentClosedForm) {
  const Grid g(small_spec(16, 48, 8.0));
  ModelParams p;
  p.alpha = 1.0;
  p.epsilon = 0.1;
  const auto n = smooth_density(g);
  const auto m = moments(transport_apply(equilibrium_semiclassical(n, g), p, g), g);
  const auto ref = bkTg_semiclassical(n, p, g);
  EXPECT_LT(l2_distance(m, ref, g) / l2_norm(ref, g), 1e-7);
  // Spot check one entry of the closed form -eps alpha grad_perp n0 against the analytic gradient.
  const double x1 = g.x1()[3], x2 = g.x2()[5];
  const double d2n0 = 0.3 * std::cos(x1) * std::cos(x2);
  EXPECT_NEAR(ref[1](3, 5), -0.1 * d2n0, 1e-13);
}

TEST(KineticStep, HomogeneousEquilibriumIsFixedPoint) {
  const Grid g(small_spec(8, 32));
  ModelParams p;
  p.alpha = 0.5;
  p.tau = 0.3;
  const KineticState s{equilibrium_semiclassical(uniform_density(g, 1.7, 0, 0, 0), g), 0.0};
  const auto next = kinetic_step(s, p, g, 0.05);
  for (int k = 0; k < 4; ++k) EXPECT_LT(max_abs_diff(next.w[k], s.w[k]), 1e-12);
  EXPECT_DOUBLE_EQ(next.t, 0.05);
}

TEST(KineticStep, CollisionlessFreeStreamingIsExact) {
  const Grid g(small_spec(16, 16));
  auto f = [](double x1, double x2) { return 1.0 + 0.3 * std::cos(x1 - 2 * x2) + 0.2 * std::sin(3 * x1); };
  const auto w0 = g.sample4([&](double x1, double x2, double p1, double p2) { return f(x1, x2) * gauss(p1, p2); });
  ModelParams p;
  p.collisionless = true;
  KineticSolver solver(g, p);
  solver.set_state(WignerField{w0, Field4(g.shape4()), Field4(g.shape4()), Field4(g.shape4())});
  const double t = 0.37;
  solver.advance_to(t, solver.max_stable_dt());
  const auto ref = g.sample4([&](double x1, double x2, double p1, double p2) {
    return f(x1 - p1 * t, x2 - p2 * t) * gauss(p1, p2);
  });
  EXPECT_LT(max_abs_diff(solver.wigner()[0], ref), 1e-12);
}

TEST(Substep, FreeTransportIsReversible) {
  const Grid g(small_spec(16, 16));
  const auto w = smooth_wigner(g);
  auto v = w;
  substep::free_transport(v, g, 0.2);
  substep::free_transport(v, g, -0.2);
  for (int k = 0; k < 4; ++k) EXPECT_LT(max_abs_diff(v[k], w[k]), 1e-13);
}

TEST(Substep, PrecessionPreservesSpinLengthPointwise) {
  const Grid g(small_spec(8, 32));
  const auto w = smooth_wigner(g);
  auto v = w;
  substep::precession(v, g, 1.3, 0.07);
  for (std::size_t i = 0; i < w[0].size(); ++i) {
    const double a = std::sqrt(w[1][i] * w[1][i] + w[2][i] * w[2][i] + w[3][i] * w[3][i]);
    const double b = std::sqrt(v[1][i] * v[1][i] + v[2][i] * v[2][i] + v[3][i] * v[3][i]);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, a));
  }
  EXPECT_EQ(v[0], w[0]);
}

TEST(Substep, PrecessionMatchesRotationOracle) {
  // Rotation about p_perp / |p| by 2 alpha |p| dt at every node; at |p| = 1 the angle is 2 alpha dt.
  const Grid g(small_spec(8, 16, 8.0));
  const double alpha = 0.9, dt = 0.05;
  WignerField w = zero_wigner(g);
  w[1].fill(0.3);
  w[2].fill(-0.2);
  w[3].fill(0.5);
  substep::precession(w, g, alpha, dt);
  const std::size_t np2 = g.np2();
  for (std::size_t a = 0; a < g.np1(); ++a)
    for (std::size_t b = 0; b < np2; ++b) {
      const double p1 = g.p1()[a], p2 = g.p2()[b], pn = std::hypot(p1, p2);
      const V3 ref = rotate({0.3, -0.2, 0.5}, {p2 / pn, -p1 / pn, 0.0}, 2 * alpha * pn * dt);
      const std::size_t q = a * np2 + b;
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(w[k + 1][q], ref[k], 1e-14);
    }
  // A spin along e3 is perpendicular to every in-plane axis, so its turning angle is
  // read off directly; per unit |p| it is 2 alpha dt, the p = (1, 0) value.
  WignerField z = zero_wigner(g);
  z[3].fill(1.0);
  substep::precession(z, g, alpha, dt);
  for (std::size_t a = 0; a < g.np1(); ++a)
    for (std::size_t b = 0; b < np2; ++b) {
      const double pn = std::hypot(g.p1()[a], g.p2()[b]);
      if (2 * alpha * pn * dt >= pi) continue;
      EXPECT_NEAR(std::acos(z[3][a * np2 + b]) / pn, 2 * alpha * dt, 1e-12);
    }
}

TEST(Substep, BgkPreservesAllFourDensities) {
  const Grid g(small_spec(8, 32));
  auto w = smooth_wigner(g);
  const auto before = moments(w, g);
  substep::bgk_relax(w, g, 0.2, 0.5);
  EXPECT_LT(max_density_diff(moments(w, g), before), 1e-12);
}

TEST(Substep, BgkLongTimeReachesDiscreteEquilibrium) {
  const Grid g(small_spec(8, 16));
  auto w = smooth_wigner(g);
  const auto n = moments(w, g);
  substep::bgk_relax(w, g, 0.01, 10.0);
  const auto m = discrete_maxwellian(g);
  const std::size_t np = m.size();
  for (std::size_t x = 0; x < n[0].size(); ++x)
    for (std::size_t q = 0; q < np; ++q) EXPECT_NEAR(w[0][x * np + q], m[q] * n[0][x], 1e-14);
}

TEST(Substep, CouplingConservesMass) {
  const Grid g(small_spec(16, 16));
  auto w = smooth_wigner(g);
  const double m0 = x_integral(moments(w, g)[0], g);
  substep::rashba_coupling(w, g, 0.3, 0.1);
  EXPECT_NEAR(x_integral(moments(w, g)[0], g), m0, 1e-13 * m0);
}

TEST(KineticSolver, StabilityBoundEnforced) {
  const Grid g(small_spec(8, 16));
  KineticSolver s(g, ModelParams{});
  EXPECT_NEAR(s.max_stable_dt(), 0.5 * g.spec().dx1() / 6.0, 1e-15);
  s.set_state(uniform_density(g, 1, 0, 0, 0));
  EXPECT_THROW(s.step(2 * s.max_stable_dt()), StabilityError);
  EXPECT_THROW(s.step(0.0), StabilityError);
  EXPECT_NO_THROW(s.step(s.max_stable_dt()));
}

TEST(KineticSolver, NonFiniteStateAborts) {
  const Grid g(small_spec(8, 16));
  KineticSolver s(g, ModelParams{});
  auto n = uniform_density(g, 1, 0, 0, 0);
  n[0](2, 3) = std::numeric_limits<double>::quiet_NaN();
  s.set_state(n);
  EXPECT_THROW(s.step(0.01), NumericalError);
}

TEST(RunKinetic, MassDriftBelowTolerance) {
  const Grid g(small_spec(16, 32));
  ModelParams p;
  p.epsilon = 0.2;
  p.alpha = 0.7;
  p.tau = 0.4;
  p.potential = PotentialField::cosine(g, 0.5, 1, 1);
  RunOptions opt;
  opt.dt = 0.03;
  const auto snaps = run_kinetic(smooth_density(g), p, g, 1.0, opt);
  const double m0 = total_mass(snaps.front().n, g), m1 = total_mass(snaps.back().n, g);
  EXPECT_LT(std::abs(m1 - m0) / m0, 1e-10);
}

TEST(RunKinetic, SnapshotsCallbacksAndProgress) {
  const Grid g(small_spec(8, 16));
  ModelParams p;
  p.alpha = 0.5;
  RunOptions opt;
  opt.dt = 0.05;
  opt.output_interval = 0.1;
  std::ostringstream log;
  opt.progress = &log;
  opt.progress_every = 4;
  std::size_t steps = 0, seen = 0;
  opt.on_step = [&](const StepDiagnostics&) { ++steps; };
  opt.on_snapshot = [&](const DensitySnapshot&) { ++seen; };
  const auto snaps = run_kinetic(smooth_density(g), p, g, 0.5, opt);
  ASSERT_EQ(snaps.size(), 6u);
  EXPECT_EQ(seen, snaps.size());
  EXPECT_EQ(steps, 11u);
  EXPECT_NEAR(snaps[2].t, 0.2, 1e-12);
  EXPECT_EQ(snaps.back().t, 0.5);
  EXPECT_NE(log.str().find("step 0 "), std::string::npos);
  EXPECT_THROW(run_kinetic(smooth_density(g), p, g, 0.0, opt), std::invalid_argument);
}

TEST(RunKinetic, UniformSpinPrecessionDecaysAtConstantMass) {
  const Grid g(small_spec(8, 32));
  ModelParams p;
  p.alpha = 1.0;
  p.tau = 0.05;
  RunOptions opt;
  opt.dt = 0.01;
  opt.output_interval = 0.1;
  const auto snaps = run_kinetic(uniform_density(g, 1.0, 0.5, 0.0, 0.0), p, g, 1.0, opt);
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    EXPECT_LT(std::abs(snaps[i].n[1][0]), std::abs(snaps[i - 1].n[1][0]));
    EXPECT_NEAR(snaps[i].n[0][0], snaps[0].n[0][0], 1e-12);
  }
  // Rate close to 4 alpha^2 tau after the initial layer.
  const double rate = -std::log(snaps[10].n[1][0] / snaps[5].n[1][0]) / 0.5;
  EXPECT_NEAR(rate, 4 * p.alpha * p.alpha * p.tau, 0.05 * 4 * p.alpha * p.alpha * p.tau);
}
