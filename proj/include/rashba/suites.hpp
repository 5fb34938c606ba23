#pragma once

// Named validation suites. Each returns scalar checks plus convergence
// reports; the CLI wraps them as validate:<suite> scenarios and the
// acceptance binary runs them at fixed settings.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rashba/grid.hpp"
#include "rashba/kinetic.hpp"
#include "rashba/moyal.hpp"
#include "rashba/pauli.hpp"
#include "rashba/qdd.hpp"
#include "rashba/validation.hpp"

namespace rashba {

struct SuiteResult {
  std::string name;
  std::vector<IdentityCheck> checks;
  std::vector<ConvergenceReport> convergence;
  double seconds = 0.0;

  SuiteResult() = default;
  explicit SuiteResult(std::string n) : name(std::move(n)) {}

  void check(std::string label, double error, double tolerance, std::string detail = {}) {
    checks.push_back({std::move(label), error, tolerance, error < tolerance, std::move(detail)});
  }
  /// A negative control passes when its error is at least `threshold`.
  void control(std::string label, double error, double threshold, std::string detail = {}) {
    checks.push_back({std::move(label), error, threshold, error >= threshold, std::move(detail), true});
  }
  void require(std::string label, bool ok, std::string detail = {}) {
    checks.push_back({std::move(label), ok ? 0.0 : 1.0, 0.5, ok, std::move(detail)});
  }

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    for (const auto& r : convergence)
      if (!r.passed()) return false;
    return true;
  }
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Explicit 2x2 matrices for the algebra oracle.
using M2 = std::array<std::array<complex, 2>, 2>;

inline M2 explicit_matrix(const PauliCoefficients& a) {
  const complex i{0.0, 1.0};
  const M2 s0{{{1.0, 0.0}, {0.0, 1.0}}};
  const M2 s1{{{0.0, 1.0}, {1.0, 0.0}}};
  const M2 s2{{{0.0, -i}, {i, 0.0}}};
  const M2 s3{{{1.0, 0.0}, {0.0, -1.0}}};
  M2 m{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      m[r][c] = a.c0 * s0[r][c] + a.cvec[0] * s1[r][c] + a.cvec[1] * s2[r][c] + a.cvec[2] * s3[r][c];
  return m;
}

inline M2 matmul(const M2& a, const M2& b) {
  M2 m{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
  return m;
}

// Pauli components by c_k = tr(sigma_k m) / 2.
inline PauliCoefficients decompose(const M2& m) {
  const complex i{0.0, 1.0};
  return {0.5 * (m[0][0] + m[1][1]),
          {0.5 * (m[0][1] + m[1][0]), 0.5 * (i * m[0][1] - i * m[1][0]), 0.5 * (m[0][0] - m[1][1])}};
}

inline double coeff_distance(const PauliCoefficients& a, const PauliCoefficients& b) {
  double d = std::abs(a.c0 - b.c0);
  for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(a.cvec[k] - b.cvec[k]));
  return d;
}

inline double coeff_size(const PauliCoefficients& a) {
  double d = std::abs(a.c0);
  for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(a.cvec[k]));
  return d;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Pauli product, commutator and trace against explicit 2x2 matrices.
inline SuiteResult suite_pauli(std::uint64_t seed, int pairs = 1000, double tolerance = 1e-12) {
  detail::Stopwatch clock;
  SuiteResult r{"pauli"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_coeffs = [&] {
    return PauliCoefficients{{u(rng), u(rng)}, {complex{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}};
  };
  double ep = 0, ec = 0, et = 0;
  for (int i = 0; i < pairs; ++i) {
    const auto a = random_coeffs(), b = random_coeffs();
    const auto ma = detail::explicit_matrix(a), mb = detail::explicit_matrix(b);
    const auto ab = detail::matmul(ma, mb), ba = detail::matmul(mb, ma);
    const double scale = std::max(1e-300, detail::coeff_size(a) * detail::coeff_size(b));
    ep = std::max(ep, detail::coeff_distance(pauli_product(a, b), detail::decompose(ab)) / scale);
    detail::M2 comm{};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) comm[x][y] = ab[x][y] - ba[x][y];
    ec = std::max(ec, detail::coeff_distance(pauli_commutator(a, b), detail::decompose(comm)) / scale);
    et = std::max(et, std::abs(pauli_trace(a) - (ma[0][0] + ma[1][1])) / std::max(1e-300, detail::coeff_size(a)));
  }
  r.check("product", ep, tolerance);
  r.check("commutator", ec, tolerance);
  r.check("trace", et, tolerance);
  r.seconds = clock.seconds();
  return r;
}

/// Moment identities of Theta and Theta+ on random band-limited data.
inline SuiteResult suite_identities(const GridSpec& spec, double eps, int trials, std::uint64_t seed,
                                    double tolerance = 1e-7) {
  detail::Stopwatch clock;
  SuiteResult r{"identities"};
  const Grid g(spec);
  const auto rep = check_moment_identities(g, eps, trials, seed, {tolerance, true});
  r.checks = rep.checks;
  r.seconds = clock.seconds();
  return r;
}

/// <T w> against its moment formula on random band-limited states with a random potential.
inline SuiteResult suite_aux(const GridSpec& spec, ModelParams params, int states, std::uint64_t seed,
                             double tolerance = 1e-7) {
  detail::Stopwatch clock;
  SuiteResult r{"aux"};
  const Grid g(spec);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < states; ++s) {
    params.potential = PotentialField::tabulated(g, random_mode_sum(rng, band_limit(g), 3, 0.5).sample(g));
    const auto w = random_wigner(rng, g);
    auto c = check_aux_formula(w, params, g, tolerance);
    c.name = "state" + std::to_string(s);
    r.checks.push_back(c);
  }
  auto zero = check_aux_formula(zero_wigner(g), params, g, tolerance);
  zero.name = "zero-state";
  r.checks.push_back(zero);
  r.seconds = clock.seconds();
  return r;
}

/// Residual spin-orbit current: zero for the leading-order multipliers, 2/eps a x n otherwise.
inline SuiteResult suite_residual(const GridSpec& spec, double eps, std::uint64_t seed) {
  detail::Stopwatch clock;
  SuiteResult r{"residual-current"};
  const Grid g(spec);
  std::mt19937_64 rng(seed);
  const auto n = random_density(rng, g);
  const auto a = leading_order_multipliers(n, g);
  const auto rc = residual_current(a, n, eps, g);
  double m = 0.0;
  for (int k = 0; k < 4; ++k) m = std::max(m, max_abs(rc[k]));
  r.check("leading-order-multipliers", m, 1e-10);

  // Hand-set a = (1, 0, 0), n = (0, 1, 0), eps = 0.1: expected (0, 0, 20).
  MultiplierField ha;
  SpinDensityField hn;
  for (int k = 0; k < 4; ++k) {
    ha[k] = g.zeros2();
    hn[k] = g.zeros2();
  }
  ha[1].fill(1.0);
  hn[0].fill(2.0);
  hn[2].fill(1.0);
  const auto hr = residual_current(ha, hn, 0.1, g);
  const bool exact = max_abs(hr[0]) == 0.0 && max_abs(hr[1]) == 0.0 && max_abs(hr[2]) == 0.0 &&
                     std::all_of(hr[3].begin(), hr[3].end(), [](double v) { return v == 20.0; });
  r.require("hand-set (1,0,0)x(0,1,0)", exact, "expected (0, 0, 20) at eps = 0.1");

  // Random non-parallel multipliers against the cross product written out.
  MultiplierField ra;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 4; ++k) ra[k] = g.sample2([&](double, double) { return u(rng); });
  const auto rr = residual_current(ra, n, eps, g);
  double dev = max_abs(rr[0]), size = 0.0;
  for (std::size_t x = 0; x < n[0].size(); ++x) {
    const std::array<double, 3> c{ra[2][x] * n[3][x] - ra[3][x] * n[2][x], ra[3][x] * n[1][x] - ra[1][x] * n[3][x],
                                  ra[1][x] * n[2][x] - ra[2][x] * n[1][x]};
    for (int k = 0; k < 3; ++k) {
      dev = std::max(dev, std::abs(rr[k + 1][x] - 2.0 / eps * c[k]));
      size = std::max(size, std::abs(2.0 / eps * c[k]));
    }
  }
  r.check("random non-parallel", dev / size, 1e-14, "against 2/eps a x n written out");
  r.seconds = clock.seconds();
  return r;
}

/// <T g> closed form and linear scaling, <T T g> against the drift-diffusion right side.
inline SuiteResult suite_semiclassical(const GridSpec& spec, double alpha, const std::vector<double>& eps_list,
                                       std::uint64_t seed, bool with_potential = true) {
  detail::Stopwatch clock;
  SuiteResult r{"semiclassical"};
  const Grid g(spec);
  std::mt19937_64 rng(seed);
  const auto n = random_density(rng, g);
  ModelParams p;
  p.alpha = alpha;
  if (with_potential) {
    p.potential = PotentialField::tabulated(g, random_mode_sum(rng, band_limit(g), 3, 0.3).sample(g));
  }
  const auto rep = semiclassical_consistency(n, p, g, eps_list);
  for (std::size_t i = 0; i < rep.eps.size(); ++i) {
    r.check("bkTg-closed-form eps=" + detail::fmt(rep.eps[i]), rep.first_moment_error[i],
            rep.first_moment_tolerance);
  }
  r.convergence.push_back(rep.first_moment_scaling);
  r.convergence.push_back(rep.second_moment);
  r.check("bkTTg-relative eps=" + detail::fmt(rep.eps.back()), rep.second_moment_relative,
          rep.second_moment_relative_tolerance);

  // Uniform n: <T g> vanishes for every eps.
  SpinDensityField uni = zero_density(g);
  uni[0].fill(1.0);
  uni[1].fill(0.2);
  uni[3].fill(-0.1);
  double m = 0.0;
  for (double eps : eps_list) {
    ModelParams q = p;
    q.epsilon = eps;
    q.potential.reset();
    const auto tg = moments(transport_apply(equilibrium_semiclassical(uni, g), q, g), g);
    m = std::max(m, l2_norm(tg, g));
  }
  r.check("uniform bkTg", m, 1e-12);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Drift-diffusion regressions.

/// Periodized 2D Gaussian base + amp * sigma0^2/sigma^2 sum_images exp(-|x - c|^2 / (2 sigma^2)).
inline Field2 periodic_gaussian(const Grid& g, double base, double amp, double c1, double c2, double sigma0,
                                double sigma) {
  const double L1 = g.spec().Lx1, L2 = g.spec().Lx2;
  const double scale = amp * sigma0 * sigma0 / (sigma * sigma);
  return g.sample2([&](double x1, double x2) {
    double s = 0.0;
    for (int a = -3; a <= 3; ++a)
      for (int b = -3; b <= 3; ++b) {
        const double d1 = x1 - c1 + a * L1, d2 = x2 - c2 + b * L2;
        s += std::exp(-(d1 * d1 + d2 * d2) / (2.0 * sigma * sigma));
      }
    return base + scale * s;
  });
}

struct HeatKernelResult {
  double error = 0.0;
  std::size_t steps = 0;
};

/// Relative L2 error of the drift-diffusion charge density against the heat kernel at t.
inline HeatKernelResult heat_kernel_error(const GridSpec& spec, double sigma0, double t, double kappa = 1.0,
                                          double c = 0.1) {
  const Grid g(spec);
  const double c1 = 0.5 * spec.Lx1, c2 = 0.5 * spec.Lx2;
  SpinDensityField n = zero_density(g);
  n[0] = periodic_gaussian(g, 0.0, 1.0, c1, c2, sigma0, sigma0);
  ModelParams p;
  p.kappa = kappa;
  RunOptions opt;
  opt.dt = std::min(spec.dt, qdd_stable_dt(g, p, c));
  opt.cfl = c;
  const auto snaps = run_qdd(n, p, g, t, opt);
  const double sigma = std::sqrt(sigma0 * sigma0 + 2.0 * kappa * t);
  const Field2 exact = periodic_gaussian(g, 0.0, 1.0, c1, c2, sigma0, sigma);
  const auto steps = static_cast<std::size_t>(std::ceil(t / opt.dt - 1e-9));
  return {l2_norm(snaps.back().n[0] - exact, g) / l2_norm(exact, g), steps};
}

/// Rates -log(n_k(t)/n_k(0))/t of a uniform spin state under the drift-diffusion system.
inline std::array<double, 3> qdd_uniform_decay_rates(const GridSpec& spec, double alpha, double kappa, double t,
                                                     const std::array<double, 3>& spin = {0.3, 0.2, 0.4}) {
  const Grid g(spec);
  SpinDensityField n = zero_density(g);
  n[0].fill(1.0);
  for (int k = 0; k < 3; ++k) n[k + 1].fill(spin[k]);
  ModelParams p;
  p.alpha = alpha;
  p.kappa = kappa;
  RunOptions opt;
  opt.dt = std::min(spec.dt, qdd_stable_dt(g, p));
  const auto out = run_qdd(n, p, g, t, opt).back().n;
  std::array<double, 3> rates{};
  for (int k = 0; k < 3; ++k) rates[k] = -std::log(out[k + 1][0] / spin[k]) / t;
  return rates;
}

inline SuiteResult suite_qdd(const GridSpec& heat_grid, double alpha, std::uint64_t seed) {
  detail::Stopwatch clock;
  SuiteResult r{"drift-diffusion"};
  (void)seed;
  const auto hk = heat_kernel_error(heat_grid, 0.3, 0.1);
  r.check("heat-kernel t=0.1", hk.error, 1e-4, std::to_string(hk.steps) + " RK4 steps");

  GridSpec small = heat_grid;
  small.Nx1 = small.Nx2 = 8;
  small.dt = 1e-3;
  const auto rates = qdd_uniform_decay_rates(small, alpha, 1.0, 0.1);
  const std::array<double, 3> expected{4 * alpha * alpha, 4 * alpha * alpha, 8 * alpha * alpha};
  for (int k = 0; k < 3; ++k) {
    r.check("uniform-decay n" + std::to_string(k + 1), std::abs(rates[k] - expected[k]) / expected[k], 5e-3,
            "rate " + detail::fmt(rates[k]) + " expected " + detail::fmt(expected[k]));
  }

  // Equilibrium n0 = exp(-V), n = 0 with a smooth periodic potential.
  const Grid g(heat_grid);
  const auto v = PotentialField::tabulated(g, g.sample2([](double x1, double x2) {
    return 0.5 * std::cos(x1) + 0.3 * std::sin(x2);
  }));
  SpinDensityField eq = zero_density(g);
  for (std::size_t x = 0; x < eq[0].size(); ++x) eq[0][x] = std::exp(-v.values()[x]);
  ModelParams p;
  p.alpha = alpha;
  p.potential = v;
  const auto rhs = qdd_rhs(eq, p, g);
  double m = 0.0;
  for (int k = 0; k < 4; ++k) m = std::max(m, max_abs(rhs[k]));
  r.check("steady-state exp(-V)", m, 1e-8);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Kinetic conservation.

inline SuiteResult suite_kinetic(const GridSpec& spec, std::uint64_t seed) {
  detail::Stopwatch clock;
  SuiteResult r{"kinetic"};
  const Grid g(spec);
  std::mt19937_64 rng(seed);
  const auto n = random_density(rng, g);

  ModelParams p;
  p.alpha = 0.5;
  p.epsilon = 0.1;
  p.tau = 0.5;
  p.potential = PotentialField::cosine(g, 0.3, 1, 1);
  KineticSolver ks(g, p);
  ks.set_state(n);
  const double m0 = ks.mass();
  const double t_end = 0.25;
  ks.advance_to(t_end, ks.max_stable_dt());
  r.check("mass drift per unit time", std::abs(ks.mass() - m0) / std::abs(m0) / t_end, 1e-10);

  // BGK substep alone on a random non-equilibrium state.
  WignerField w = random_wigner(rng, g);
  const auto before = moments(w, g);
  substep::bgk_relax(w, g, 0.3, 0.7);
  const auto after = moments(w, g);
  double d = 0.0, s = 0.0;
  for (int k = 0; k < 4; ++k) {
    d = std::max(d, max_abs_diff(before[k], after[k]));
    s = std::max(s, max_abs(before[k]));
  }
  r.check("bgk preserves densities", d / s, 1e-12);

  // Precession substep alone.
  WignerField v = random_wigner(rng, g);
  const WignerField v0 = v;
  substep::precession(v, g, 0.8, 0.37);
  double dn = 0.0, sn = 0.0;
  for (std::size_t q = 0; q < v[0].size(); ++q) {
    const double a = std::sqrt(v0[1][q] * v0[1][q] + v0[2][q] * v0[2][q] + v0[3][q] * v0[3][q]);
    const double b = std::sqrt(v[1][q] * v[1][q] + v[2][q] * v[2][q] + v[3][q] * v[3][q]);
    dn = std::max(dn, std::abs(a - b));
    sn = std::max(sn, a);
  }
  r.check("precession preserves |w|", dn / sn, 1e-12);
  r.require("precession leaves w0", v[0] == v0[0]);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Diffusion limit with a ballistic negative control.

inline SuiteResult suite_diffusion(const DiffusionStudyConfig& cfg, bool negative_control = true) {
  detail::Stopwatch clock;
  SuiteResult r{"diffusion-limit"};
  const Grid g(cfg.grid);
  const auto initial = diffusion_study_initial(g);
  const auto res = diffusion_limit_study(cfg, initial);
  r.convergence.push_back(res.report);
  double drift = 0.0;
  for (const auto& pt : res.points) drift = std::max(drift, pt.kinetic_mass_drift);
  r.check("kinetic mass drift", drift, 1e-10);
  if (negative_control) {
    DiffusionStudyConfig ballistic = cfg;
    ballistic.taus = {8.0, 4.0, 2.0};
    const auto nc = diffusion_limit_study(ballistic, initial);
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& pt : nc.points) smallest = std::min(smallest, pt.error);
    r.require("ballistic control not converged", !nc.report.passed(),
              "verdict " + verdict_name(nc.report.verdict) + ", " + nc.report.detail);
    r.control("ballistic discrepancy O(1)", smallest, 0.1);
  }
  r.seconds = clock.seconds();
  return r;
}

inline SuiteResult suite_spin_decay(const GridSpec& spec, double alpha, const std::vector<double>& taus) {
  detail::Stopwatch clock;
  SuiteResult r{"kinetic-spin-decay"};
  const auto res = spin_decay_study(spec, alpha, taus);
  r.convergence.push_back(res.report);
  bool monotone = true;
  for (std::size_t i = 1; i < res.points.size(); ++i)
    monotone = monotone && res.points[i].max_relative_deviation < res.points[i - 1].max_relative_deviation;
  r.require("deviation shrinks with tau", monotone);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Moyal truncation.

inline SuiteResult suite_moyal(const GridSpec& spec, double eps) {
  detail::Stopwatch clock;
  SuiteResult r{"moyal"};
  const Grid g(spec);
  const double L1 = spec.Lx1, L2 = spec.Lx2;
  const double k1 = 2.0 * std::numbers::pi / L1, k2 = 2.0 * std::numbers::pi / L2;
  using S = DerivativeScheme;

  // a = p1 (polynomial in p), b = periodic Gaussian in x1.
  const auto a = make_symbol(g, [](double, double, double p1, double) { return cplx(p1); }, S::spectral,
                             S::polynomial);
  auto bump = [&](double x1) { return std::exp(2.0 * (std::cos(k1 * x1) - 1.0)); };
  auto dbump = [&](double x1) { return -2.0 * k1 * std::sin(k1 * x1) * bump(x1); };
  const auto b = make_symbol(g, [&](double x1, double, double, double) { return cplx(bump(x1)); });

  // c = cos(x1) sin(x2) p1 p2^2, d = sin(x1 + x2) exp(-|p|^2/2).
  const auto c = make_symbol(
      g, [&](double x1, double x2, double p1, double p2) { return cplx(std::cos(k1 * x1) * std::sin(k2 * x2) * p1 * p2 * p2); },
      S::spectral, S::polynomial);
  const auto d = make_symbol(g, [&](double x1, double x2, double p1, double p2) {
    return cplx(std::sin(k1 * x1 + k2 * x2) * std::exp(-0.5 * (p1 * p1 + p2 * p2)));
  });
  // {c, d} = d_x1 c d_p1 d + d_x2 c d_p2 d - d_p1 c d_x1 d - d_p2 c d_x2 d.
  const auto pb_cd = make_symbol(g, [&](double x1, double x2, double p1, double p2) {
    const double cx = std::cos(k1 * x1), sx = std::sin(k1 * x1), cy = std::cos(k2 * x2), sy = std::sin(k2 * x2);
    const double m = std::exp(-0.5 * (p1 * p1 + p2 * p2));
    const double s = std::sin(k1 * x1 + k2 * x2), co = std::cos(k1 * x1 + k2 * x2);
    const double c_x1 = -k1 * sx * sy * p1 * p2 * p2, c_x2 = k2 * cx * cy * p1 * p2 * p2;
    const double c_p1 = cx * sy * p2 * p2, c_p2 = 2.0 * cx * sy * p1 * p2;
    const double d_x1 = k1 * co * m, d_x2 = k2 * co * m;
    const double d_p1 = -p1 * s * m, d_p2 = -p2 * s * m;
    return cplx(c_x1 * d_p1 + c_x2 * d_p2 - c_p1 * d_x1 - c_p2 * d_x2);
  });

  auto rel = [](const ComplexField4& x, const ComplexField4& y) {
    return max_abs_diff(x, y) / std::max(1e-300, max_abs(y));
  };

  // #0 is the pointwise product.
  {
    ComplexField4 prod = c.values;
    for (std::size_t q = 0; q < prod.size(); ++q) prod[q] *= d.values[q];
    const auto t0 = moyal_term(c, d, g, 0);
    r.check("#0 pointwise", max_abs_diff(t0, prod) / std::max(1e-300, max_abs(prod)), 1e-15);
  }
  // #1 = (i/2) {a, b}: for a = p1, b = b(x1) this is (i/2)(-d_x1 b).
  {
    const auto t1 = moyal_term(a, b, g, 1);
    const auto ref = make_symbol(g, [&](double x1, double, double, double) { return cplx(0.0, -0.5 * dbump(x1)); });
    r.check("#1 p1 x bump", rel(t1, ref.values), 1e-9);
  }
  {
    const auto t1 = moyal_term(c, d, g, 1);
    ComplexField4 ref = pb_cd.values;
    for (auto& v : ref) v *= cplx(0.0, 0.5);
    r.check("#1 mixed pair", rel(t1, ref), 1e-9);
  }
  // Bracket antisymmetry, exact.
  for (int K : {1, 3}) {
    const auto ab = moyal_bracket_truncated(c, d, g, K, eps);
    auto ba = moyal_bracket_truncated(d, c, g, K, eps);
    for (auto& v : ba.values) v = -v;
    r.require("bracket antisymmetry K=" + std::to_string(K), ab.values == ba.values);
  }
  // K = 1 bracket equals i eps {c, d}.
  {
    const auto br = moyal_bracket_truncated(c, d, g, 1, eps);
    ComplexField4 ref = pb_cd.values;
    for (auto& v : ref) v *= cplx(0.0, eps);
    r.check("K=1 bracket = i eps PB", rel(br.values, ref), 1e-9);
  }
  // p-independent symbols: a # b = ab for every K.
  {
    const auto e = make_symbol(g, [&](double x1, double x2, double, double) { return cplx(std::cos(k1 * x1 + k2 * x2)); });
    const auto prod = moyal_product_truncated(b, e, g, 3, eps);
    ComplexField4 ref = b.values;
    for (std::size_t q = 0; q < ref.size(); ++q) ref[q] *= e.values[q];
    r.check("p-independent K=3", max_abs_diff(prod.values, ref), 1e-15);
  }
  r.seconds = clock.seconds();
  return r;
}

inline std::string summary(const SuiteResult& s) {
  std::ostringstream os;
  os << std::setprecision(4);
  os << s.name << ": " << (s.passed() ? "pass" : "fail") << " (" << s.seconds << " s)";
  for (const auto& c : s.checks) {
    os << "\n  " << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.error << (c.control ? " >= " : " < ")
       << c.tolerance;
    if (!c.detail.empty()) os << "  [" << c.detail << "]";
  }
  for (const auto& rep : s.convergence) os << "\n  " << summary(rep);
  return os.str();
}

inline void write_suite_csv(std::ostream& os, const SuiteResult& s) {
  os << std::setprecision(17);
  os << "# suite " << s.name << " verdict=" << (s.passed() ? "pass" : "fail") << '\n';
  os << "check,error,tolerance,passed,control,detail\n";
  for (const auto& c : s.checks)
    os << c.name << ',' << c.error << ',' << c.tolerance << ',' << (c.passed ? 1 : 0) << ',' << (c.control ? 1 : 0)
       << ",\"" << c.detail << "\"\n";
  for (const auto& r : s.convergence) write_report_csv(os, r);
}

}  // namespace rashba
