#pragma once

// Cross-model checks: moment identities of the Theta operators, the moment
// formula for <T w>, the semiclassical moments of T g and T T g, and the
// kinetic-to-drift-diffusion convergence study.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rashba/grid.hpp"
#include "rashba/kinetic.hpp"
#include "rashba/moyal.hpp"
#include "rashba/qdd.hpp"
#include "rashba/spectral.hpp"

namespace rashba {

enum class Verdict { pass, fail, inconclusive };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// Least-squares fit of log(error) against log(parameter).
struct ConvergenceReport {
  std::string name;
  std::string parameter;
  std::vector<double> values;
  std::vector<double> errors;
  double order = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  double min_order = 0.0;
  double max_order = std::numeric_limits<double>::infinity();
  double min_r_squared = 0.95;
  Verdict verdict = Verdict::inconclusive;
  std::string detail;

  bool passed() const { return verdict == Verdict::pass; }
};

inline ConvergenceReport fit_convergence(std::string name, std::string parameter,
                                         std::vector<double> values, std::vector<double> errors,
                                         double min_order,
                                         double max_order = std::numeric_limits<double>::infinity(),
                                         double min_r_squared = 0.95) {
  ConvergenceReport r;
  r.name = std::move(name);
  r.parameter = std::move(parameter);
  r.values = std::move(values);
  r.errors = std::move(errors);
  r.min_order = min_order;
  r.max_order = max_order;
  r.min_r_squared = min_r_squared;
  if (r.values.size() != r.errors.size()) {
    throw std::invalid_argument("fit_convergence: values and errors differ in length");
  }
  if (r.values.size() < 3) {
    throw std::invalid_argument("fit_convergence: at least three points are required");
  }
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    if (!(r.values[i] > 0.0) || !(r.errors[i] > 0.0) || !std::isfinite(r.errors[i])) {
      r.verdict = Verdict::inconclusive;
      r.detail = "non-positive or non-finite error; no log-log fit possible";
      return r;
    }
  }
  const auto n = static_cast<double>(r.values.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const double x = std::log(r.values[i]), y = std::log(r.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) {
    r.detail = "parameter values are all equal";
    return r;
  }
  r.order = (n * sxy - sx * sy) / den;
  r.intercept = (sy - r.order * sx) / n;
  const double ymean = sy / n;
  double ss_tot = 0, ss_res = 0;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const double x = std::log(r.values[i]), y = std::log(r.errors[i]);
    const double f = r.intercept + r.order * x;
    ss_res += (y - f) * (y - f);
    ss_tot += (y - ymean) * (y - ymean);
  }
  r.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);

  std::ostringstream msg;
  msg << "order " << r.order << ", R^2 " << r.r_squared;
  if (r.r_squared < r.min_r_squared) {
    r.verdict = Verdict::inconclusive;
    msg << " below " << r.min_r_squared;
  } else if (r.order >= r.min_order && r.order <= r.max_order) {
    r.verdict = Verdict::pass;
  } else {
    r.verdict = Verdict::fail;
    msg << " outside [" << r.min_order << ", " << r.max_order << "]";
  }
  r.detail = msg.str();
  return r;
}

struct IdentityCheck {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
  /// Negative controls pass by failing their identity; excluded from max_error.
  bool control = false;
};

struct IdentityReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<IdentityCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  double max_error() const {
    double m = 0.0;
    for (const auto& c : checks)
      if (!c.control) m = std::max(m, c.error);
    return m;
  }
};

// ---------------------------------------------------------------------------
// Random smooth test data.

/// Real trigonometric sum f(x) = c + sum amp cos(2 pi (m1 x1 / L1 + m2 x2 / L2) + phase),
/// kept symbolic so its gradient is known exactly, whatever the grid.
struct ModeSum {
  struct Mode {
    int m1 = 0, m2 = 0;
    double amplitude = 0.0, phase = 0.0;
  };
  double constant = 0.0;
  std::vector<Mode> modes;

  Field2 sample(const Grid& g) const {
    const double L1 = g.spec().Lx1, L2 = g.spec().Lx2;
    return g.sample2([&](double x1, double x2) {
      double s = constant;
      for (const auto& m : modes)
        s += m.amplitude * std::cos(2.0 * std::numbers::pi * (m.m1 * x1 / L1 + m.m2 * x2 / L2) + m.phase);
      return s;
    });
  }

  Field2 gradient(const Grid& g, int axis) const {
    const double L1 = g.spec().Lx1, L2 = g.spec().Lx2;
    return g.sample2([&](double x1, double x2) {
      double s = 0.0;
      for (const auto& m : modes) {
        const double k = 2.0 * std::numbers::pi * (axis == 0 ? m.m1 / L1 : m.m2 / L2);
        s -= m.amplitude * k *
             std::sin(2.0 * std::numbers::pi * (m.m1 * x1 / L1 + m.m2 * x2 / L2) + m.phase);
      }
      return s;
    });
  }
};

/// Random modes with |m| <= max_mode in each direction.
inline ModeSum random_mode_sum(std::mt19937_64& rng, int max_mode, int count, double amplitude,
                               double constant = 0.0) {
  std::uniform_int_distribution<int> mode(-max_mode, max_mode);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  ModeSum f;
  f.constant = constant;
  for (int i = 0; i < count; ++i) f.modes.push_back({mode(rng), mode(rng), amplitude * unit(rng), angle(rng)});
  return f;
}

/// Band-limit used for randomized inputs: the lowest quarter of the resolved spectrum.
inline int band_limit(const Grid& g) {
  return std::max(1, static_cast<int>(std::min(g.nx1(), g.nx2()) / 8));
}

/// Maxwellian-weighted random Wigner field:
///   w_k(x, p) = sum_r c_kr(x) exp(-|p - d_kr|^2 / 2) / (2 pi),
/// with band-limited coefficients c_kr and small random drifts d_kr.
inline WignerField random_wigner(std::mt19937_64& rng, const Grid& g, int terms = 2) {
  std::uniform_real_distribution<double> shift(-0.5, 0.5);
  const int band = band_limit(g);
  WignerField w = zero_wigner(g);
  const std::size_t np1 = g.np1(), np2 = g.np2(), np = np1 * np2;
  for (int k = 0; k < 4; ++k)
    for (int r = 0; r < terms; ++r) {
      const Field2 c = random_mode_sum(rng, band, 3, 0.3, k == 0 ? 1.0 : 0.0).sample(g);
      const double d1 = shift(rng), d2 = shift(rng);
      std::vector<double> m(np);
      for (std::size_t a = 0; a < np1; ++a)
        for (std::size_t b = 0; b < np2; ++b) {
          const double q1 = g.p1()[a] - d1, q2 = g.p2()[b] - d2;
          m[a * np2 + b] = std::exp(-0.5 * (q1 * q1 + q2 * q2)) / (2.0 * std::numbers::pi);
        }
      for (std::size_t x = 0; x < c.size(); ++x) {
        double* row = w[k].data() + x * np;
        for (std::size_t q = 0; q < np; ++q) row[q] += c[x] * m[q];
      }
    }
  return w;
}

/// Smooth, strictly mixed density: n0 around 1, |n| well below n0.
inline SpinDensityField random_density(std::mt19937_64& rng, const Grid& g) {
  const int band = band_limit(g);
  SpinDensityField n;
  n[0] = random_mode_sum(rng, band, 3, 0.1, 1.0).sample(g);
  for (int k = 1; k < 4; ++k) n[k] = random_mode_sum(rng, band, 3, 0.08).sample(g);
  return n;
}

// ---------------------------------------------------------------------------
// Moment identities of Theta and Theta+.

namespace detail {

inline Field2 pointwise(const Field2& a, const Field2& b) {
  Field2 out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

inline Field2 absolute(Field2 a) {
  for (auto& v : a) v = std::abs(v);
  return a;
}

}  // namespace detail

/// Relative errors of <Theta[f] w> = 0, <p_j Theta[f] w> = -d_j f <w> and
/// <Theta+[f] w> = 2 f <w>, using the exact gradient of f. Errors are scaled by
/// || |f| <w> || + || |grad f| <w> || summed over components.
struct IdentityErrors {
  double mass = 0.0;
  double momentum = 0.0;
  double even = 0.0;
};

inline IdentityErrors theta_identity_errors(const ModeSum& f, const WignerField& w, double eps,
                                            const Grid& g) {
  const Field2 fv = f.sample(g);
  const auto pot = PotentialField::tabulated(g, fv);
  const ThetaOperator odd(g, pot, eps, ThetaParity::odd);
  const ThetaOperator even(g, pot, eps, ThetaParity::even);
  const std::array<Field2, 2> grad{f.gradient(g, 0), f.gradient(g, 1)};
  Field2 gnorm = g.zeros2();
  for (std::size_t i = 0; i < gnorm.size(); ++i) gnorm[i] = std::hypot(grad[0][i], grad[1][i]);

  IdentityErrors e;
  double scale = 0.0;
  double s_mass = 0.0, s_mom = 0.0, s_even = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Field2 nk = p_integral(w[k], g);
    scale += l2_norm(detail::pointwise(detail::absolute(fv), nk), g) +
             l2_norm(detail::pointwise(gnorm, nk), g);
    auto se = spectral::forward(w[k], {2, 3});
    auto so = se;
    odd.apply_spectrum(so);
    even.apply_spectrum(se);
    const Field4 tw = spectral::inverse<4>(so, w[k].shape(), {2, 3});
    // The p-integral of Theta+[f] w is its eta = 0 coefficient times dp1 dp2.
    Field2 even_moment(g.shape2());
    const std::size_t bins = g.np1() * (g.np2() / 2 + 1);
    for (std::size_t x = 0; x < even_moment.size(); ++x) even_moment[x] = se[x * bins].real() * g.cell_area_p();
    const double m = l2_norm(p_integral(tw, g), g);
    s_mass += m * m;
    for (int j = 0; j < 2; ++j) {
      Field2 lhs = p_weighted_integral(tw, g, j);
      lhs.axpy(1.0, detail::pointwise(grad[j], nk));
      const double d = l2_norm(lhs, g);
      s_mom += d * d;
    }
    Field2 lhs = even_moment;
    lhs.axpy(-2.0, detail::pointwise(fv, nk));
    const double d = l2_norm(lhs, g);
    s_even += d * d;
  }
  if (scale == 0.0) scale = 1.0;
  e.mass = std::sqrt(s_mass) / scale;
  e.momentum = std::sqrt(s_mom) / scale;
  e.even = std::sqrt(s_even) / scale;
  return e;
}

struct MomentIdentityOptions {
  double tolerance = 1e-7;
  /// Adds a constant-potential case and an aliased-mode negative control.
  bool controls = true;
};

/// Randomized moment identities; the aliased control is expected to fail and
/// the report records whether it did.
inline IdentityReport check_moment_identities(const Grid& g, double eps, int trials, std::uint64_t seed,
                                              const MomentIdentityOptions& opt = {}) {
  if (trials < 1) throw std::invalid_argument("check_moment_identities: trials must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("check_moment_identities: ε must be positive");
  IdentityReport report{"identities", seed, {}};
  std::mt19937_64 rng(seed);
  auto add = [&](const std::string& label, const IdentityErrors& e) {
    const std::array<std::pair<const char*, double>, 3> parts{
        {{"mass", e.mass}, {"momentum", e.momentum}, {"even", e.even}}};
    for (const auto& [what, err] : parts) {
      report.checks.push_back({label + "/" + what, err, opt.tolerance, err < opt.tolerance, ""});
    }
  };
  for (int t = 0; t < trials; ++t) {
    const ModeSum f = random_mode_sum(rng, band_limit(g), 4, 1.0, 0.5);
    const WignerField w = random_wigner(rng, g);
    add("trial" + std::to_string(t), theta_identity_errors(f, w, eps, g));
  }
  if (opt.controls) {
    const WignerField w = random_wigner(rng, g);
    ModeSum c;
    c.constant = 0.7;
    add("constant", theta_identity_errors(c, w, eps, g));

    // A mode beyond the grid Nyquist frequency is seen as its alias; the
    // momentum identity against the true gradient must detect it.
    ModeSum aliased;
    aliased.modes.push_back({static_cast<int>(g.nx1()) / 2 + 2, 0, 0.5, 0.3});
    const auto e = theta_identity_errors(aliased, w, eps, g);
    const bool detected = e.momentum > opt.tolerance;
    std::ostringstream d;
    d << "momentum identity error " << e.momentum << (detected ? " (aliasing detected)" : " (aliasing missed)");
    report.checks.push_back({"aliased-control", e.momentum, opt.tolerance, detected, d.str(), true});
  }
  return report;
}

// ---------------------------------------------------------------------------
// <T w> against its moment formula.

/// Right side of the moment formula
///   <T w>_0 = -d_j <p_j w0> - eps alpha div_perp <w>
///   <T w>   = -d_j <p_j w>  - eps alpha grad_perp <w0> + 2 alpha <p_perp x w>.
inline SpinDensityField aux_formula(const WignerField& w, const ModelParams& params, const Grid& g) {
  const auto n = moments(w, g);
  const auto p1 = momentum_moment(w, g, 0);
  const auto p2 = momentum_moment(w, g, 1);
  const double ea = params.epsilon * params.alpha;
  SpinDensityField out;
  for (int k = 0; k < 4; ++k) {
    out[k] = spectral::divergence(p1[k], p2[k], g);
    out[k] *= -1.0;
  }
  const auto g0 = spectral::gradient(n[0], g);
  out[0].axpy(-ea, spectral::x_derivative(n[1], g, 1));
  out[0].axpy(ea, spectral::x_derivative(n[2], g, 0));
  out[1].axpy(-ea, g0[1]);
  out[2].axpy(ea, g0[0]);
  const double s = 2.0 * params.alpha;
  out[1].axpy(-s, p1[3]);
  out[2].axpy(-s, p2[3]);
  out[3].axpy(s, p1[1]);
  out[3].axpy(s, p2[2]);
  return out;
}

/// Relative L2 difference between moments(T w) and the moment formula.
inline IdentityCheck check_aux_formula(const WignerField& w, const ModelParams& params, const Grid& g,
                                       double tolerance = 1e-7) {
  const auto lhs = moments(transport_apply(w, params, g), g);
  const auto rhs = aux_formula(w, params, g);
  const double diff = l2_distance(lhs, rhs, g);
  // Scale: the size of the individual flux terms, so that cancellations
  // (e.g. w = 0 or equilibrium data) do not divide by zero.
  const auto n = moments(w, g);
  const double scale = l2_norm(momentum_moment(w, g, 0), g) + l2_norm(momentum_moment(w, g, 1), g) +
                       (std::abs(params.epsilon * params.alpha) + 2.0 * params.alpha) * l2_norm(n, g);
  const double err = scale > 0.0 ? diff / scale : diff;
  std::ostringstream d;
  d << "absolute " << diff;
  return {"aux", err, tolerance, err < tolerance, d.str()};
}

// ---------------------------------------------------------------------------
// Semiclassical moments of T g and T T g.

/// -eps alpha (div_perp n, grad_perp n0): the exact first moment of T g.
inline SpinDensityField bkTg_semiclassical(const SpinDensityField& n, const ModelParams& params,
                                           const Grid& g) {
  const double ea = params.epsilon * params.alpha;
  SpinDensityField out = zero_density(g);
  out[0].axpy(-ea, spectral::x_derivative(n[1], g, 1));
  out[0].axpy(ea, spectral::x_derivative(n[2], g, 0));
  const auto g0 = spectral::gradient(n[0], g);
  out[1].axpy(-ea, g0[1]);
  out[2].axpy(ea, g0[0]);
  return out;
}

struct SemiclassicalReport {
  std::vector<double> eps;
  /// ||<T g> - closed form|| / ||closed form|| per eps.
  std::vector<double> first_moment_error;
  double first_moment_tolerance = 1e-7;
  /// ||<T g>|| against eps; expected order 1.
  ConvergenceReport first_moment_scaling;
  /// ||<T T g> - drift-diffusion right side|| against eps; expected order >= 1.
  ConvergenceReport second_moment;
  /// Relative deviation of <T T g> at the smallest eps.
  double second_moment_relative = 0.0;
  double second_moment_relative_tolerance = 5e-2;

  bool first_moment_passed() const {
    return std::all_of(first_moment_error.begin(), first_moment_error.end(),
                       [&](double e) { return e < first_moment_tolerance; });
  }
  bool passed() const {
    return first_moment_passed() && first_moment_scaling.passed() && second_moment.passed() &&
           second_moment_relative < second_moment_relative_tolerance;
  }
};

inline SemiclassicalReport semiclassical_consistency(const SpinDensityField& n, const ModelParams& params,
                                                     const Grid& g, const std::vector<double>& eps_list) {
  if (eps_list.size() < 3) throw std::invalid_argument("semiclassical_consistency: need >= 3 eps values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("semiclassical_consistency: eps values must be decreasing");
    }
  SemiclassicalReport r;
  r.eps = eps_list;
  const WignerField eq = equilibrium_semiclassical(n, g);
  std::vector<double> tg_norm, tt_dev;
  for (double eps : eps_list) {
    ModelParams p = params;
    p.epsilon = eps;
    const WignerField tg = transport_apply(eq, p, g);
    const auto m1 = moments(tg, g);
    const auto ref1 = bkTg_semiclassical(n, p, g);
    const double ref_norm = l2_norm(ref1, g);
    const double d1 = l2_distance(m1, ref1, g);
    r.first_moment_error.push_back(ref_norm > 0.0 ? d1 / ref_norm : d1);
    tg_norm.push_back(l2_norm(m1, g));

    const auto m2 = moments(transport_apply(tg, p, g), g);
    const auto ref2 = bkTT_semiclassical(n, p, g);
    const double dev = l2_distance(m2, ref2, g);
    tt_dev.push_back(dev);
    r.second_moment_relative = dev / l2_norm(ref2, g);
  }
  r.first_moment_scaling = fit_convergence("bkTg-scaling", "epsilon", eps_list, tg_norm, 0.9, 1.1);
  r.second_moment = fit_convergence("bkTTg-deviation", "epsilon", eps_list, tt_dev, 1.0);
  return r;
}

// ---------------------------------------------------------------------------
// Diffusion limit: kinetic model at small tau against drift-diffusion with kappa = tau.

struct DiffusionStudyConfig {
  GridSpec grid;
  ModelParams params;
  std::vector<double> taus{0.2, 0.1, 0.05};
  double t_probe = 0.5;
  /// Kinetic step: min(advection bound, dt_per_tau * tau).
  double dt_per_tau = 0.05;
  double kinetic_cfl = 0.5;
  double qdd_c = 0.1;
  double min_order = 0.8;
  bool parallel = true;
};

/// Smooth default initial density for the study.
inline SpinDensityField diffusion_study_initial(const Grid& g) {
  SpinDensityField n;
  const double L1 = g.spec().Lx1, L2 = g.spec().Lx2;
  const double k1 = 2.0 * std::numbers::pi / L1, k2 = 2.0 * std::numbers::pi / L2;
  n[0] = g.sample2([&](double x1, double x2) {
    return 1.0 + 0.3 * std::cos(k1 * x1) + 0.2 * std::sin(k2 * x2 + 0.4);
  });
  n[1] = g.sample2([&](double x1, double x2) { return 0.2 * std::cos(k1 * x1 + k2 * x2); });
  n[2] = g.sample2([&](double x1, double x2) { return 0.1 * std::sin(k1 * x1) * std::cos(k2 * x2); });
  n[3] = g.sample2([&](double, double x2) { return 0.15 * std::cos(2.0 * k2 * x2); });
  return n;
}

struct DiffusionPoint {
  double tau = 0.0;
  double error = 0.0;
  double kinetic_mass_drift = 0.0;
  std::size_t kinetic_steps = 0;
};

inline DiffusionPoint diffusion_point(const DiffusionStudyConfig& cfg, const SpinDensityField& initial,
                                      double tau) {
  const Grid g(cfg.grid);
  ModelParams kp = cfg.params;
  kp.tau = tau;
  kp.collisionless = false;
  KineticSolver ks(g, kp, cfg.kinetic_cfl);
  ks.set_state(initial);
  const double m0 = ks.mass();
  const double h = std::min(ks.max_stable_dt(), cfg.dt_per_tau * tau);
  const std::size_t steps = ks.advance_to(cfg.t_probe, h);
  const auto nk = ks.densities();

  ModelParams qp = cfg.params;
  qp.kappa = tau;
  RunOptions qo;
  qo.dt = qdd_stable_dt(g, qp, cfg.qdd_c);
  qo.cfl = cfg.qdd_c;
  const auto nq = run_qdd(initial, qp, g, cfg.t_probe, qo).back().n;
  return {tau, l2_distance(nk, nq, g) / l2_norm(nq, g), std::abs(ks.mass() - m0) / std::abs(m0), steps};
}

struct DiffusionStudyResult {
  std::vector<DiffusionPoint> points;
  ConvergenceReport report;
};

inline DiffusionStudyResult diffusion_limit_study(const DiffusionStudyConfig& cfg,
                                                  const SpinDensityField& initial) {
  if (cfg.taus.size() < 3) throw std::invalid_argument("diffusion_limit_study: need >= 3 tau values");
  for (std::size_t i = 1; i < cfg.taus.size(); ++i)
    if (!(cfg.taus[i] < cfg.taus[i - 1])) {
      throw std::invalid_argument("diffusion_limit_study: tau values must be decreasing");
    }
  if (!(cfg.t_probe > 0.0)) throw std::invalid_argument("diffusion_limit_study: t_probe must be positive");
  DiffusionStudyResult res;
  if (cfg.parallel) {
    std::vector<std::future<DiffusionPoint>> jobs;
    for (double tau : cfg.taus)
      jobs.push_back(std::async(std::launch::async, [&cfg, &initial, tau] {
        return diffusion_point(cfg, initial, tau);
      }));
    for (auto& j : jobs) res.points.push_back(j.get());
  } else {
    for (double tau : cfg.taus) res.points.push_back(diffusion_point(cfg, initial, tau));
  }
  std::vector<double> errs;
  for (const auto& p : res.points) errs.push_back(p.error);
  res.report = fit_convergence("diffusion-limit", "tau", cfg.taus, errs, cfg.min_order);
  return res;
}

// ---------------------------------------------------------------------------
// Uniform spin relaxation of the kinetic model against the rates 4a^2 tau, 4a^2 tau, 8a^2 tau.

struct SpinDecayPoint {
  double tau = 0.0;
  std::array<double, 3> rates{};
  std::array<double, 3> expected{};
  double max_relative_deviation = 0.0;
};

struct SpinDecayResult {
  std::vector<SpinDecayPoint> points;
  ConvergenceReport report;
};

/// Rates are measured over [t0, t0 + window] with t0 = skip * tau, past the initial layer.
inline SpinDecayPoint kinetic_spin_decay(const GridSpec& spec, double alpha, double tau,
                                         const std::array<double, 3>& spin, double window,
                                         double skip = 10.0, double dt_per_tau = 0.05) {
  const Grid g(spec);
  ModelParams p;
  p.alpha = alpha;
  p.tau = tau;
  KineticSolver ks(g, p);
  SpinDensityField n = zero_density(g);
  n[0].fill(1.0);
  for (int k = 0; k < 3; ++k) n[k + 1].fill(spin[k]);
  ks.set_state(n);
  const double h = std::min(ks.max_stable_dt(), dt_per_tau * tau);
  const double t0 = skip * tau;
  ks.advance_to(t0, h);
  const auto a = ks.densities();
  ks.advance_to(t0 + window, h);
  const auto b = ks.densities();
  SpinDecayPoint pt;
  pt.tau = tau;
  pt.expected = {4.0 * alpha * alpha * tau, 4.0 * alpha * alpha * tau, 8.0 * alpha * alpha * tau};
  for (int k = 0; k < 3; ++k) {
    pt.rates[k] = -std::log(b[k + 1][0] / a[k + 1][0]) / window;
    pt.max_relative_deviation =
        std::max(pt.max_relative_deviation, std::abs(pt.rates[k] - pt.expected[k]) / pt.expected[k]);
  }
  return pt;
}

inline SpinDecayResult spin_decay_study(const GridSpec& spec, double alpha, const std::vector<double>& taus,
                                        const std::array<double, 3>& spin = {0.3, 0.2, 0.4}) {
  SpinDecayResult r;
  std::vector<double> devs;
  for (double tau : taus) {
    // Window of one expected e-folding of the slowest component.
    const double window = 1.0 / (4.0 * alpha * alpha * tau);
    r.points.push_back(kinetic_spin_decay(spec, alpha, tau, spin, window));
    devs.push_back(r.points.back().max_relative_deviation);
  }
  r.report = fit_convergence("spin-decay-rates", "tau", taus, devs, 0.8);
  return r;
}

// ---------------------------------------------------------------------------
// Report output.

inline void write_report_csv(std::ostream& os, const ConvergenceReport& r) {
  os << std::setprecision(17);
  os << "# " << r.name << " verdict=" << verdict_name(r.verdict) << " order=" << r.order
     << " r_squared=" << r.r_squared << " min_order=" << r.min_order << '\n';
  os << r.parameter << ",error\n";
  for (std::size_t i = 0; i < r.values.size(); ++i) os << r.values[i] << ',' << r.errors[i] << '\n';
}

inline void write_report_csv(std::ostream& os, const IdentityReport& r) {
  os << std::setprecision(17);
  os << "# " << r.suite << " seed=" << r.seed << " verdict=" << (r.passed() ? "pass" : "fail") << '\n';
  os << "check,error,tolerance,passed,detail\n";
  for (const auto& c : r.checks)
    os << c.name << ',' << c.error << ',' << c.tolerance << ',' << (c.passed ? 1 : 0) << ",\"" << c.detail
       << "\"\n";
}

inline std::string summary(const ConvergenceReport& r) {
  std::ostringstream os;
  os << std::setprecision(4);
  os << r.name << ": " << verdict_name(r.verdict) << " (" << r.detail << ")";
  for (std::size_t i = 0; i < r.values.size(); ++i)
    os << "\n  " << r.parameter << " = " << r.values[i] << "  error = " << r.errors[i];
  return os.str();
}

inline std::string summary(const IdentityReport& r) {
  std::ostringstream os;
  os << std::setprecision(4);
  std::size_t failed = 0;
  for (const auto& c : r.checks) failed += c.passed ? 0 : 1;
  os << r.suite << ": " << (r.passed() ? "pass" : "fail") << " (" << r.checks.size() << " checks, "
     << failed << " failed, max error " << r.max_error() << ", seed " << r.seed << ")";
  for (const auto& c : r.checks)
    if (!c.passed || !c.detail.empty()) os << "\n  " << c.name << ": " << c.error << " " << c.detail;
  return os.str();
}

}  // namespace rashba
