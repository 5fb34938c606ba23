#pragma once

// Scaled Wigner-BGK system
//
//   d_t w0 = -p.grad w0 - eps*alpha div_perp(w)     + Theta[V] w0 + (g0 - w0)/tau
//   d_t w  = -p.grad w  - eps*alpha grad_perp(w0)   + Theta[V] w  + 2 alpha p_perp x w + (g - w)/tau
//
// with grad_perp f = (d2 f, -d1 f, 0), div_perp w = d2 w1 - d1 w2, p_perp = (p2, -p1, 0)
// and the semiclassical equilibrium g = M(p) n, M = exp(-|p|^2/2) / (2 pi).
//
// The integrator keeps w Fourier-transformed in x. Free streaming, the Rashba
// coupling, precession and BGK relaxation are all x-independent linear maps and
// act bin by bin; only the force substep returns to physical space.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rashba/array.hpp"
#include "rashba/aligned.hpp"
#include "rashba/fft.hpp"
#include "rashba/grid.hpp"
#include "rashba/moyal.hpp"
#include "rashba/potential.hpp"
#include "rashba/spectral.hpp"

namespace rashba {

/// Thrown when a solver produces non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a time step violates the scheme's stability bound.
class StabilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ModelParams {
  double epsilon = 0.1;
  double alpha = 0.0;
  double tau = 1.0;
  /// tau = infinity: no relaxation.
  bool collisionless = false;
  /// Diffusive prefactor of the drift-diffusion right side.
  double kappa = 1.0;
  /// Absent means V = 0.
  std::optional<PotentialField> potential;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("ε must be positive");
    if (!(alpha >= 0.0)) throw std::invalid_argument("α must be non-negative");
    if (!collisionless && !(tau > 0.0)) throw std::invalid_argument("τ must be positive");
    if (!(kappa > 0.0)) throw std::invalid_argument("κ must be positive");
  }

  bool has_force() const { return potential && !potential->is_constant(); }
};

struct KineticState {
  WignerField w;
  double t = 0.0;
};

inline double total_mass(const SpinDensityField& n, const Grid& g) { return x_integral(n[0], g); }

/// g_k(x, p) = exp(-|p|^2/2) / (2 pi) * n_k(x).
inline WignerField equilibrium_semiclassical(const SpinDensityField& n, const Grid& g) {
  const auto m = maxwellian(g);
  const std::size_t np = m.size();
  WignerField w = zero_wigner(g);
  for (int k = 0; k < 4; ++k) {
    require_shape(n[k], g, "equilibrium_semiclassical");
    for (std::size_t x = 0; x < n[k].size(); ++x) {
      double* row = w[k].data() + x * np;
      for (std::size_t q = 0; q < np; ++q) row[q] = m[q] * n[k][x];
    }
  }
  return w;
}

/// The transport operator T w (everything but the relaxation term), derivatives spectral.
inline WignerField transport_apply(const WignerField& w, const ModelParams& params, const Grid& g) {
  params.validate();
  for (int k = 0; k < 4; ++k) require_shape(w[k], g, "transport_apply");
  const std::size_t np1 = g.np1(), np2 = g.np2(), np = np1 * np2;

  std::array<std::array<Field4, 2>, 4> d;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 2; ++j) d[k][j] = spectral::x_derivative(w[k], g, j);

  const double ea = params.epsilon * params.alpha;
  WignerField out = zero_wigner(g);
  for (std::size_t x = 0; x < g.nx1() * g.nx2(); ++x)
    for (std::size_t a = 0; a < np1; ++a)
      for (std::size_t b = 0; b < np2; ++b) {
        const std::size_t q = x * np + a * np2 + b;
        const double p1 = g.p1()[a], p2 = g.p2()[b];
        for (int k = 0; k < 4; ++k) out[k][q] = -(p1 * d[k][0][q] + p2 * d[k][1][q]);
        out[0][q] -= ea * (d[1][1][q] - d[2][0][q]);
        out[1][q] -= ea * d[0][1][q];
        out[2][q] += ea * d[0][0][q];
        const double w1 = w[1][q], w2 = w[2][q], w3 = w[3][q];
        const double s = 2.0 * params.alpha;
        out[1][q] += s * (-p1 * w3);
        out[2][q] += s * (-p2 * w3);
        out[3][q] += s * (p1 * w1 + p2 * w2);
      }
  if (params.has_force()) {
    const ThetaOperator theta(g, *params.potential, params.epsilon, ThetaParity::odd);
    for (int k = 0; k < 4; ++k) out[k] += theta.apply(w[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substeps. Each acts on arrays whose innermost Np1 * Np2 entries are the
// momentum grid, so they serve physical fields and x-spectra alike.

namespace substep {

/// Rotation of the spin part about p_perp / |p| by 2 alpha |p| h (exact precession flow).
template <class T>
void precession(T* w1, T* w2, T* w3, std::size_t rows, const Grid& g, double alpha, double h) {
  const std::size_t np1 = g.np1(), np2 = g.np2(), np = np1 * np2;
  std::vector<std::array<double, 9>> rot(np);
  for (std::size_t a = 0; a < np1; ++a)
    for (std::size_t b = 0; b < np2; ++b) {
      const double p1 = g.p1()[a], p2 = g.p2()[b];
      const double pn = std::hypot(p1, p2);
      auto& r = rot[a * np2 + b];
      if (pn == 0.0) {
        r = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        continue;
      }
      // Rodrigues formula with unit axis (p2, -p1, 0) / |p|.
      const double k1 = p2 / pn, k2 = -p1 / pn;
      const double th = 2.0 * alpha * pn * h;
      const double c = std::cos(th), s = std::sin(th), v = 1.0 - c;
      r = {c + k1 * k1 * v, k1 * k2 * v, k2 * s,
           k1 * k2 * v, c + k2 * k2 * v, -k1 * s,
           -k2 * s, k1 * s, c};
    }
  for (std::size_t x = 0; x < rows; ++x)
    for (std::size_t q = 0; q < np; ++q) {
      const std::size_t i = x * np + q;
      const auto& r = rot[q];
      const T a = w1[i], b = w2[i], c = w3[i];
      w1[i] = r[0] * a + r[1] * b + r[2] * c;
      w2[i] = r[3] * a + r[4] * b + r[5] * c;
      w3[i] = r[6] * a + r[7] * b + r[8] * c;
    }
}

/// w <- M n + (w - M n) exp(-h / tau), n = sum_p w dp frozen over the substep.
/// M is normalized to unit discrete mass, so all four densities are conserved.
template <class T>
void bgk_relax(std::array<T*, 4> w, std::size_t rows, const Grid& g, const std::vector<double>& m,
               double tau, double h) {
  const std::size_t np = g.np1() * g.np2();
  const double decay = std::exp(-h / tau);
  const double dp = g.cell_area_p();
  for (int k = 0; k < 4; ++k)
    for (std::size_t x = 0; x < rows; ++x) {
      T* row = w[k] + x * np;
      T n{};
      for (std::size_t q = 0; q < np; ++q) n += row[q];
      n *= dp;
      for (std::size_t q = 0; q < np; ++q) {
        const T eq = m[q] * n;
        row[q] = eq + (row[q] - eq) * decay;
      }
    }
}

}  // namespace substep

/// Wigner field held as its x-spectrum: four arrays of shape (Nx1, Nx2/2+1, Np1, Np2).
class SpectralWigner {
 public:
  explicit SpectralWigner(const Grid& g)
      : grid_(g), shape_(g.fft_shape4()), hshape_(fft::half_shape(shape_, {0, 1})) {
    for (auto& c : comp_) c.assign(fft::element_count(hshape_), cplx{});
  }

  SpectralWigner(const Grid& g, const WignerField& w) : SpectralWigner(g) { assign(w); }

  void assign(const WignerField& w) {
    for (int k = 0; k < 4; ++k) {
      require_shape(w[k], grid_, "SpectralWigner");
      fft::forward_r2c(w[k].span(), comp_[k], shape_, {0, 1});
    }
  }

  Field4 physical(int k) const {
    auto tmp = comp_[k];
    Field4 out(grid_.shape4());
    fft::inverse_c2r(tmp, out.span(), shape_, {0, 1});
    return out;
  }

  WignerField physical() const {
    WignerField w;
    for (int k = 0; k < 4; ++k) w[k] = physical(k);
    return w;
  }

  /// Densities n_k(x) from the momentum sums of the spectra.
  SpinDensityField densities() const {
    const std::size_t np = grid_.np1() * grid_.np2();
    const std::size_t rows = bins();
    const fft::Shape s2 = grid_.fft_shape2();
    SpinDensityField n;
    for (int k = 0; k < 4; ++k) {
      ComplexVector nk(rows);
      for (std::size_t x = 0; x < rows; ++x) {
        cplx s{};
        const cplx* row = comp_[k].data() + x * np;
        for (std::size_t q = 0; q < np; ++q) s += row[q];
        nk[x] = s * grid_.cell_area_p();
      }
      n[k] = Field2(grid_.shape2());
      fft::inverse_c2r(nk, n[k].span(), s2, {0, 1});
    }
    return n;
  }

  /// Integral of w0 over phase space, read from the zero mode.
  double mass() const {
    const std::size_t np = grid_.np1() * grid_.np2();
    double s = 0.0;
    for (std::size_t q = 0; q < np; ++q) s += comp_[0][q].real();
    return s * grid_.cell_area_p() * grid_.cell_area_x();
  }

  bool finite() const {
    for (const auto& c : comp_)
      for (const auto& v : c)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  ComplexVector& operator[](int k) { return comp_[k]; }
  const ComplexVector& operator[](int k) const { return comp_[k]; }
  /// Number of x bins (Nx1 * (Nx2/2+1)).
  std::size_t bins() const { return hshape_[0] * hshape_[1]; }
  const fft::Shape& shape() const { return shape_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  fft::Shape shape_, hshape_;
  std::array<ComplexVector, 4> comp_;
};

namespace substep {

namespace detail {

// Per-axis free-streaming factors; Nyquist bins average the +-k_N aliases.
inline ComplexVector streaming_factors(const std::vector<double>& k, std::size_t bins,
                                           const std::vector<double>& p, double h) {
  ComplexVector f(bins * p.size());
  for (std::size_t m = 0; m < bins; ++m)
    for (std::size_t a = 0; a < p.size(); ++a) {
      const double ph = k[m] * p[a] * h;
      f[m * p.size() + a] = fft::is_nyquist(m, k.size()) ? cplx(std::cos(ph), 0.0)
                                                          : std::polar(1.0, -ph);
    }
  return f;
}

}  // namespace detail

/// Exact free streaming w(x, p) <- w(x - p h, p).
inline void free_transport(SpectralWigner& s, double h) {
  const Grid& g = s.grid();
  const std::size_t n1 = g.nx1(), n2h = g.nx2() / 2 + 1, np1 = g.np1(), np2 = g.np2();
  const auto f1 = detail::streaming_factors(g.k1(), n1, g.p1(), h);
  const auto f2 = detail::streaming_factors(g.k2(), n2h, g.p2(), h);
  for (int k = 0; k < 4; ++k) {
    cplx* d = s[k].data();
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2h; ++j)
        for (std::size_t a = 0; a < np1; ++a) {
          const cplx e = f1[i * np1 + a];
          const cplx* e2 = f2.data() + j * np2;
          cplx* row = d + ((i * n2h + j) * np1 + a) * np2;
          for (std::size_t b = 0; b < np2; ++b) row[b] *= e * e2[b];
        }
  }
}

/// The eps*alpha coupling terms, one explicit midpoint step of length h.
inline void rashba_coupling(SpectralWigner& s, double eps_alpha, double h) {
  if (eps_alpha == 0.0) return;
  const Grid& g = s.grid();
  const std::size_t n1 = g.nx1(), n2h = g.nx2() / 2 + 1, np = g.np1() * g.np2();
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2h; ++j) {
      const cplx d1 = spectral::derivative_symbol(g.k1(), i);
      const cplx d2 = spectral::derivative_symbol(g.k2(), j);
      if (d1 == 0.0 && d2 == 0.0) continue;
      const std::size_t base = (i * n2h + j) * np;
      for (std::size_t q = 0; q < np; ++q) {
        const std::size_t r = base + q;
        const cplx w0 = s[0][r], w1 = s[1][r], w2 = s[2][r];
        auto rhs = [&](cplx a0, cplx a1, cplx a2) {
          return std::array<cplx, 3>{-eps_alpha * (d2 * a1 - d1 * a2), -eps_alpha * d2 * a0,
                                     eps_alpha * d1 * a0};
        };
        const auto k1 = rhs(w0, w1, w2);
        const auto k2 = rhs(w0 + 0.5 * h * k1[0], w1 + 0.5 * h * k1[1], w2 + 0.5 * h * k1[2]);
        s[0][r] = w0 + h * k2[0];
        s[1][r] = w1 + h * k2[1];
        s[2][r] = w2 + h * k2[2];
      }
    }
}

inline void precession(SpectralWigner& s, double alpha, double h) {
  if (alpha == 0.0) return;
  precession(s[1].data(), s[2].data(), s[3].data(), s.bins(), s.grid(), alpha, h);
}

inline void bgk_relax(SpectralWigner& s, const std::vector<double>& m, double tau, double h) {
  bgk_relax<cplx>({s[0].data(), s[1].data(), s[2].data(), s[3].data()}, s.bins(), s.grid(), m,
                  tau, h);
}

/// Exact force flow exp(h Theta[V]) applied in physical space.
inline void force(SpectralWigner& s, const ThetaOperator& theta, double h) {
  for (int k = 0; k < 4; ++k) {
    Field4 w = s.physical(k);
    theta.apply_exponential(w, h);
    fft::forward_r2c(w.span(), s[k], s.shape(), {0, 1});
  }
}

// Physical-space conveniences for testing the substeps in isolation.

inline void free_transport(WignerField& w, const Grid& g, double h) {
  SpectralWigner s(g, w);
  free_transport(s, h);
  w = s.physical();
}

inline void precession(WignerField& w, const Grid& g, double alpha, double h) {
  precession(w[1].data(), w[2].data(), w[3].data(), g.nx1() * g.nx2(), g, alpha, h);
}

inline void bgk_relax(WignerField& w, const Grid& g, double tau, double h) {
  bgk_relax<double>({w[0].data(), w[1].data(), w[2].data(), w[3].data()}, g.nx1() * g.nx2(), g,
                    discrete_maxwellian(g), tau, h);
}

inline void rashba_coupling(WignerField& w, const Grid& g, double eps_alpha, double h) {
  SpectralWigner s(g, w);
  rashba_coupling(s, eps_alpha, h);
  w = s.physical();
}

}  // namespace substep

/// Largest stable step of the splitting: C * min(dx) / pmax.
inline double kinetic_stable_dt(const Grid& g, double cfl = 0.5) {
  return cfl * std::min(g.spec().dx1(), g.spec().dx2()) / g.spec().pmax;
}

/// Strang splitting A(h/2) B(h/2) C(h/2) D(h) C(h/2) B(h/2) A(h/2) for the
/// scaled Wigner-BGK system, C = R(h/2) K(h) R(h/2) with R the precession and
/// K the eps*alpha coupling.
class KineticSolver {
 public:
  KineticSolver(const Grid& g, ModelParams params, double cfl = 0.5)
      : grid_(g), params_(std::move(params)), cfl_(cfl), state_(g), m_(discrete_maxwellian(g)) {
    params_.validate();
    if (params_.potential) require_shape(params_.potential->values(), g, "kinetic potential");
    if (params_.has_force()) {
      theta_.emplace(g, *params_.potential, params_.epsilon, ThetaParity::odd);
    }
  }

  void set_state(const WignerField& w, double t = 0.0) {
    state_.assign(w);
    t_ = t;
  }

  void set_state(const SpinDensityField& n, double t = 0.0) {
    set_state(equilibrium_semiclassical(n, grid_), t);
  }

  double max_stable_dt() const { return kinetic_stable_dt(grid_, cfl_); }

  void check_dt(double h) const {
    if (!(h > 0.0)) throw StabilityError("kinetic time step must be positive");
    const double limit = max_stable_dt();
    if (h > limit * (1.0 + 1e-12)) {
      throw StabilityError("kinetic time step " + std::to_string(h) +
                           " exceeds the advection bound C*dx/pmax = " + std::to_string(limit));
    }
  }

  void step(double h) {
    check_dt(h);
    substep::free_transport(state_, 0.5 * h);
    if (theta_) substep::force(state_, *theta_, 0.5 * h);
    spin_orbit(0.5 * h);
    if (!params_.collisionless) substep::bgk_relax(state_, m_, params_.tau, h);
    spin_orbit(0.5 * h);
    if (theta_) substep::force(state_, *theta_, 0.5 * h);
    substep::free_transport(state_, 0.5 * h);
    t_ += h;
    if (!state_.finite()) {
      throw NumericalError("kinetic solver produced non-finite values at t = " + std::to_string(t_));
    }
  }

  /// Uniform steps of at most dt_max landing exactly on t_end; returns the step count.
  std::size_t advance_to(double t_end, double dt_max) {
    const double span = t_end - t_;
    if (span <= 0.0) return 0;
    const auto n = static_cast<std::size_t>(std::ceil(span / dt_max - 1e-9));
    const double h = span / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) step(h);
    t_ = t_end;
    return n;
  }

  double time() const { return t_; }
  double mass() const { return state_.mass(); }
  SpinDensityField densities() const { return state_.densities(); }
  WignerField wigner() const { return state_.physical(); }
  KineticState state() const { return {wigner(), t_}; }
  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }

 private:
  void spin_orbit(double h) {
    substep::precession(state_, params_.alpha, 0.5 * h);
    substep::rashba_coupling(state_, params_.epsilon * params_.alpha, h);
    substep::precession(state_, params_.alpha, 0.5 * h);
  }

  Grid grid_;
  ModelParams params_;
  double cfl_;
  SpectralWigner state_;
  std::vector<double> m_;
  std::optional<ThetaOperator> theta_;
  double t_ = 0.0;
};

inline KineticState kinetic_step(const KineticState& s, const ModelParams& params, const Grid& g,
                                 double dt, double cfl = 0.5) {
  KineticSolver solver(g, params, cfl);
  solver.set_state(s.w, s.t);
  solver.step(dt);
  return solver.state();
}

struct DensitySnapshot {
  double t = 0.0;
  SpinDensityField n;
};

/// Per-step scalar diagnostics shared by both solvers.
struct StepDiagnostics {
  std::size_t step = 0;
  double t = 0.0;
  double mass = 0.0;
  double spin_total = 0.0;
  double max_spin_ratio = 0.0;
};

inline double spin_total(const SpinDensityField& n, const Grid& g) {
  const double s1 = x_integral(n[1], g), s2 = x_integral(n[2], g), s3 = x_integral(n[3], g);
  return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
}

struct RunOptions {
  double dt = 0.01;
  /// Snapshot spacing in time; <= 0 keeps only the initial and final states.
  double output_interval = 0.0;
  double cfl = 0.5;
  /// Progress lines "step t mass max|n|/n0" are written here when set.
  std::ostream* progress = nullptr;
  std::size_t progress_every = 10;
  std::function<void(const StepDiagnostics&)> on_step;
  /// Called for every stored snapshot as soon as it is taken.
  std::function<void(const DensitySnapshot&)> on_snapshot;
};

namespace detail {

inline std::size_t snapshot_stride(double interval, double h) {
  if (interval <= 0.0) return 0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(interval / h)));
}

}  // namespace detail

/// Integrates the kinetic model to t_end, returning density snapshots.
inline std::vector<DensitySnapshot> run_kinetic(const WignerField& initial, const ModelParams& params,
                                                const Grid& g, double t_end, const RunOptions& opt) {
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  KineticSolver solver(g, params, opt.cfl);
  solver.set_state(initial);
  const auto nsteps = static_cast<std::size_t>(std::ceil(t_end / opt.dt - 1e-9));
  const double h = t_end / static_cast<double>(nsteps);
  solver.check_dt(h);
  const std::size_t stride = detail::snapshot_stride(opt.output_interval, h);

  std::vector<DensitySnapshot> out;
  auto record = [&](std::size_t step) {
    const auto n = solver.densities();
    StepDiagnostics d{step, solver.time(), solver.mass(), spin_total(n, g), max_spin_ratio(n)};
    if (opt.on_step) opt.on_step(d);
    if (opt.progress && (step % std::max<std::size_t>(1, opt.progress_every) == 0 || step == nsteps)) {
      *opt.progress << "step " << step << " t " << d.t << " mass " << d.mass << " max|n|/n0 "
                    << d.max_spin_ratio << '\n';
    }
    return n;
  };
  out.push_back({0.0, record(0)});
  if (opt.on_snapshot) opt.on_snapshot(out.back());
  for (std::size_t i = 1; i <= nsteps; ++i) {
    solver.step(h);
    const bool snap = i == nsteps || (stride > 0 && i % stride == 0);
    auto n = (snap || opt.on_step || opt.progress) ? record(i) : SpinDensityField{};
    if (snap) {
      out.push_back({i == nsteps ? t_end : solver.time(), std::move(n)});
      if (opt.on_snapshot) opt.on_snapshot(out.back());
    }
  }
  return out;
}

inline std::vector<DensitySnapshot> run_kinetic(const SpinDensityField& initial,
                                                const ModelParams& params, const Grid& g,
                                                double t_end, const RunOptions& opt) {
  return run_kinetic(equilibrium_semiclassical(initial, g), params, g, t_end, opt);
}

}  // namespace rashba
