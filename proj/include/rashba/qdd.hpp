#pragma once

// Semiclassical spin drift-diffusion system
//
//   d_t n0 = kappa d_j (d_j n0 + n0 d_j V)
//   d_t n  = kappa { d_j [d_j n + n d_j V - 4 alpha A_j(n)] - 2 alpha grad_perp V x n - 4 alpha^2 B(n) }
//
// with A_1(n) = (-n3, 0, n1), A_2(n) = (0, -n3, n2), B(n) = (n1, n2, 2 n3).
// The sign of the A_j flux is the one produced by applying T twice to the
// semiclassical equilibrium and taking moments.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rashba/grid.hpp"
#include "rashba/kinetic.hpp"
#include "rashba/pauli.hpp"
#include "rashba/spectral.hpp"

namespace rashba {

/// Three spin components on the position grid.
using SpinVectorField = std::array<Field2, 3>;

inline SpinVectorField spin_part(const SpinDensityField& n) { return {n[1], n[2], n[3]}; }

inline SpinVectorField coupling_A(int j, const SpinVectorField& n) {
  if (j != 0 && j != 1) throw std::invalid_argument("coupling_A: axis must be 0 or 1");
  const auto& s = n[0];
  Field2 zero(s.shape());
  Field2 minus_n3 = n[2];
  minus_n3 *= -1.0;
  if (j == 0) return {minus_n3, zero, n[0]};
  return {zero, minus_n3, n[1]};
}

inline SpinVectorField coupling_B(const SpinVectorField& n) {
  Field2 twice_n3 = n[2];
  twice_n3 *= 2.0;
  return {n[0], n[1], twice_n3};
}

struct QddState {
  SpinDensityField n;
  double t = 0.0;
};

namespace detail {

inline std::array<Field2, 2> potential_gradient(const ModelParams& params, const Grid& g) {
  if (!params.potential || params.potential->is_constant()) return {g.zeros2(), g.zeros2()};
  if (params.potential->kind() == PotentialField::Kind::quadratic) {
    throw std::invalid_argument("drift-diffusion needs a periodic potential gradient; quadratic V is not");
  }
  return {params.potential->gradient(g, 0), params.potential->gradient(g, 1)};
}

}  // namespace detail

/// Time derivative of the drift-diffusion system, including the kappa prefactor.
inline SpinDensityField qdd_rhs(const SpinDensityField& n, const ModelParams& params, const Grid& g) {
  params.validate();
  for (int k = 0; k < 4; ++k) require_shape(n[k], g, "qdd_rhs");
  const auto dv = detail::potential_gradient(params, g);
  const double alpha = params.alpha;
  const std::size_t size = n[0].size();

  SpinDensityField out;
  // Fluxes F_j = d_j n_k + n_k d_j V (- 4 alpha A_j for spin).
  for (int k = 0; k < 4; ++k) {
    auto grad = spectral::gradient(n[k], g);
    for (int j = 0; j < 2; ++j)
      for (std::size_t x = 0; x < size; ++x) grad[j][x] += n[k][x] * dv[j][x];
    if (k > 0 && alpha != 0.0) {
      for (int j = 0; j < 2; ++j) {
        const auto a = coupling_A(j, spin_part(n));
        grad[j].axpy(-4.0 * alpha, a[k - 1]);
      }
    }
    out[k] = spectral::divergence(grad[0], grad[1], g);
  }
  if (alpha != 0.0) {
    for (std::size_t x = 0; x < size; ++x) {
      // u = grad_perp V = (d2 V, -d1 V, 0)
      const double u1 = dv[1][x], u2 = -dv[0][x];
      const double n1 = n[1][x], n2 = n[2][x], n3 = n[3][x];
      out[1][x] -= 2.0 * alpha * (u2 * n3) + 4.0 * alpha * alpha * n1;
      out[2][x] -= 2.0 * alpha * (-u1 * n3) + 4.0 * alpha * alpha * n2;
      out[3][x] -= 2.0 * alpha * (u1 * n2 - u2 * n1) + 8.0 * alpha * alpha * n3;
    }
  }
  if (params.kappa != 1.0) out *= params.kappa;
  return out;
}

/// The semiclassical second moment <T T g>: the drift-diffusion right side with kappa = 1.
inline SpinDensityField bkTT_semiclassical(const SpinDensityField& n, const ModelParams& params,
                                           const Grid& g) {
  ModelParams p = params;
  p.kappa = 1.0;
  return qdd_rhs(n, p, g);
}

/// Explicit stability bound of the RK4 scheme: dt <= C min(dx)^2 / kappa, and the
/// relaxation rate 8 alpha^2 kappa inside the RK4 real-axis interval.
inline double qdd_stable_dt(const Grid& g, const ModelParams& params, double c = 0.1) {
  const double dx = std::min(g.spec().dx1(), g.spec().dx2());
  double limit = c * dx * dx / params.kappa;
  const double relax = 8.0 * params.alpha * params.alpha * params.kappa;
  if (relax > 0.0) limit = std::min(limit, 2.5 / relax);
  return limit;
}

inline void check_qdd_dt(double dt, const Grid& g, const ModelParams& params, double c) {
  if (!(dt > 0.0)) throw StabilityError("drift-diffusion time step must be positive");
  const double limit = qdd_stable_dt(g, params, c);
  if (dt > limit * (1.0 + 1e-12)) {
    throw StabilityError("drift-diffusion time step " + std::to_string(dt) +
                         " exceeds the explicit bound " + std::to_string(limit));
  }
}

/// One classical RK4 step.
inline QddState qdd_step(const QddState& s, const ModelParams& params, const Grid& g, double dt,
                         double c = 0.1) {
  check_qdd_dt(dt, g, params, c);
  const auto k1 = qdd_rhs(s.n, params, g);
  const auto k2 = qdd_rhs(s.n + (0.5 * dt) * k1, params, g);
  const auto k3 = qdd_rhs(s.n + (0.5 * dt) * k2, params, g);
  const auto k4 = qdd_rhs(s.n + dt * k3, params, g);
  QddState out{s.n, s.t + dt};
  out.n.axpy(dt / 6.0, k1).axpy(dt / 3.0, k2).axpy(dt / 3.0, k3).axpy(dt / 6.0, k4);
  if (!out.n.finite()) {
    throw NumericalError("drift-diffusion solver produced non-finite values at t = " +
                         std::to_string(out.t));
  }
  return out;
}

/// Integrates to t_end with uniform steps no larger than opt.dt.
/// opt.cfl is the diffusive stability constant C.
inline std::vector<DensitySnapshot> run_qdd(const SpinDensityField& initial, const ModelParams& params,
                                            const Grid& g, double t_end, const RunOptions& opt) {
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  const auto nsteps = static_cast<std::size_t>(std::ceil(t_end / opt.dt - 1e-9));
  const double h = t_end / static_cast<double>(nsteps);
  check_qdd_dt(h, g, params, opt.cfl);
  const std::size_t stride = detail::snapshot_stride(opt.output_interval, h);

  QddState s{initial, 0.0};
  std::vector<DensitySnapshot> out;
  auto record = [&](std::size_t step) {
    StepDiagnostics d{step, s.t, total_mass(s.n, g), spin_total(s.n, g), max_spin_ratio(s.n)};
    if (opt.on_step) opt.on_step(d);
    if (opt.progress && (step % std::max<std::size_t>(1, opt.progress_every) == 0 || step == nsteps)) {
      *opt.progress << "step " << step << " t " << d.t << " mass " << d.mass << " max|n|/n0 "
                    << d.max_spin_ratio << '\n';
    }
  };
  record(0);
  out.push_back({0.0, s.n});
  if (opt.on_snapshot) opt.on_snapshot(out.back());
  for (std::size_t i = 1; i <= nsteps; ++i) {
    s = qdd_step(s, params, g, h, opt.cfl);
    if (i == nsteps) s.t = t_end;
    record(i);
    if (i == nsteps || (stride > 0 && i % stride == 0)) {
      out.push_back({s.t, s.n});
      if (opt.on_snapshot) opt.on_snapshot(out.back());
    }
  }
  return out;
}

/// Spin part of <T g> at equilibrium, 2/eps a x n (charge part zero).
inline SpinDensityField residual_current(const MultiplierField& a, const SpinDensityField& n,
                                         double eps, const Grid& g) {
  if (!(eps > 0.0)) throw std::invalid_argument("residual_current: ε must be positive");
  for (int k = 0; k < 4; ++k) {
    require_shape(a[k], g, "residual_current");
    require_shape(n[k], g, "residual_current");
  }
  SpinDensityField out = zero_density(g);
  for (std::size_t x = 0; x < n[0].size(); ++x) {
    const Vec3 c = cross(Vec3{a[1][x], a[2][x], a[3][x]}, Vec3{n[1][x], n[2][x], n[3][x]});
    for (int k = 0; k < 3; ++k) out[k + 1][x] = 2.0 / eps * c[k];
  }
  return out;
}

/// Multipliers a of the semiclassical equilibrium exp(-|p|^2/2 + a) with density n:
/// exp(a) = n / (2 pi) pointwise. Requires strictly mixed n everywhere.
inline MultiplierField leading_order_multipliers(const SpinDensityField& n, const Grid& g) {
  MultiplierField a;
  for (int k = 0; k < 4; ++k) {
    require_shape(n[k], g, "leading_order_multipliers");
    a[k] = g.zeros2();
  }
  const double scale = 1.0 / (2.0 * std::numbers::pi);
  for (std::size_t x = 0; x < n[0].size(); ++x) {
    const PhysicalDensity d{scale * n[0][x], {scale * n[1][x], scale * n[2][x], scale * n[3][x]}};
    const auto c = pauli_log(d);
    a[0][x] = c.c0.real();
    for (int k = 0; k < 3; ++k) a[k + 1][x] = c.cvec[k].real();
  }
  return a;
}

}  // namespace rashba
