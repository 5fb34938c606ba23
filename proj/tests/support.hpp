#pragma once

// Shared fixtures for the unit tests.

#include <cmath>
#include <numbers>

#include "rashba/grid.hpp"

namespace rashba::test {

constexpr double pi = std::numbers::pi;

inline GridSpec small_spec(int nx = 16, int np = 32, double pmax = 6.0) {
  GridSpec s;
  s.Nx1 = s.Nx2 = nx;
  s.Np1 = s.Np2 = np;
  s.pmax = pmax;
  return s;
}

inline double gauss(double p1, double p2) { return std::exp(-0.5 * (p1 * p1 + p2 * p2)) / (2 * pi); }

/// Smooth, strictly mixed density on the default 2 pi box.
inline SpinDensityField smooth_density(const Grid& g) {
  SpinDensityField n;
  n[0] = g.sample2([](double x1, double x2) { return 1.0 + 0.3 * std::cos(x1) * std::sin(x2); });
  n[1] = g.sample2([](double x1, double) { return 0.2 * std::sin(x1); });
  n[2] = g.sample2([](double, double x2) { return 0.1 * std::cos(2 * x2); });
  n[3] = g.sample2([](double x1, double x2) { return 0.1 * std::sin(x1 + x2); });
  return n;
}

inline SpinDensityField uniform_density(const Grid& g, double n0, double n1, double n2, double n3) {
  SpinDensityField n;
  const double v[4] = {n0, n1, n2, n3};
  for (int k = 0; k < 4; ++k) n[k] = Field2(g.shape2(), v[k]);
  return n;
}

/// Maxwellian-weighted smooth Wigner field with drifted Gaussians.
inline WignerField smooth_wigner(const Grid& g) {
  WignerField w;
  for (int k = 0; k < 4; ++k) {
    const double d = 0.1 * k;
    w[k] = g.sample4([&](double x1, double x2, double p1, double p2) {
      const double c = (k == 0 ? 1.0 : 0.1) + 0.2 * std::cos(x1 + k * x2) + 0.1 * std::sin(2 * x2 - x1);
      return c * gauss(p1 - d, p2 + 0.5 * d);
    });
  }
  return w;
}

}  // namespace rashba::test
