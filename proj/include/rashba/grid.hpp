#pragma once

// Discretization substrate shared by the kinetic and drift-diffusion solvers:
// a periodic 2D position grid, a truncated uniform 2D momentum grid, the
// field containers living on them, and momentum moments.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rashba/array.hpp"
#include "rashba/fft.hpp"

namespace rashba {

struct GridSpec {
  double Lx1 = 2.0 * std::numbers::pi;
  double Lx2 = 2.0 * std::numbers::pi;
  int Nx1 = 32;
  int Nx2 = 32;
  double pmax = 6.0;
  int Np1 = 48;
  int Np2 = 48;
  double dt = 0.01;

  double dx1() const { return Lx1 / Nx1; }
  double dx2() const { return Lx2 / Nx2; }
  double dp1() const { return 2.0 * pmax / Np1; }
  double dp2() const { return 2.0 * pmax / Np2; }

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const {
    auto resolution = [](const char* name, int n) {
      if (n < 8 || n % 2 != 0) {
        throw std::invalid_argument(std::string(name) + " must be even and >= 8, got " +
                                    std::to_string(n));
      }
    };
    resolution("Nx1", Nx1);
    resolution("Nx2", Nx2);
    resolution("Np1", Np1);
    resolution("Np2", Np2);
    if (!(Lx1 > 0.0) || !(Lx2 > 0.0)) {
      throw std::invalid_argument("domain lengths Lx1, Lx2 must be positive");
    }
    if (!(pmax >= 5.0)) {
      throw std::invalid_argument("pmax must be >= 5 (thermal units)");
    }
    if (!(dt > 0.0)) {
      throw std::invalid_argument("dt must be positive");
    }
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Coordinates and wavenumbers derived from a validated GridSpec.
///
/// Positions x_i = i * dx on [0, L); momenta sit at cell midpoints of
/// [-pmax, pmax], so the momentum grid is symmetric and excludes p = 0 for even Np.
class Grid {
 public:
  explicit Grid(const GridSpec& spec) : spec_(spec) {
    spec_.validate();
    x1_ = positions(spec_.Nx1, spec_.dx1());
    x2_ = positions(spec_.Nx2, spec_.dx2());
    p1_ = momenta(spec_.Np1, spec_.dp1(), spec_.pmax);
    p2_ = momenta(spec_.Np2, spec_.dp2(), spec_.pmax);
    k1_ = wavenumbers(spec_.Nx1, spec_.Lx1);
    k2_ = wavenumbers(spec_.Nx2, spec_.Lx2);
    eta1_ = wavenumbers(spec_.Np1, 2.0 * spec_.pmax);
    eta2_ = wavenumbers(spec_.Np2, 2.0 * spec_.pmax);
  }

  const GridSpec& spec() const { return spec_; }
  std::size_t nx1() const { return x1_.size(); }
  std::size_t nx2() const { return x2_.size(); }
  std::size_t np1() const { return p1_.size(); }
  std::size_t np2() const { return p2_.size(); }

  const std::vector<double>& x1() const { return x1_; }
  const std::vector<double>& x2() const { return x2_; }
  const std::vector<double>& p1() const { return p1_; }
  const std::vector<double>& p2() const { return p2_; }
  /// Angular wavenumbers 2 pi m / L in FFT bin order; the Nyquist bin carries +pi/dx.
  const std::vector<double>& k1() const { return k1_; }
  const std::vector<double>& k2() const { return k2_; }
  /// Variables dual to p, in FFT bin order.
  const std::vector<double>& eta1() const { return eta1_; }
  const std::vector<double>& eta2() const { return eta2_; }

  double cell_area_x() const { return spec_.dx1() * spec_.dx2(); }
  double cell_area_p() const { return spec_.dp1() * spec_.dp2(); }

  Field2::Shape shape2() const { return {nx1(), nx2()}; }
  Field4::Shape shape4() const { return {nx1(), nx2(), np1(), np2()}; }
  fft::Shape fft_shape2() const { return {nx1(), nx2()}; }
  fft::Shape fft_shape4() const { return {nx1(), nx2(), np1(), np2()}; }

  Field2 zeros2() const { return Field2(shape2()); }
  Field4 zeros4() const { return Field4(shape4()); }

  template <class F>
  Field2 sample2(F&& f) const {
    Field2 out(shape2());
    for (std::size_t i = 0; i < nx1(); ++i)
      for (std::size_t j = 0; j < nx2(); ++j) out(i, j) = f(x1_[i], x2_[j]);
    return out;
  }

  template <class F>
  Field4 sample4(F&& f) const {
    Field4 out(shape4());
    std::size_t flat = 0;
    for (std::size_t i = 0; i < nx1(); ++i)
      for (std::size_t j = 0; j < nx2(); ++j)
        for (std::size_t a = 0; a < np1(); ++a)
          for (std::size_t b = 0; b < np2(); ++b) out[flat++] = f(x1_[i], x2_[j], p1_[a], p2_[b]);
    return out;
  }

 private:
  static std::vector<double> positions(int n, double h) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = i * h;
    return x;
  }
  static std::vector<double> momenta(int n, double h, double pmax) {
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) p[i] = -pmax + (i + 0.5) * h;
    return p;
  }
  static std::vector<double> wavenumbers(int n, double length) {
    std::vector<double> k(n);
    for (int m = 0; m < n; ++m) {
      const long s = fft::is_nyquist(m, n) ? n / 2 : fft::signed_index(m, n);
      k[m] = 2.0 * std::numbers::pi * static_cast<double>(s) / length;
    }
    return k;
  }

  GridSpec spec_;
  std::vector<double> x1_, x2_, p1_, p2_, k1_, k2_, eta1_, eta2_;
};

/// Four Pauli components (charge, spin 1..3) of a field, tagged for type safety.
template <class Array, class Tag>
struct PauliField {
  std::array<Array, 4> comp;

  Array& operator[](std::size_t k) { return comp[k]; }
  const Array& operator[](std::size_t k) const { return comp[k]; }

  PauliField& operator+=(const PauliField& o) {
    for (int k = 0; k < 4; ++k) comp[k] += o.comp[k];
    return *this;
  }
  PauliField& operator-=(const PauliField& o) {
    for (int k = 0; k < 4; ++k) comp[k] -= o.comp[k];
    return *this;
  }
  PauliField& operator*=(double s) {
    for (auto& c : comp) c *= s;
    return *this;
  }
  PauliField& axpy(double s, const PauliField& o) {
    for (int k = 0; k < 4; ++k) comp[k].axpy(s, o.comp[k]);
    return *this;
  }
  friend PauliField operator+(PauliField a, const PauliField& b) { return a += b; }
  friend PauliField operator-(PauliField a, const PauliField& b) { return a -= b; }
  friend PauliField operator*(double s, PauliField a) { return a *= s; }
  friend bool operator==(const PauliField&, const PauliField&) = default;

  bool finite() const {
    for (const auto& c : comp)
      if (!all_finite(c)) return false;
    return true;
  }
};

struct DensityTag {};
struct MultiplierTag {};
struct WignerTag {};

/// Macroscopic densities (n0, n1, n2, n3) on the position grid.
using SpinDensityField = PauliField<Field2, DensityTag>;
/// Lagrange multipliers (a0, a1, a2, a3) on the position grid.
using MultiplierField = PauliField<Field2, MultiplierTag>;
/// Pauli components (w0, w1, w2, w3) of a Wigner function on the phase-space grid.
using WignerField = PauliField<Field4, WignerTag>;

inline SpinDensityField zero_density(const Grid& g) {
  return {{g.zeros2(), g.zeros2(), g.zeros2(), g.zeros2()}};
}
inline WignerField zero_wigner(const Grid& g) {
  return {{g.zeros4(), g.zeros4(), g.zeros4(), g.zeros4()}};
}

inline void require_shape(const Field4& f, const Grid& g, const char* what) {
  if (f.shape() != g.shape4()) {
    throw std::invalid_argument(std::string(what) + ": phase-space field shape does not match grid");
  }
}
inline void require_shape(const Field2& f, const Grid& g, const char* what) {
  if (f.shape() != g.shape2()) {
    throw std::invalid_argument(std::string(what) + ": position field shape does not match grid");
  }
}

/// <f>(x) = sum_p f(x, p) dp1 dp2 (midpoint rule).
inline Field2 p_integral(const Field4& f, const Grid& g) {
  require_shape(f, g, "moments");
  Field2 out(g.shape2());
  const std::size_t np = g.np1() * g.np2();
  const double w = g.cell_area_p();
  for (std::size_t x = 0; x < out.size(); ++x) {
    const double* row = f.data() + x * np;
    double s = 0.0;
    for (std::size_t q = 0; q < np; ++q) s += row[q];
    out[x] = s * w;
  }
  return out;
}

/// <p_axis f>(x).
inline Field2 p_weighted_integral(const Field4& f, const Grid& g, int axis) {
  if (axis != 0 && axis != 1) {
    throw std::invalid_argument("momentum_moment: axis must be 0 (p1) or 1 (p2)");
  }
  require_shape(f, g, "momentum_moment");
  Field2 out(g.shape2());
  const std::size_t n1 = g.np1(), n2 = g.np2();
  const double w = g.cell_area_p();
  for (std::size_t x = 0; x < out.size(); ++x) {
    const double* row = f.data() + x * n1 * n2;
    double s = 0.0;
    for (std::size_t a = 0; a < n1; ++a)
      for (std::size_t b = 0; b < n2; ++b)
        s += (axis == 0 ? g.p1()[a] : g.p2()[b]) * row[a * n2 + b];
    out[x] = s * w;
  }
  return out;
}

inline SpinDensityField moments(const WignerField& w, const Grid& g) {
  SpinDensityField n;
  for (int k = 0; k < 4; ++k) n[k] = p_integral(w[k], g);
  return n;
}

inline SpinDensityField momentum_moment(const WignerField& w, const Grid& g, int axis) {
  SpinDensityField n;
  for (int k = 0; k < 4; ++k) n[k] = p_weighted_integral(w[k], g, axis);
  return n;
}

/// Integral over the position domain.
inline double x_integral(const Field2& f, const Grid& g) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * g.cell_area_x();
}

/// L2 norm with position quadrature weights.
inline double l2_norm(const Field2& f, const Grid& g) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s * g.cell_area_x());
}

inline double l2_norm(const SpinDensityField& n, const Grid& g) {
  double s = 0.0;
  for (const auto& c : n.comp)
    for (double v : c) s += v * v;
  return std::sqrt(s * g.cell_area_x());
}

inline double l2_distance(const SpinDensityField& a, const SpinDensityField& b, const Grid& g) {
  return l2_norm(a - b, g);
}

/// Maxwellian (1/2pi) exp(-|p|^2/2) on the momentum grid, shape (Np1, Np2).
inline std::vector<double> maxwellian(const Grid& g) {
  std::vector<double> m(g.np1() * g.np2());
  for (std::size_t a = 0; a < g.np1(); ++a)
    for (std::size_t b = 0; b < g.np2(); ++b) {
      const double p2 = g.p1()[a] * g.p1()[a] + g.p2()[b] * g.p2()[b];
      m[a * g.np2() + b] = std::exp(-0.5 * p2) / (2.0 * std::numbers::pi);
    }
  return m;
}

/// Maxwellian rescaled so that its midpoint-rule integral is exactly one.
/// Used by the BGK relaxation so that relaxation conserves densities to rounding.
inline std::vector<double> discrete_maxwellian(const Grid& g) {
  auto m = maxwellian(g);
  double s = 0.0;
  for (double v : m) s += v;
  s *= g.cell_area_p();
  for (auto& v : m) v /= s;
  return m;
}

/// max over x of |n|/n0 where n0 > 0 (physicality monitor; values > 1 flag violations).
inline double max_spin_ratio(const SpinDensityField& n) {
  double r = 0.0;
  for (std::size_t i = 0; i < n[0].size(); ++i) {
    const double s = std::sqrt(n[1][i] * n[1][i] + n[2][i] * n[2][i] + n[3][i] * n[3][i]);
    if (n[0][i] > 0.0) {
      r = std::max(r, s / n[0][i]);
    } else if (s > 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return r;
}

}  // namespace rashba
