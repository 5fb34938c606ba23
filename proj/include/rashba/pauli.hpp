#pragma once

// Algebra of 2x2 complex matrices written in Pauli components,
//
//   a = a0 * sigma0 + a1 * sigma1 + a2 * sigma2 + a3 * sigma3,
//
// plus the closed-form exponential and logarithm used to move between
// densities and Lagrange multipliers.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace rashba {

using complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<complex, 3>;
using Matrix2 = std::array<std::array<complex, 2>, 2>;

struct PauliCoefficients {
  complex c0{};
  CVec3 cvec{};

  PauliCoefficients() = default;
  PauliCoefficients(complex scalar, CVec3 vec) : c0(scalar), cvec(vec) {}

  static PauliCoefficients real(double scalar, const Vec3& vec) {
    return {scalar, {vec[0], vec[1], vec[2]}};
  }

  /// True iff the matrix is Hermitian, i.e. all four components are real.
  bool is_hermitian() const {
    return c0.imag() == 0.0 && cvec[0].imag() == 0.0 && cvec[1].imag() == 0.0 &&
           cvec[2].imag() == 0.0;
  }

  friend bool operator==(const PauliCoefficients&, const PauliCoefficients&) = default;
};

inline PauliCoefficients operator+(const PauliCoefficients& a, const PauliCoefficients& b) {
  return {a.c0 + b.c0, {a.cvec[0] + b.cvec[0], a.cvec[1] + b.cvec[1], a.cvec[2] + b.cvec[2]}};
}

inline PauliCoefficients operator-(const PauliCoefficients& a, const PauliCoefficients& b) {
  return {a.c0 - b.c0, {a.cvec[0] - b.cvec[0], a.cvec[1] - b.cvec[1], a.cvec[2] - b.cvec[2]}};
}

inline PauliCoefficients operator*(complex s, const PauliCoefficients& a) {
  return {s * a.c0, {s * a.cvec[0], s * a.cvec[1], s * a.cvec[2]}};
}

/// Basis element sigma_k, k = 0..3.
inline PauliCoefficients sigma(int k) {
  if (k < 0 || k > 3) {
    throw std::out_of_range("sigma index must be in 0..3");
  }
  PauliCoefficients s;
  if (k == 0) {
    s.c0 = 1.0;
  } else {
    s.cvec[k - 1] = 1.0;
  }
  return s;
}

/// A local density n0 sigma0 + n . sigma. Physical states satisfy |n| <= n0.
struct PhysicalDensity {
  double n0 = 0.0;
  Vec3 nvec{};

  double spin_norm() const {
    return std::sqrt(nvec[0] * nvec[0] + nvec[1] * nvec[1] + nvec[2] * nvec[2]);
  }
  bool is_physical() const { return n0 >= 0.0 && spin_norm() <= n0; }
  bool is_mixed() const { return n0 > 0.0 && spin_norm() < n0; }
  bool is_pure(double tol = 1e-12) const {
    return n0 >= 0.0 && std::abs(spin_norm() - n0) <= tol * std::max(1.0, n0);
  }
  PauliCoefficients to_pauli() const { return PauliCoefficients::real(n0, nvec); }
};

inline complex dot(const CVec3& a, const CVec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline Matrix2 to_matrix(const PauliCoefficients& a) {
  const complex i{0.0, 1.0};
  Matrix2 m;
  m[0][0] = a.c0 + a.cvec[2];
  m[0][1] = a.cvec[0] - i * a.cvec[1];
  m[1][0] = a.cvec[0] + i * a.cvec[1];
  m[1][1] = a.c0 - a.cvec[2];
  return m;
}

inline PauliCoefficients from_matrix(const Matrix2& m) {
  const complex i{0.0, 1.0};
  PauliCoefficients a;
  a.c0 = 0.5 * (m[0][0] + m[1][1]);
  a.cvec[0] = 0.5 * (m[0][1] + m[1][0]);
  a.cvec[1] = 0.5 * i * (m[0][1] - m[1][0]);
  a.cvec[2] = 0.5 * (m[0][0] - m[1][1]);
  return a;
}

/// ab = (a0 b0 + a.b) sigma0 + (a0 b + b0 a + i a x b) . sigma
inline PauliCoefficients pauli_product(const PauliCoefficients& a, const PauliCoefficients& b) {
  const complex i{0.0, 1.0};
  const CVec3 axb = cross(a.cvec, b.cvec);
  PauliCoefficients r;
  r.c0 = a.c0 * b.c0 + dot(a.cvec, b.cvec);
  for (int k = 0; k < 3; ++k) {
    r.cvec[k] = a.c0 * b.cvec[k] + b.c0 * a.cvec[k] + i * axb[k];
  }
  return r;
}

/// ab - ba, which works out to (0, 2i a x b).
inline PauliCoefficients pauli_commutator(const PauliCoefficients& a, const PauliCoefficients& b) {
  return pauli_product(a, b) - pauli_product(b, a);
}

inline complex pauli_trace(const PauliCoefficients& a) { return 2.0 * a.c0; }

namespace detail {

// sinh(r)/r; below the threshold the three-term Taylor series avoids 0/0.
inline double sinhc(double r) {
  if (r < 1e-6) {
    const double r2 = r * r;
    return 1.0 + r2 / 6.0 + r2 * r2 / 120.0;
  }
  return std::sinh(r) / r;
}

// atanh(q)/q for 0 <= q < 1.
inline double atanhc(double q) {
  if (q < 1e-6) {
    const double q2 = q * q;
    return 1.0 + q2 / 3.0 + q2 * q2 / 5.0;
  }
  return std::atanh(q) / q;
}

}  // namespace detail

/// exp(a0 sigma0 + a . sigma) = e^{a0} (cosh r sigma0 + sinh(r)/r a . sigma), r = |a|.
inline PauliCoefficients pauli_exp(const PauliCoefficients& a) {
  if (!a.is_hermitian()) {
    throw std::invalid_argument("pauli_exp: argument must be Hermitian (real Pauli components)");
  }
  const double a0 = a.c0.real();
  const Vec3 v{a.cvec[0].real(), a.cvec[1].real(), a.cvec[2].real()};
  const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const double scale = std::exp(a0);
  const double s = scale * detail::sinhc(r);
  return PauliCoefficients::real(scale * std::cosh(r), {s * v[0], s * v[1], s * v[2]});
}

/// Inverse of pauli_exp on mixed states: eigenvalues n0 +- |n| must both be positive.
inline PauliCoefficients pauli_log(const PhysicalDensity& n) {
  if (!(n.n0 > 0.0)) {
    throw std::domain_error("pauli_log: n0 must be positive, got " + std::to_string(n.n0));
  }
  const double r = n.spin_norm();
  if (!(r < n.n0)) {
    throw std::domain_error("pauli_log: state is not strictly mixed (|n| >= n0)");
  }
  const double q = r / n.n0;
  const double a0 = std::log(n.n0) + 0.5 * std::log1p(-q * q);
  const double s = detail::atanhc(q) / n.n0;
  return PauliCoefficients::real(a0, {s * n.nvec[0], s * n.nvec[1], s * n.nvec[2]});
}

}  // namespace rashba
