#pragma once

// Phase-space pseudo-differential operators.
//
// Theta_eps[f] and Theta+_eps[f] act on the momentum dependence of a Wigner
// component. With w(p) = sum_eta w^(eta) exp(i eta.p), the gradient i*eps/2 grad_p
// becomes -eps*eta/2, so both operators are pointwise multipliers in (x, eta):
//
//   Theta_eps[f]  <->  (1/(i eps)) [f(x - eps eta/2) - f(x + eps eta/2)]
//   Theta+_eps[f] <->              f(x - eps eta/2) + f(x + eps eta/2)
//
// Sampled potentials are shifted by exact trigonometric interpolation. Bins
// sitting on a Nyquist frequency (in k or eta) average the two aliases +-k_N,
// which keeps the operators real.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rashba/array.hpp"
#include "rashba/aligned.hpp"
#include "rashba/fft.hpp"
#include "rashba/grid.hpp"
#include "rashba/potential.hpp"
#include "rashba/spectral.hpp"

namespace rashba {

using cplx = std::complex<double>;

namespace detail {

// The one or two frequencies a bin stands for: +-k_N on a Nyquist bin.
inline std::array<double, 2> aliases(const std::vector<double>& k, std::size_t m, int& count) {
  if (fft::is_nyquist(m, k.size())) {
    count = 2;
    return {k[m], -k[m]};
  }
  count = 1;
  return {k[m], 0.0};
}

}  // namespace detail

enum class ThetaParity { odd, even };

/// Theta_eps[f] (odd) or Theta+_eps[f] (even) for a fixed potential and grid.
///
/// Construction tabulates the real symbol D(x, eta) over the half momentum
/// spectrum once; applications cost one forward and one inverse transform in p.
class ThetaOperator {
 public:
  ThetaOperator(const Grid& g, const PotentialField& f, double eps, ThetaParity parity)
      : grid_(g), eps_(eps), parity_(parity) {
    if (!(eps > 0.0)) {
      throw std::invalid_argument("Theta operator: ε must be positive");
    }
    require_shape(f.values(), g, "Theta operator");
    trivial_ = f.is_constant();
    constant_ = f.is_constant() ? f.values()[0] : 0.0;
    if (trivial_) return;
    table_.assign(g.nx1() * g.nx2() * g.np1() * half_np2(), 0.0);
    if (f.is_spectral()) {
      tabulate_spectral(f);
    } else {
      tabulate_analytic(f);
    }
  }

  ThetaParity parity() const { return parity_; }
  double epsilon() const { return eps_; }
  const Grid& grid() const { return grid_; }

  Field4 apply(const Field4& w) const {
    require_shape(w, grid_, "Theta operator");
    if (trivial_) {
      if (parity_ == ThetaParity::odd) return grid_.zeros4();
      Field4 out = w;
      out *= 2.0 * constant_;
      return out;
    }
    auto spec = spectral::forward(w, {2, 3});
    apply_spectrum(spec);
    return spectral::inverse<4>(spec, w.shape(), {2, 3});
  }

  WignerField apply(const WignerField& w) const {
    WignerField out;
    for (int k = 0; k < 4; ++k) out[k] = apply(w[k]);
    return out;
  }

  /// Multiplies a p-spectrum (layout of spectral::forward(w, {2, 3})) by the symbol.
  void apply_spectrum(ComplexVector& spec) const {
    if (trivial_) {
      const cplx c = parity_ == ThetaParity::odd ? cplx{} : cplx(2.0 * constant_);
      for (auto& v : spec) v *= c;
      return;
    }
    if (spec.size() != table_.size()) throw std::invalid_argument("Theta operator: spectrum size mismatch");
    const std::size_t n = spec.size();
    if (parity_ == ThetaParity::odd) {
      // (-i d / eps) * v
      const double inv = 1.0 / eps_;
      for (std::size_t q = 0; q < n; ++q) {
        const double d = table_[q] * inv;
        spec[q] = cplx(spec[q].imag() * d, -spec[q].real() * d);
      }
    } else {
      for (std::size_t q = 0; q < n; ++q) spec[q] *= table_[q];
    }
  }

  /// Exact flow exp(h Theta) of the odd operator: a unit-modulus phase per (x, eta).
  void apply_exponential(Field4& w, double h) const {
    if (parity_ != ThetaParity::odd) {
      throw std::logic_error("apply_exponential is defined for the odd Theta operator only");
    }
    if (trivial_) return;
    auto spec = spectral::forward(w, {2, 3});
    multiply(spec, [&](double d) { return std::polar(1.0, -d * h / eps_); });
    w = spectral::inverse<4>(spec, w.shape(), {2, 3});
  }

  /// Real symbol D(x, eta) on (x1, x2, eta1, eta2-half) bins; empty for constant potentials.
  const std::vector<double>& symbol_table() const { return table_; }
  std::size_t half_np2() const { return grid_.np2() / 2 + 1; }

 private:
  template <class F>
  void multiply(ComplexVector& spec, F&& factor) const {
    // spec and table share the (x1, x2, eta1, eta2-half) layout.
    for (std::size_t q = 0; q < spec.size(); ++q) spec[q] *= factor(table_[q]);
  }

  template <class F>
  void for_each_eta(F&& f) const {
    const std::size_t h2 = half_np2();
    for (std::size_t a = 0; a < grid_.np1(); ++a)
      for (std::size_t b = 0; b < h2; ++b) {
        int ca = 0, cb = 0;
        const auto e1 = detail::aliases(grid_.eta1(), a, ca);
        const auto e2 = detail::aliases(grid_.eta2(), b, cb);
        f(a, b, e1, ca, e2, cb);
      }
  }

  std::size_t table_index(std::size_t x, std::size_t a, std::size_t b) const {
    return (x * grid_.np1() + a) * half_np2() + b;
  }

  void tabulate_analytic(const PotentialField& f) {
    const bool odd = parity_ == ThetaParity::odd;
    for_each_eta([&](std::size_t a, std::size_t b, auto e1, int ca, auto e2, int cb) {
      for (std::size_t i = 0; i < grid_.nx1(); ++i)
        for (std::size_t j = 0; j < grid_.nx2(); ++j) {
          const double x1 = grid_.x1()[i], x2 = grid_.x2()[j];
          double acc = 0.0;
          for (int u = 0; u < ca; ++u)
            for (int v = 0; v < cb; ++v) {
              const double s1 = 0.5 * eps_ * e1[u], s2 = 0.5 * eps_ * e2[v];
              const double minus = f.evaluate(x1 - s1, x2 - s2);
              const double plus = f.evaluate(x1 + s1, x2 + s2);
              acc += odd ? minus - plus : minus + plus;
            }
          table_[table_index(i * grid_.nx2() + j, a, b)] = acc / (ca * cb);
        }
    });
  }

  void tabulate_spectral(const PotentialField& f) {
    const bool odd = parity_ == ThetaParity::odd;
    const std::size_t n1 = grid_.nx1(), n2 = grid_.nx2();
    const fft::Shape shape{n1, n2};
    ComplexVector vals(f.values().begin(), f.values().end());
    ComplexVector coeff(vals.size());
    fft::transform_c2c(vals, coeff, shape, {0, 1}, -1);
    for (auto& c : coeff) c /= static_cast<double>(n1 * n2);

    // Per-bin aliases of the position wavenumbers.
    std::vector<std::array<double, 2>> k1s(n1), k2s(n2);
    std::vector<int> c1(n1), c2(n2);
    for (std::size_t i = 0; i < n1; ++i) k1s[i] = detail::aliases(grid_.k1(), i, c1[i]);
    for (std::size_t j = 0; j < n2; ++j) k2s[j] = detail::aliases(grid_.k2(), j, c2[j]);

    ComplexVector work(n1 * n2), field(n1 * n2);
    for_each_eta([&](std::size_t a, std::size_t b, auto e1, int ca, auto e2, int cb) {
      for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
          double acc = 0.0;
          int count = 0;
          for (int u = 0; u < ca; ++u)
            for (int v = 0; v < cb; ++v)
              for (int p = 0; p < c1[i]; ++p)
                for (int q = 0; q < c2[j]; ++q) {
                  const double phase =
                      0.5 * eps_ * (k1s[i][p] * e1[u] + k2s[j][q] * e2[v]);
                  acc += odd ? std::sin(phase) : std::cos(phase);
                  ++count;
                }
          acc /= count;
          // f(x - s) -+ f(x + s) = sum_k f^_k e^{ik.x} (e^{-ik.s} -+ e^{ik.s})
          const cplx factor = odd ? cplx(0.0, -2.0 * acc) : cplx(2.0 * acc, 0.0);
          work[i * n2 + j] = coeff[i * n2 + j] * factor;
        }
      // Unnormalized backward transform evaluates the Fourier series on the grid.
      fft::transform_c2c(work, field, shape, {0, 1}, +1);
      const double scale = static_cast<double>(n1 * n2);
      for (std::size_t x = 0; x < n1 * n2; ++x) {
        table_[table_index(x, a, b)] = field[x].real() * scale;
      }
    });
  }

  Grid grid_;
  double eps_;
  ThetaParity parity_;
  bool trivial_ = false;
  double constant_ = 0.0;
  std::vector<double> table_;
};

inline WignerField theta_apply(const PotentialField& v, const WignerField& w, const Grid& g,
                               double eps) {
  return ThetaOperator(g, v, eps, ThetaParity::odd).apply(w);
}

inline Field4 theta_apply(const PotentialField& v, const Field4& w, const Grid& g, double eps) {
  return ThetaOperator(g, v, eps, ThetaParity::odd).apply(w);
}

inline WignerField theta_plus_apply(const PotentialField& f, const WignerField& w, const Grid& g,
                                    double eps) {
  return ThetaOperator(g, f, eps, ThetaParity::even).apply(w);
}

inline Field4 theta_plus_apply(const PotentialField& f, const Field4& w, const Grid& g,
                               double eps) {
  return ThetaOperator(g, f, eps, ThetaParity::even).apply(w);
}

// ---------------------------------------------------------------------------
// Truncated Moyal calculus on complex symbols.

/// How derivatives along a group of axes are taken: spectrally for periodic
/// (or rapidly decaying) data, or by high-order finite differences that are
/// exact on polynomials of degree <= 8 (e.g. p1, |p|^2/2, E.x).
enum class DerivativeScheme { spectral, polynomial };

struct SymbolField {
  ComplexField4 values;
  DerivativeScheme x_scheme = DerivativeScheme::spectral;
  DerivativeScheme p_scheme = DerivativeScheme::spectral;
};

template <class F>
SymbolField make_symbol(const Grid& g, F&& f, DerivativeScheme x_scheme = DerivativeScheme::spectral,
                        DerivativeScheme p_scheme = DerivativeScheme::spectral) {
  SymbolField s{ComplexField4(g.shape4()), x_scheme, p_scheme};
  std::size_t flat = 0;
  for (double x1 : g.x1())
    for (double x2 : g.x2())
      for (double p1 : g.p1())
        for (double p2 : g.p2()) s.values[flat++] = f(x1, x2, p1, p2);
  return s;
}

namespace detail {

// Fornberg's recursion: weights of the first derivative at z0 on nodes z.
inline std::vector<double> first_derivative_weights(const std::vector<double>& z, double z0) {
  const std::size_t n = z.size();
  std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
  double c1 = 1.0;
  double c4 = z[0] - z0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = z[i] - z0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = z[i] - z[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn + 1; k-- > 1;) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn + 1; k-- > 1;) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

inline ComplexField4 fd_derivative(const ComplexField4& f, std::size_t axis, double h) {
  const std::size_t n = f.extent(axis);
  const std::size_t width = std::min<std::size_t>(9, n);
  // Stencil start and weights for every position along the axis.
  std::vector<std::size_t> start(n);
  std::vector<std::vector<double>> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long s = std::clamp<long>(static_cast<long>(i) - static_cast<long>(width / 2), 0,
                                    static_cast<long>(n - width));
    start[i] = static_cast<std::size_t>(s);
    std::vector<double> z(width);
    for (std::size_t q = 0; q < width; ++q) z[q] = static_cast<double>(start[i] + q) - static_cast<double>(i);
    weights[i] = first_derivative_weights(z, 0.0);
    for (auto& wq : weights[i]) wq /= h;
  }
  const std::size_t stride = f.stride(axis);
  const std::size_t outer = f.size() / (n * stride);
  ComplexField4 out(f.shape());
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = o * n * stride + inner;
      for (std::size_t i = 0; i < n; ++i) {
        cplx acc = 0.0;
        for (std::size_t q = 0; q < width; ++q) acc += weights[i][q] * f[base + (start[i] + q) * stride];
        out[base + i * stride] = acc;
      }
    }
  return out;
}

inline ComplexField4 spectral_derivative(const ComplexField4& f, std::size_t axis, int order,
                                         const std::vector<double>& k) {
  const fft::Shape shape(f.shape().begin(), f.shape().end());
  ComplexVector spec(f.size());
  fft::transform_c2c(f.span(), spec, shape, {axis}, -1);
  const std::size_t n = f.extent(axis);
  const std::size_t stride = f.stride(axis);
  for (std::size_t q = 0; q < spec.size(); ++q) {
    const std::size_t m = (q / stride) % n;
    cplx mult = 1.0;
    for (int o = 0; o < order; ++o) mult *= spectral::derivative_symbol(k, m);
    spec[q] *= mult;
  }
  ComplexField4 out(f.shape());
  fft::transform_c2c(spec, out.span(), shape, {axis}, +1);
  return out;
}

}  // namespace detail

/// Mixed partial derivative with orders (x1, x2, p1, p2).
inline ComplexField4 symbol_derivative(const SymbolField& s, const Grid& g, std::array<int, 4> orders) {
  if (s.values.shape() != g.shape4()) {
    throw std::invalid_argument("symbol_derivative: symbol shape does not match grid");
  }
  ComplexField4 out = s.values;
  const std::array<const std::vector<double>*, 4> ks{&g.k1(), &g.k2(), &g.eta1(), &g.eta2()};
  const std::array<double, 4> h{g.spec().dx1(), g.spec().dx2(), g.spec().dp1(), g.spec().dp2()};
  for (std::size_t axis = 0; axis < 4; ++axis) {
    if (orders[axis] == 0) continue;
    const auto scheme = axis < 2 ? s.x_scheme : s.p_scheme;
    if (scheme == DerivativeScheme::spectral) {
      out = detail::spectral_derivative(out, axis, orders[axis], *ks[axis]);
    } else {
      for (int o = 0; o < orders[axis]; ++o) out = detail::fd_derivative(out, axis, h[axis]);
    }
  }
  return out;
}

/// a #_k b: the k-th bidifferential term of the Moyal expansion,
///   (2i)^-k sum_{|alpha|+|beta|=k} (-1)^|alpha| / (alpha! beta!)
///     (d_x^alpha d_p^beta a)(d_p^alpha d_x^beta b).
inline ComplexField4 moyal_term(const SymbolField& a, const SymbolField& b, const Grid& g, int k) {
  if (k < 0) throw std::invalid_argument("moyal_term: order must be non-negative");
  std::map<std::array<int, 4>, ComplexField4> da, db;
  auto deriv = [&](std::map<std::array<int, 4>, ComplexField4>& cache, const SymbolField& s,
                   std::array<int, 4> o) -> const ComplexField4& {
    auto it = cache.find(o);
    if (it == cache.end()) it = cache.emplace(o, symbol_derivative(s, g, o)).first;
    return it->second;
  };
  auto factorial = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  ComplexField4 out(g.shape4());
  const cplx prefactor = std::pow(cplx(0.0, 2.0), -k);
  for (int a1 = 0; a1 <= k; ++a1)
    for (int a2 = 0; a1 + a2 <= k; ++a2)
      for (int b1 = 0; a1 + a2 + b1 <= k; ++b1) {
        const int b2 = k - a1 - a2 - b1;
        const double sign = ((a1 + a2) % 2 == 0) ? 1.0 : -1.0;
        const double weight =
            sign / (factorial(a1) * factorial(a2) * factorial(b1) * factorial(b2));
        const auto& fa = deriv(da, a, {a1, a2, b1, b2});
        const auto& fb = deriv(db, b, {b1, b2, a1, a2});
        const cplx c = prefactor * weight;
        for (std::size_t q = 0; q < out.size(); ++q) out[q] += c * fa[q] * fb[q];
      }
  return out;
}

inline void require_moyal_order(int order) {
  if (order < 0 || order > 3) {
    throw std::invalid_argument("Moyal truncation order must be in 0..3, got " + std::to_string(order));
  }
}

/// sum_{k <= order} eps^k a #_k b.
inline SymbolField moyal_product_truncated(const SymbolField& a, const SymbolField& b, const Grid& g,
                                           int order, double eps) {
  require_moyal_order(order);
  SymbolField out{ComplexField4(g.shape4()), a.x_scheme, a.p_scheme};
  double scale = 1.0;
  for (int k = 0; k <= order; ++k) {
    out.values.axpy(scale, moyal_term(a, b, g, k));
    scale *= eps;
  }
  return out;
}

/// Truncated Moyal bracket a#b - b#a.
inline SymbolField moyal_bracket_truncated(const SymbolField& a, const SymbolField& b, const Grid& g,
                                           int order, double eps) {
  SymbolField ab = moyal_product_truncated(a, b, g, order, eps);
  const SymbolField ba = moyal_product_truncated(b, a, g, order, eps);
  ab.values -= ba.values;
  return ab;
}

/// {a, b} = sum_j d_xj a d_pj b - d_pj a d_xj b.
inline ComplexField4 poisson_bracket(const SymbolField& a, const SymbolField& b, const Grid& g) {
  ComplexField4 out(g.shape4());
  for (int j = 0; j < 2; ++j) {
    std::array<int, 4> ox{0, 0, 0, 0}, op{0, 0, 0, 0};
    ox[j] = 1;
    op[2 + j] = 1;
    const auto ax = symbol_derivative(a, g, ox), bp = symbol_derivative(b, g, op);
    const auto ap = symbol_derivative(a, g, op), bx = symbol_derivative(b, g, ox);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] += ax[q] * bp[q] - ap[q] * bx[q];
  }
  return out;
}

}  // namespace rashba
