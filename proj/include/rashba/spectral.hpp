#pragma once

// Spectral differentiation on the periodic grids. Derivative multipliers
// vanish on Nyquist bins so that real data stays real.

#include <array>
#include <complex>
#include <vector>

#include "rashba/aligned.hpp"
#include "rashba/array.hpp"
#include "rashba/fft.hpp"
#include "rashba/grid.hpp"

namespace rashba::spectral {

using cplx = std::complex<double>;

namespace detail {

template <std::size_t R>
fft::Shape to_fft_shape(const typename GridArray<double, R>::Shape& s) {
  return fft::Shape(s.begin(), s.end());
}

// Visits every bin of a half spectrum in storage order, passing the bin's
// multi-index.
template <std::size_t R, class F>
void for_each_bin(const fft::Shape& hshape, F&& f) {
  std::array<std::size_t, R> idx{};
  const std::size_t total = fft::element_count(hshape);
  for (std::size_t flat = 0; flat < total; ++flat) {
    f(flat, idx);
    for (std::size_t a = R; a-- > 0;) {
      if (++idx[a] < hshape[a]) break;
      idx[a] = 0;
    }
  }
}

}  // namespace detail

/// Forward r2c over `axes`; the result is laid out as fft::half_shape(shape, axes).
template <std::size_t R>
ComplexVector forward(const GridArray<double, R>& f, const fft::Axes& axes) {
  const auto shape = detail::to_fft_shape<R>(f.shape());
  ComplexVector out(fft::element_count(fft::half_shape(shape, axes)));
  fft::forward_r2c(f.span(), out, shape, axes);
  return out;
}

/// Normalized inverse of `forward`; consumes the spectrum.
template <std::size_t R>
GridArray<double, R> inverse(ComplexVector& spec, const typename GridArray<double, R>::Shape& shape,
                             const fft::Axes& axes) {
  GridArray<double, R> out(shape);
  fft::inverse_c2r(spec, out.span(), detail::to_fft_shape<R>(shape), axes);
  return out;
}

/// Multiplies the half spectrum of f over `axes` by mult(bin index) and transforms back.
template <std::size_t R, class M>
GridArray<double, R> apply_multiplier(const GridArray<double, R>& f, const fft::Axes& axes, M&& mult) {
  auto spec = forward(f, axes);
  const auto hshape = fft::half_shape(detail::to_fft_shape<R>(f.shape()), axes);
  detail::for_each_bin<R>(hshape, [&](std::size_t flat, const std::array<std::size_t, R>& idx) {
    spec[flat] *= mult(idx);
  });
  return inverse<R>(spec, f.shape(), axes);
}

/// i * k for bin m of a length-n axis, zero on the Nyquist bin.
inline cplx derivative_symbol(const std::vector<double>& k, std::size_t m) {
  if (fft::is_nyquist(m, k.size())) return 0.0;
  return {0.0, k[m]};
}

inline Field2 x_derivative(const Field2& f, const Grid& g, int axis) {
  require_shape(f, g, "x_derivative");
  const auto& k = axis == 0 ? g.k1() : g.k2();
  return apply_multiplier(f, {0, 1}, [&](const std::array<std::size_t, 2>& i) {
    return derivative_symbol(k, i[axis]);
  });
}

inline Field4 x_derivative(const Field4& f, const Grid& g, int axis) {
  require_shape(f, g, "x_derivative");
  const auto& k = axis == 0 ? g.k1() : g.k2();
  return apply_multiplier(f, {0, 1}, [&](const std::array<std::size_t, 4>& i) {
    return derivative_symbol(k, i[axis]);
  });
}

inline Field4 p_derivative(const Field4& f, const Grid& g, int axis) {
  require_shape(f, g, "p_derivative");
  const auto& eta = axis == 0 ? g.eta1() : g.eta2();
  return apply_multiplier(f, {2, 3}, [&](const std::array<std::size_t, 4>& i) {
    return derivative_symbol(eta, i[2 + axis]);
  });
}

/// (d1 f, d2 f) from a single forward transform.
inline std::array<Field2, 2> gradient(const Field2& f, const Grid& g) {
  require_shape(f, g, "gradient");
  const fft::Axes axes{0, 1};
  const auto spec = forward(f, axes);
  const std::size_t h2 = g.nx2() / 2 + 1;
  std::array<Field2, 2> out;
  for (int axis = 0; axis < 2; ++axis) {
    auto s = spec;
    const auto& k = axis == 0 ? g.k1() : g.k2();
    for (std::size_t i = 0; i < g.nx1(); ++i)
      for (std::size_t j = 0; j < h2; ++j) s[i * h2 + j] *= derivative_symbol(k, axis == 0 ? i : j);
    out[axis] = inverse<2>(s, f.shape(), axes);
  }
  return out;
}

/// d1 f1 + d2 f2.
inline Field2 divergence(const Field2& f1, const Field2& f2, const Grid& g) {
  require_shape(f1, g, "divergence");
  require_shape(f2, g, "divergence");
  const fft::Axes axes{0, 1};
  auto s1 = forward(f1, axes);
  const auto s2 = forward(f2, axes);
  const std::size_t h2 = g.nx2() / 2 + 1;
  for (std::size_t i = 0; i < g.nx1(); ++i)
    for (std::size_t j = 0; j < h2; ++j) {
      const std::size_t q = i * h2 + j;
      s1[q] = derivative_symbol(g.k1(), i) * s1[q] + derivative_symbol(g.k2(), j) * s2[q];
    }
  return inverse<2>(s1, f1.shape(), axes);
}

inline Field2 laplacian(const Field2& f, const Grid& g) {
  require_shape(f, g, "laplacian");
  return apply_multiplier(f, {0, 1}, [&](const std::array<std::size_t, 2>& i) {
    const cplx a = derivative_symbol(g.k1(), i[0]);
    const cplx b = derivative_symbol(g.k2(), i[1]);
    return a * a + b * b;
  });
}

}  // namespace rashba::spectral
