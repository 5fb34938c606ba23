#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "rashba/aligned.hpp"

namespace rashba {

/// Dense row-major array of fixed rank. Value semantics; the last index is contiguous.
template <class T, std::size_t Rank>
class GridArray {
 public:
  using value_type = T;
  using Shape = std::array<std::size_t, Rank>;

  GridArray() { shape_.fill(0); }

  explicit GridArray(const Shape& shape, T fill = T{})
      : shape_(shape), data_(count(shape), fill) {}

  const Shape& shape() const { return shape_; }
  std::size_t extent(std::size_t axis) const { return shape_[axis]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  template <class... I>
  T& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(idx...)];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(idx...)];
  }

  template <class... I>
  std::size_t offset(I... idx) const {
    const std::array<std::size_t, Rank> ii{static_cast<std::size_t>(idx)...};
    std::size_t flat = 0;
    for (std::size_t a = 0; a < Rank; ++a) {
      flat = flat * shape_[a] + ii[a];
    }
    return flat;
  }

  /// Row-major stride of an axis, in elements.
  std::size_t stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t a = axis + 1; a < Rank; ++a) {
      s *= shape_[a];
    }
    return s;
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  GridArray& operator+=(const GridArray& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  GridArray& operator-=(const GridArray& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  GridArray& operator*=(T s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  /// this += s * o
  GridArray& axpy(T s, const GridArray& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
    return *this;
  }

  friend GridArray operator+(GridArray a, const GridArray& b) { return a += b; }
  friend GridArray operator-(GridArray a, const GridArray& b) { return a -= b; }
  friend GridArray operator*(T s, GridArray a) { return a *= s; }

  friend bool operator==(const GridArray&, const GridArray&) = default;

  void require_same_shape(const GridArray& o) const {
    if (o.shape_ != shape_) {
      throw std::invalid_argument("GridArray: shape mismatch");
    }
  }

  static std::size_t count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
  }

 private:
  Shape shape_;
  AlignedVector<T> data_;
};

template <class T, std::size_t R>
bool all_finite(const GridArray<T, R>& a) {
  return std::all_of(a.begin(), a.end(), [](const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
      return std::isfinite(v);
    } else {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    }
  });
}

template <class T, std::size_t R>
double max_abs(const GridArray<T, R>& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

template <class T, std::size_t R>
double max_abs_diff(const GridArray<T, R>& a, const GridArray<T, R>& b) {
  a.require_same_shape(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, static_cast<double>(std::abs(a[i] - b[i])));
  }
  return m;
}

using Field2 = GridArray<double, 2>;
using Field4 = GridArray<double, 4>;
using ComplexField2 = GridArray<std::complex<double>, 2>;
using ComplexField4 = GridArray<std::complex<double>, 4>;

}  // namespace rashba
