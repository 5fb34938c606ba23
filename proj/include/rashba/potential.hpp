#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rashba/grid.hpp"
#include "rashba/spectral.hpp"

namespace rashba {

/// External potential V(x): sampled values plus the analytic form it came from.
///
/// Linear and quadratic potentials are not periodic; only their gradients
/// enter the operators, and those are evaluated from the analytic form.
class PotentialField {
 public:
  enum class Kind { constant, linear, quadratic, gaussian, tabulated };

  static PotentialField constant(const Grid& g, double value) {
    PotentialField v(Kind::constant);
    v.offset_ = value;
    v.values_ = Field2(g.shape2(), value);
    return v;
  }

  /// V = E . x + offset.
  static PotentialField linear(const Grid& g, double e1, double e2, double offset = 0.0) {
    PotentialField v(Kind::linear);
    v.field_ = {e1, e2};
    v.offset_ = offset;
    v.values_ = g.sample2([&](double x1, double x2) { return v.evaluate(x1, x2); });
    return v;
  }

  /// V = (curvature / 2) |x - center|^2.
  static PotentialField quadratic(const Grid& g, double curvature, double c1, double c2) {
    PotentialField v(Kind::quadratic);
    v.amplitude_ = curvature;
    v.center_ = {c1, c2};
    v.values_ = g.sample2([&](double x1, double x2) { return v.evaluate(x1, x2); });
    return v;
  }

  /// Periodized Gaussian bump amplitude * exp(-|x - center|^2 / (2 width^2)).
  static PotentialField gaussian(const Grid& g, double amplitude, double c1, double c2,
                                 double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian potential width must be positive");
    PotentialField v(Kind::gaussian);
    v.amplitude_ = amplitude;
    v.center_ = {c1, c2};
    v.width_ = width;
    const double L1 = g.spec().Lx1, L2 = g.spec().Lx2;
    v.values_ = g.sample2([&](double x1, double x2) {
      double s = 0.0;
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
          const double d1 = x1 - c1 + a * L1, d2 = x2 - c2 + b * L2;
          s += std::exp(-(d1 * d1 + d2 * d2) / (2.0 * width * width));
        }
      return amplitude * s;
    });
    return v;
  }

  /// Periodic samples on the position grid.
  static PotentialField tabulated(const Grid& g, Field2 values) {
    require_shape(values, g, "tabulated potential");
    if (!all_finite(values)) throw std::invalid_argument("tabulated potential must be finite");
    PotentialField v(Kind::tabulated);
    v.values_ = std::move(values);
    return v;
  }

  /// amplitude * cos(2 pi (m1 x1 / L1 + m2 x2 / L2)), stored as tabulated data.
  static PotentialField cosine(const Grid& g, double amplitude, int m1, int m2) {
    const double L1 = g.spec().Lx1, L2 = g.spec().Lx2;
    return tabulated(g, g.sample2([&](double x1, double x2) {
      return amplitude * std::cos(2.0 * std::numbers::pi * (m1 * x1 / L1 + m2 * x2 / L2));
    }));
  }

  Kind kind() const { return kind_; }
  const Field2& values() const { return values_; }

  bool is_periodic() const { return kind_ != Kind::linear && kind_ != Kind::quadratic; }
  /// Sampled data are used spectrally (interpolated between grid points).
  bool is_spectral() const { return kind_ == Kind::gaussian || kind_ == Kind::tabulated; }
  bool is_constant() const { return kind_ == Kind::constant; }

  /// Analytic value for constant/linear/quadratic potentials.
  double evaluate(double x1, double x2) const {
    switch (kind_) {
      case Kind::constant:
        return offset_;
      case Kind::linear:
        return field_[0] * x1 + field_[1] * x2 + offset_;
      case Kind::quadratic: {
        const double d1 = x1 - center_[0], d2 = x2 - center_[1];
        return 0.5 * amplitude_ * (d1 * d1 + d2 * d2);
      }
      default:
        throw std::logic_error("PotentialField::evaluate: no analytic form for sampled potentials");
    }
  }

  /// Analytic gradient for constant/linear/quadratic potentials.
  std::array<double, 2> evaluate_gradient(double x1, double x2) const {
    switch (kind_) {
      case Kind::constant:
        return {0.0, 0.0};
      case Kind::linear:
        return field_;
      case Kind::quadratic:
        return {amplitude_ * (x1 - center_[0]), amplitude_ * (x2 - center_[1])};
      default:
        throw std::logic_error("PotentialField::evaluate_gradient: sampled potential");
    }
  }

  /// d V / d x_axis on the grid: analytic for the closed forms, spectral otherwise.
  Field2 gradient(const Grid& g, int axis) const {
    require_shape(values_, g, "potential gradient");
    if (is_spectral()) return spectral::x_derivative(values_, g, axis);
    return g.sample2([&](double x1, double x2) { return evaluate_gradient(x1, x2)[axis]; });
  }

  std::string kind_name() const { return kind_name(kind_); }
  static std::string kind_name(Kind k) {
    switch (k) {
      case Kind::constant: return "constant";
      case Kind::linear: return "linear";
      case Kind::quadratic: return "quadratic";
      case Kind::gaussian: return "gaussian";
      case Kind::tabulated: return "tabulated";
    }
    return "?";
  }

 private:
  explicit PotentialField(Kind k) : kind_(k) {}

  Kind kind_ = Kind::constant;
  Field2 values_;
  double offset_ = 0.0;
  double amplitude_ = 0.0;
  double width_ = 1.0;
  std::array<double, 2> field_{};
  std::array<double, 2> center_{};
};

}  // namespace rashba
