#pragma once

#include <complex>
#include <limits>

namespace qpc {

using Complex = std::complex<double>;

/// Plain 2x2 complex matrix, row-major [[a, b], [c, d]].
struct Mat2 {
  Complex a{}, b{}, c{}, d{};

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  Complex det() const { return a * d - b * c; }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

Mat2 operator*(const Mat2& x, const Mat2& y);

/// A complex number e^{log_abs} * phase with |phase| in [1, 2), or zero.
struct ScaledComplex {
  Complex phase{};
  double log_abs = 0.0;

  static ScaledComplex from(Complex v, double carried_log = 0.0);
  static ScaledComplex zero() { return {}; }
  static ScaledComplex one() { return {Complex(1.0, 0.0), 0.0}; }

  bool is_zero() const { return phase == Complex(0.0, 0.0); }
  /// log|value|; -inf for zero.
  double log_magnitude() const;
  /// Argument of the value in (-pi, pi].
  double arg() const { return std::arg(phase); }
  /// The represented value; overflows to inf when log_abs is large.
  Complex value() const;
};

ScaledComplex operator*(const ScaledComplex& x, const ScaledComplex& y);
ScaledComplex operator/(const ScaledComplex& x, const ScaledComplex& y);
ScaledComplex operator+(const ScaledComplex& x, const ScaledComplex& y);
ScaledComplex operator-(const ScaledComplex& x);
inline ScaledComplex operator-(const ScaledComplex& x, const ScaledComplex& y) { return x + (-y); }

/// 2x2 complex matrix e^{log_scale} * mantissa, max_{ij} |mantissa_ij| in [1, 2)
/// (or mantissa == 0, log_scale == 0).
///
/// The determinant is carried separately and multiplied exactly along
/// products: for long unimodular products the mantissa determinant is the
/// difference of two O(1) numbers whose true value is e^{-2 log_scale}, which
/// no floating-point evaluation can recover.
struct ScaledMatrix2 {
  Mat2 mantissa{};
  double log_scale = 0.0;
  ScaledComplex det{};

  bool is_zero() const { return mantissa == Mat2{}; }
  /// Entry (i, j), zero-based, in scaled form.
  ScaledComplex entry(int i, int j) const;
};

/// Rescale raw into the mantissa band; the result represents e^{carried_log} * raw.
/// Throws DomainError on NaN entries.
ScaledMatrix2 normalize(const Mat2& raw, double carried_log = 0.0);

ScaledMatrix2 mat_mul(const ScaledMatrix2& a, const ScaledMatrix2& b);

/// log of the largest singular value. Throws DomainError for the zero matrix.
double log_norm(const ScaledMatrix2& m);

/// log|det|, from the carried determinant; -inf for singular matrices.
double log_abs_det(const ScaledMatrix2& m);

}  // namespace qpc
