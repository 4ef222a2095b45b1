#include "qpc/scaled.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpc/errors.hpp"

namespace qpc {

namespace {

constexpr double kLn2 = std::numbers::ln2;

bool has_nan(Complex v) { return std::isnan(v.real()) || std::isnan(v.imag()); }

// Binary exponent e such that s * 2^{-e} lies in [1, 2).
int band_exponent(double s) {
  int e = 0;
  std::frexp(s, &e);
  return e - 1;
}

}  // namespace

Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

ScaledComplex ScaledComplex::from(Complex v, double carried_log) {
  if (has_nan(v) || std::isnan(carried_log)) throw DomainError("ScaledComplex: NaN value");
  const double s = std::abs(v);
  if (s == 0.0) return zero();
  if (std::isinf(s)) throw DomainError("ScaledComplex: infinite value");
  const int e = band_exponent(s);
  return {Complex(std::ldexp(v.real(), -e), std::ldexp(v.imag(), -e)), carried_log + e * kLn2};
}

double ScaledComplex::log_magnitude() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return log_abs + std::log(std::abs(phase));
}

Complex ScaledComplex::value() const {
  if (is_zero()) return {};
  return phase * std::exp(log_abs);
}

ScaledComplex operator*(const ScaledComplex& x, const ScaledComplex& y) {
  if (x.is_zero() || y.is_zero()) return ScaledComplex::zero();
  return ScaledComplex::from(x.phase * y.phase, x.log_abs + y.log_abs);
}

ScaledComplex operator/(const ScaledComplex& x, const ScaledComplex& y) {
  if (y.is_zero()) throw DomainError("ScaledComplex: division by zero");
  if (x.is_zero()) return ScaledComplex::zero();
  return ScaledComplex::from(x.phase / y.phase, x.log_abs - y.log_abs);
}

ScaledComplex operator+(const ScaledComplex& x, const ScaledComplex& y) {
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  const auto& big = x.log_abs >= y.log_abs ? x : y;
  const auto& small = x.log_abs >= y.log_abs ? y : x;
  const double rel = small.log_abs - big.log_abs;
  // Below e^{-800} the smaller term cannot change a double mantissa.
  if (rel < -800.0) return big;
  return ScaledComplex::from(big.phase + small.phase * std::exp(rel), big.log_abs);
}

ScaledComplex operator-(const ScaledComplex& x) { return {-x.phase, x.log_abs}; }

ScaledComplex ScaledMatrix2::entry(int i, int j) const {
  const Complex v = i == 0 ? (j == 0 ? mantissa.a : mantissa.b) : (j == 0 ? mantissa.c : mantissa.d);
  return ScaledComplex::from(v, log_scale);
}

ScaledMatrix2 normalize(const Mat2& raw, double carried_log) {
  if (has_nan(raw.a) || has_nan(raw.b) || has_nan(raw.c) || has_nan(raw.d) || std::isnan(carried_log))
    throw DomainError("normalize: NaN entry");
  const double s = std::max(std::max(std::abs(raw.a), std::abs(raw.b)),
                            std::max(std::abs(raw.c), std::abs(raw.d)));
  if (s == 0.0) return {};
  if (std::isinf(s)) throw DomainError("normalize: infinite entry");
  const int e = band_exponent(s);
  auto scale = [e](Complex v) { return Complex(std::ldexp(v.real(), -e), std::ldexp(v.imag(), -e)); };
  ScaledMatrix2 out;
  out.mantissa = {scale(raw.a), scale(raw.b), scale(raw.c), scale(raw.d)};
  out.log_scale = carried_log + e * kLn2;
  out.det = ScaledComplex::from(out.mantissa.det(), 2.0 * out.log_scale);
  return out;
}

ScaledMatrix2 mat_mul(const ScaledMatrix2& a, const ScaledMatrix2& b) {
  if (a.is_zero() || b.is_zero()) return {};
  ScaledMatrix2 out = normalize(a.mantissa * b.mantissa, a.log_scale + b.log_scale);
  if (out.is_zero()) return out;
  out.det = a.det * b.det;
  return out;
}

double log_norm(const ScaledMatrix2& m) {
  if (m.is_zero()) throw DomainError("log_norm: zero matrix");
  const Mat2& x = m.mantissa;
  const double frob = std::norm(x.a) + std::norm(x.b) + std::norm(x.c) + std::norm(x.d);
  const double det = std::abs(x.det());
  const double disc = std::max(frob * frob - 4.0 * det * det, 0.0);
  const double sigma2 = 0.5 * (frob + std::sqrt(disc));
  return m.log_scale + 0.5 * std::log(sigma2);
}

double log_abs_det(const ScaledMatrix2& m) { return m.det.log_magnitude(); }

}  // namespace qpc
