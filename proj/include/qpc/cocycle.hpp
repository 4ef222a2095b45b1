#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpc/scaled.hpp"

namespace qpc {

/// e(t) = exp(2 pi i t).
Complex unit_phase(double t);

/// z = e(x + i y).
Complex phase_point(double x, double y = 0.0);

/// Rotation number omega in [0, 1).
///
/// Irrational frequencies are held as an unevaluated double-double sum so
/// that frac(k * omega) stays accurate to ~1e-16 for k up to 2^40. Rational
/// frequencies p/q are reduced exactly in integer arithmetic.
class Frequency {
 public:
  Frequency() = default;

  static Frequency irrational(double value, double low_part = 0.0);
  static Frequency rational(std::int64_t p, std::int64_t q);
  /// sqrt(2) mod 1.
  static Frequency sqrt2();
  /// (sqrt(5) - 1) / 2.
  static Frequency golden();
  /// Convergent p_r/q_r of a quadratic irrational tag ("sqrt2" or "golden")
  /// with denominator q_r >= min_denominator.
  static Frequency convergent(const std::string& tag, std::int64_t min_denominator);

  double value() const { return hi_ + lo_; }
  bool is_rational() const { return q_ > 0; }
  std::int64_t numerator() const { return p_; }
  std::int64_t denominator() const { return q_; }

  /// frac(k * omega).
  double shift(std::int64_t k) const;

 private:
  double hi_ = 0.0;
  double lo_ = 0.0;
  std::int64_t p_ = 0;
  std::int64_t q_ = 0;
};

/// V(z) = coupling * sum_{|k| <= degree} coefficient(k) z^k with
/// coefficient(-k) = conj(coefficient(k)).
struct TrigPotential {
  double coupling = 1.0;
  int degree = 1;
  /// Width of the annulus of analyticity used to cap |y|.
  double rho0 = 1.0;
  /// coefficients[k + degree] for k = -degree..degree.
  std::vector<Complex> coefficients;

  static TrigPotential zero();
  /// coupling * cos(2 pi x).
  static TrigPotential almost_mathieu(double coupling);
  /// coupling * cos(2 pi m x).
  static TrigPotential cosine(double coupling, int harmonic);
  /// Builds from (k, coefficient) pairs, filling conjugate partners that are
  /// absent. Throws DomainError if given pairs violate conjugate symmetry.
  static TrigPotential from_terms(double coupling, double rho0,
                                  const std::vector<std::pair<int, Complex>>& terms);

  Complex coefficient(int k) const;
  /// Throws DomainError unless coefficients are conjugate-symmetric.
  void validate() const;
  /// Upper bound for sup_x |V(e(x))|.
  double sup_bound() const;
  bool is_zero() const;
};

struct CocycleParams {
  Frequency omega;
  Complex energy{};
  TrigPotential potential;

  CocycleParams with_energy(Complex e) const {
    CocycleParams p = *this;
    p.energy = e;
    return p;
  }
};

struct ImpuritySpec {
  std::vector<int> positions;
};

/// lambda * sum v(k) z^k. Throws DomainError for z == 0.
Complex potential_eval(const TrigPotential& p, Complex z);

/// V(e(x)) for real x; real by conjugate symmetry.
double potential_real(const TrigPotential& p, double x);

/// d/dx V(e(x)) for real x.
double potential_derivative(const TrigPotential& p, double x);

/// z * e(k omega): the phase seen by site k.
Complex site_point(const CocycleParams& params, Complex z, std::int64_t k);

/// V(z e(k omega)) - E for k = a..b.
std::vector<Complex> site_diagonal(const CocycleParams& params, Complex z, std::int64_t a, std::int64_t b);

/// [[V(z) - E, -1], [1, 0]].
ScaledMatrix2 one_step(const CocycleParams& params, Complex z);

/// A_b ... A_a with A_k = one_step(z e(k omega)); identity when a > b.
ScaledMatrix2 monodromy_window(const CocycleParams& params, Complex z, std::int64_t a, std::int64_t b);

/// M_n = A_n ... A_1.
ScaledMatrix2 monodromy(const CocycleParams& params, Complex z, std::int64_t n);

/// f_[a,b](z) = det(H_[a,b] - E) by the three-term recursion. Accepts
/// b = a - 1 (value 1) and b = a - 2 (value 0).
ScaledComplex dirichlet_det(const CocycleParams& params, Complex z, std::int64_t a, std::int64_t b);

/// Monodromy of length n with the projection [[-1, 0], [0, 0]] replacing A_k
/// at every impurity position k.
ScaledMatrix2 impurity_monodromy(const CocycleParams& params, Complex z, std::int64_t n,
                                 const ImpuritySpec& spec);

/// G_N(j, k) = (H_[1,N](z) - E - i eta)^{-1}(j, k) for j <= k, via
/// f_[1,j-1] f_[k+1,N] / f_[1,N]. Throws PoleError if f_[1,N] vanishes.
ScaledComplex green_entry(const CocycleParams& params, Complex z, std::int64_t N, std::int64_t j,
                          std::int64_t k, double eta);

}  // namespace qpc
