#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qpc/cocycle.hpp"
#include "qpc/zeros.hpp"

namespace qpc {

/// z^k + c_{k-1} z^{k-1} + ... + c_0.
struct MonicPolynomial {
  /// c_0 .. c_{k-1}; the leading 1 is implicit.
  std::vector<Complex> coefficients;

  explicit MonicPolynomial(std::vector<Complex> c);
  static MonicPolynomial from_roots(std::span<const Complex> roots);

  int degree() const { return static_cast<int>(coefficients.size()); }
  Complex operator()(Complex z) const;
  /// z -> p(z + eta).
  MonicPolynomial shifted(Complex eta) const;
  /// p' / k.
  MonicPolynomial normalized_derivative() const;
};

MonicPolynomial operator*(const MonicPolynomial& a, const MonicPolynomial& b);

/// Determinant of the Sylvester matrix, which equals prod_{i,j} (zeta_i - eta_j)
/// over the roots of f and g.
ScaledComplex sylvester_resultant(const MonicPolynomial& f, const MonicPolynomial& g);

/// prod_{i,j} (zeta_i - eta_j) directly from root lists.
ScaledComplex root_product(std::span<const Complex> f_roots, std::span<const Complex> g_roots);

/// Discriminant prod_{i<j} (zeta_i - zeta_j)^2 computed as
/// (-1)^{k(k-1)/2} Res(f, f').
ScaledComplex discriminant(const MonicPolynomial& f);

/// chi(eta) = Res(f(. + eta), g) through the Sylvester route.
ScaledComplex shifted_resultant(const MonicPolynomial& f, const MonicPolynomial& g, Complex eta);

struct ShiftedResultantReport {
  /// (eta, chi(eta)) for the requested samples.
  std::vector<std::pair<Complex, ScaledComplex>> samples;
  /// chi(eta) / (-eta)^{km} at |eta| = 1e6 times the root radius.
  Complex leading_ratio{};
  bool leading_ok = false;
  /// b_j of chi(eta) = (-eta)^n + b_{n-1} eta^{n-1} + ... + b_0, n = km.
  std::vector<Complex> coefficients;
  /// Radius of the smallest disk about the root centroid holding all roots of f and g.
  double r0 = 0.0;
  /// max_j |b_j| / (binom(n, n-j) (2 r0)^{n-j}).
  double worst_bound_ratio = 0.0;
  bool bound_ok = false;
};

/// f_roots and g_roots must be the roots of f and g (used for the radius r0).
ShiftedResultantReport shifted_resultant_poly(const MonicPolynomial& f, const MonicPolynomial& g,
                                              std::span<const Complex> f_roots, std::span<const Complex> g_roots,
                                              std::span<const Complex> eta_samples);

struct ResonanceCell {
  double omega = 0.0;
  double energy = 0.0;
  /// Distance between the two zero sets, +inf when either is empty.
  double distance = 0.0;
  int zeros_first = 0;
  int zeros_second = 0;
  bool incomplete = false;
};

struct ResonanceScan {
  std::int64_t ell1 = 0;
  std::int64_t ell2 = 0;
  std::int64_t t = 0;
  double x0 = 0.0;
  double r = 0.0;
  std::vector<ResonanceCell> cells;
  /// (tau, fraction of cells with distance < tau).
  std::vector<std::pair<double, double>> sublevel;
  /// Measure carried by one grid cell.
  double cell_resolution = 0.0;
};

/// Zeros of f_ell1(., omega, E) and of f_ell2(. e(t omega), omega, E) in
/// D(e(x0), r) for every (omega, E) on the grid. t must be 0 (control) or
/// exceed ell1.
ResonanceScan double_resonance_scan(const CocycleParams& params_template, std::int64_t ell1, std::int64_t ell2,
                                    std::int64_t t, double x0, std::span<const double> omega_grid,
                                    std::span<const double> energy_grid, double r,
                                    std::span<const double> tau_ladder = {}, const ZeroBudget& budget = {});

}  // namespace qpc
