#include "qpc/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpc/errors.hpp"
#include "qpc/parallel.hpp"

namespace qpc {

namespace {

// Full coefficient vector, index = power, with the leading 1 included.
std::vector<Complex> full(const MonicPolynomial& p) {
  std::vector<Complex> c = p.coefficients;
  c.emplace_back(1.0, 0.0);
  return c;
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

MonicPolynomial::MonicPolynomial(std::vector<Complex> c) : coefficients(std::move(c)) {
  if (coefficients.empty()) throw DomainError("MonicPolynomial: degree must be >= 1");
}

MonicPolynomial MonicPolynomial::from_roots(std::span<const Complex> roots) {
  if (roots.empty()) throw DomainError("MonicPolynomial: need at least one root");
  std::vector<Complex> c{Complex(1.0, 0.0)};
  for (Complex r : roots) {
    std::vector<Complex> next(c.size() + 1);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  c.pop_back();
  return MonicPolynomial(std::move(c));
}

Complex MonicPolynomial::operator()(Complex z) const {
  Complex v(1.0, 0.0);
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * z + *it;
  return v;
}

MonicPolynomial MonicPolynomial::shifted(Complex eta) const {
  auto p = full(*this);
  const int k = degree();
  for (int i = 0; i < k; ++i)
    for (int j = k - 1; j >= i; --j) p[j] += eta * p[j + 1];
  p.pop_back();
  return MonicPolynomial(std::move(p));
}

MonicPolynomial MonicPolynomial::normalized_derivative() const {
  const int k = degree();
  if (k < 2) throw DomainError("normalized_derivative: degree must be >= 2");
  std::vector<Complex> d(k - 1);
  for (int i = 1; i < k; ++i) d[i - 1] = coefficients[i] * static_cast<double>(i) / static_cast<double>(k);
  return MonicPolynomial(std::move(d));
}

MonicPolynomial operator*(const MonicPolynomial& a, const MonicPolynomial& b) {
  const auto fa = full(a), fb = full(b);
  std::vector<Complex> c(fa.size() + fb.size() - 1);
  for (std::size_t i = 0; i < fa.size(); ++i)
    for (std::size_t j = 0; j < fb.size(); ++j) c[i + j] += fa[i] * fb[j];
  c.pop_back();
  return MonicPolynomial(std::move(c));
}

ScaledComplex sylvester_resultant(const MonicPolynomial& f, const MonicPolynomial& g) {
  const int k = f.degree(), m = g.degree();
  const int n = k + m;
  const auto ff = full(f), fg = full(g);
  std::vector<Complex> a(static_cast<std::size_t>(n) * n);
  auto at = [&](int r, int c) -> Complex& { return a[static_cast<std::size_t>(r) * n + c]; };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= k; ++j) at(i, i + j) = ff[k - j];
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= m; ++j) at(m + i, i + j) = fg[m - j];

  ScaledComplex det = ScaledComplex::one();
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
    if (at(piv, col) == Complex(0.0, 0.0)) return ScaledComplex::zero();
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(at(piv, c), at(col, c));
      det = -det;
    }
    const Complex p = at(col, col);
    det = det * ScaledComplex::from(p);
    for (int r = col + 1; r < n; ++r) {
      const Complex factor = at(r, col) / p;
      if (factor == Complex(0.0, 0.0)) continue;
      for (int c = col; c < n; ++c) at(r, c) -= factor * at(col, c);
    }
  }
  return det;
}

ScaledComplex root_product(std::span<const Complex> f_roots, std::span<const Complex> g_roots) {
  ScaledComplex r = ScaledComplex::one();
  for (Complex z : f_roots)
    for (Complex w : g_roots) r = r * ScaledComplex::from(z - w);
  return r;
}

ScaledComplex discriminant(const MonicPolynomial& f) {
  const int k = f.degree();
  if (k == 1) return ScaledComplex::one();
  // Res(f, k g) = k^k Res(f, g) for deg f = k.
  ScaledComplex r = sylvester_resultant(f, f.normalized_derivative()) *
                    ScaledComplex{Complex(1.0, 0.0), k * std::log(static_cast<double>(k))};
  return (k * (k - 1) / 2) % 2 ? -r : r;
}

ScaledComplex shifted_resultant(const MonicPolynomial& f, const MonicPolynomial& g, Complex eta) {
  return sylvester_resultant(f.shifted(eta), g);
}

ShiftedResultantReport shifted_resultant_poly(const MonicPolynomial& f, const MonicPolynomial& g,
                                              std::span<const Complex> f_roots, std::span<const Complex> g_roots,
                                              std::span<const Complex> eta_samples) {
  if (static_cast<int>(f_roots.size()) != f.degree() || static_cast<int>(g_roots.size()) != g.degree())
    throw DomainError("shifted_resultant_poly: root lists do not match degrees");
  ShiftedResultantReport rep;
  for (Complex eta : eta_samples) rep.samples.emplace_back(eta, shifted_resultant(f, g, eta));
  const int n = f.degree() * g.degree();

  Complex centroid{};
  double radius = 0.0;
  for (Complex z : f_roots) centroid += z;
  for (Complex z : g_roots) centroid += z;
  centroid /= static_cast<double>(f_roots.size() + g_roots.size());
  for (Complex z : f_roots) {
    rep.r0 = std::max(rep.r0, std::abs(z - centroid));
    radius = std::max(radius, std::abs(z));
  }
  for (Complex z : g_roots) {
    rep.r0 = std::max(rep.r0, std::abs(z - centroid));
    radius = std::max(radius, std::abs(z));
  }

  const Complex far = 1e6 * (radius > 0.0 ? radius : 1.0) * unit_phase(0.1234);
  rep.leading_ratio = (shifted_resultant(f, g, far) / ScaledComplex::from(std::pow(-far, n))).value();
  rep.leading_ok = std::abs(rep.leading_ratio - 1.0) <= 1e-3;

  // chi is a polynomial of degree n in eta: recover it from samples on a circle.
  const double rho = rep.r0 > 0.0 ? 2.0 * rep.r0 : 1.0;
  const int M = 2 * (n + 1);
  std::vector<Complex> values(M);
  for (int s = 0; s < M; ++s) values[s] = shifted_resultant(f, g, rho * unit_phase(static_cast<double>(s) / M)).value();
  rep.coefficients.resize(n);
  double scale = 0.0;
  for (int j = 0; j < n; ++j) scale = std::max(scale, binomial(n, n - j) * std::pow(2.0 * rep.r0, n - j));
  rep.bound_ok = true;
  for (int j = 0; j < n; ++j) {
    Complex acc{};
    for (int s = 0; s < M; ++s) acc += values[s] * unit_phase(-static_cast<double>(j) * s / M);
    rep.coefficients[j] = acc / (static_cast<double>(M) * std::pow(rho, j));
    const double bound = binomial(n, n - j) * std::pow(2.0 * rep.r0, n - j);
    const double mag = std::abs(rep.coefficients[j]);
    // Tolerance covers rounding in the interpolation.
    const double tol = 1e-9 * std::max(scale, 1.0);
    if (mag > bound * (1.0 + 1e-9) + tol) rep.bound_ok = false;
    if (bound > 0.0) rep.worst_bound_ratio = std::max(rep.worst_bound_ratio, mag / bound);
  }
  return rep;
}

ResonanceScan double_resonance_scan(const CocycleParams& params_template, std::int64_t ell1, std::int64_t ell2,
                                    std::int64_t t, double x0, std::span<const double> omega_grid,
                                    std::span<const double> energy_grid, double r, std::span<const double> tau_ladder,
                                    const ZeroBudget& budget) {
  if (ell1 < 1 || ell2 < 1) throw DomainError("double_resonance_scan: lengths must be >= 1");
  if (t != 0 && t <= ell1) throw DomainError("double_resonance_scan: t must exceed ell1 (or be 0 for the control)");
  if (!(r > 0.0 && r < 0.5)) throw DomainError("double_resonance_scan: r must lie in (0, 0.5)");
  if (omega_grid.empty() || energy_grid.empty()) throw DomainError("double_resonance_scan: empty grid");
  ResonanceScan scan;
  scan.ell1 = ell1;
  scan.ell2 = ell2;
  scan.t = t;
  scan.x0 = x0;
  scan.r = r;
  scan.cell_resolution = 1.0 / static_cast<double>(omega_grid.size() * energy_grid.size());
  scan.cells.resize(omega_grid.size() * energy_grid.size());
  const Complex center = unit_phase(x0);
  parallel_for(scan.cells.size(), [&](std::size_t idx) {
    const double om = omega_grid[idx / energy_grid.size()];
    const double E = energy_grid[idx % energy_grid.size()];
    CocycleParams p = params_template;
    p.omega = Frequency::irrational(om);
    p.energy = E;
    const Complex rot = unit_phase(p.omega.shift(t));
    const Evaluator first = dirichlet_evaluator(p, ell1);
    const Evaluator second = [p, ell2, rot](Complex z) { return dirichlet_det(p, z * rot, 1, ell2); };
    const ZeroSet z1 = locate_zeros_disk(first, center, r, budget);
    const ZeroSet z2 = locate_zeros_disk(second, center, r, budget);
    ResonanceCell cell{om, E, INFINITY, z1.counted(), z2.counted(), z1.incomplete || z2.incomplete};
    for (const auto& a : z1.zeros)
      for (const auto& b : z2.zeros) cell.distance = std::min(cell.distance, std::abs(a.z - b.z));
    scan.cells[idx] = cell;
  });
  static constexpr double kDefaultTau[] = {1e-8, 1e-6, 1e-4, 1e-3, 1e-2};
  const auto taus = tau_ladder.empty() ? std::span<const double>(kDefaultTau) : tau_ladder;
  for (double tau : taus) {
    const auto below = std::count_if(scan.cells.begin(), scan.cells.end(), [tau](const ResonanceCell& c) {
      return c.distance < tau;
    });
    scan.sublevel.emplace_back(tau, static_cast<double>(below) * scan.cell_resolution);
  }
  return scan;
}

}  // namespace qpc
