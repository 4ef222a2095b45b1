#include "qpc/cocycle.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "qpc/errors.hpp"

namespace qpc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double t) { return t - std::floor(t); }

// Shared scale recursion state for f_{n-1}, f_{n-2}.
struct DetRecursion {
  Complex cur{1.0, 0.0};
  Complex prev{0.0, 0.0};
  double log_scale = 0.0;

  void step(Complex diag) {
    const Complex next = diag * cur - prev;
    prev = cur;
    cur = next;
    const double s = std::max(std::abs(cur.real()) + std::abs(cur.imag()),
                              std::abs(prev.real()) + std::abs(prev.imag()));
    if (s > 0x1p64 || (s < 0x1p-64 && s > 0.0)) {
      int e = 0;
      std::frexp(s, &e);
      cur = {std::ldexp(cur.real(), -e), std::ldexp(cur.imag(), -e)};
      prev = {std::ldexp(prev.real(), -e), std::ldexp(prev.imag(), -e)};
      log_scale += e * std::numbers::ln2;
    }
  }
};

}  // namespace

Complex unit_phase(double t) {
  const double r = frac(t);
  return {std::cos(kTwoPi * r), std::sin(kTwoPi * r)};
}

Complex phase_point(double x, double y) { return std::exp(-kTwoPi * y) * unit_phase(x); }

Frequency Frequency::irrational(double value, double low_part) {
  Frequency f;
  const double v = frac(value);
  f.hi_ = v;
  f.lo_ = low_part;
  return f;
}

Frequency Frequency::rational(std::int64_t p, std::int64_t q) {
  if (q <= 0) throw DomainError("Frequency: denominator must be positive");
  if (std::gcd(p, q) != 1) throw DomainError("Frequency: p/q must be in lowest terms");
  Frequency f;
  f.p_ = ((p % q) + q) % q;
  f.q_ = q;
  f.hi_ = static_cast<double>(f.p_) / static_cast<double>(q);
  return f;
}

// Double-double constants, hi + lo correct to ~1e-33. A long double
// computation only gives ~1e-20, which frac(k omega) amplifies by k.
Frequency Frequency::sqrt2() { return irrational(0.41421356237309503, 1.4349369327986523e-17); }

Frequency Frequency::golden() { return irrational(0.6180339887498949, -5.432115203682506e-17); }

Frequency Frequency::convergent(const std::string& tag, std::int64_t min_denominator) {
  // Partial quotients: sqrt2 - 1 = [0; 2, 2, ...], golden = [0; 1, 1, ...].
  std::int64_t a = 0;
  if (tag == "sqrt2") {
    a = 2;
  } else if (tag == "golden") {
    a = 1;
  } else {
    throw DomainError("Frequency: unknown quadratic irrational tag '" + tag + "'");
  }
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = a;
  while (q1 < min_denominator) {
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
  }
  return rational(p1, q1);
}

double Frequency::shift(std::int64_t k) const {
  if (is_rational()) {
    const auto r = static_cast<__int128>(k) * p_ % q_;
    const auto m = static_cast<std::int64_t>(r < 0 ? r + q_ : r);
    return static_cast<double>(m) / static_cast<double>(q_);
  }
  const double kd = static_cast<double>(k);
  const double prod = kd * hi_;
  const double err = std::fma(kd, hi_, -prod);
  return frac(frac(prod) + (err + kd * lo_));
}

TrigPotential TrigPotential::zero() {
  TrigPotential p;
  p.coupling = 0.0;
  p.degree = 1;
  p.coefficients.assign(3, Complex{});
  return p;
}

TrigPotential TrigPotential::almost_mathieu(double coupling) { return cosine(coupling, 1); }

TrigPotential TrigPotential::cosine(double coupling, int harmonic) {
  if (harmonic < 1) throw DomainError("TrigPotential: harmonic must be >= 1");
  TrigPotential p;
  p.coupling = coupling;
  p.degree = harmonic;
  p.coefficients.assign(2 * harmonic + 1, Complex{});
  p.coefficients[0] = 0.5;
  p.coefficients[2 * harmonic] = 0.5;
  return p;
}

TrigPotential TrigPotential::from_terms(double coupling, double rho0,
                                        const std::vector<std::pair<int, Complex>>& terms) {
  int degree = 1;
  for (const auto& [k, v] : terms) degree = std::max(degree, std::abs(k));
  TrigPotential p;
  p.coupling = coupling;
  p.rho0 = rho0;
  p.degree = degree;
  p.coefficients.assign(2 * degree + 1, Complex{});
  std::vector<bool> given(2 * degree + 1, false);
  for (const auto& [k, v] : terms) {
    if (given[k + degree]) throw DomainError("TrigPotential: duplicate coefficient index");
    p.coefficients[k + degree] = v;
    given[k + degree] = true;
  }
  for (int k = -degree; k <= degree; ++k) {
    if (!given[k + degree] && given[-k + degree]) p.coefficients[k + degree] = std::conj(p.coefficients[-k + degree]);
  }
  p.validate();
  return p;
}

Complex TrigPotential::coefficient(int k) const {
  if (std::abs(k) > degree) return {};
  return coefficients[k + degree];
}

void TrigPotential::validate() const {
  if (degree < 1) throw DomainError("TrigPotential: degree must be positive");
  if (static_cast<int>(coefficients.size()) != 2 * degree + 1)
    throw DomainError("TrigPotential: coefficient count does not match degree");
  if (!(rho0 > 0.0)) throw DomainError("TrigPotential: rho0 must be positive");
  if (!std::isfinite(coupling)) throw DomainError("TrigPotential: coupling must be finite");
  for (int k = 0; k <= degree; ++k) {
    const Complex d = coefficient(k) - std::conj(coefficient(-k));
    const double scale = std::max(1.0, std::abs(coefficient(k)));
    if (std::abs(d) > 1e-12 * scale)
      throw DomainError("TrigPotential: coefficients violate v(-k) = conj(v(k)) at k = " + std::to_string(k));
  }
}

double TrigPotential::sup_bound() const {
  double s = 0.0;
  for (const auto& c : coefficients) s += std::abs(c);
  return std::abs(coupling) * s;
}

bool TrigPotential::is_zero() const {
  if (coupling == 0.0) return true;
  for (const auto& c : coefficients)
    if (c != Complex{}) return false;
  return true;
}

Complex potential_eval(const TrigPotential& p, Complex z) {
  if (z == Complex{}) throw DomainError("potential_eval: z = 0");
  Complex sum = p.coefficient(0);
  Complex up = 1.0, down = 1.0;
  const Complex zinv = 1.0 / z;
  for (int k = 1; k <= p.degree; ++k) {
    up *= z;
    down *= zinv;
    sum += p.coefficient(k) * up + p.coefficient(-k) * down;
  }
  return p.coupling * sum;
}

double potential_real(const TrigPotential& p, double x) {
  double sum = p.coefficient(0).real();
  for (int k = 1; k <= p.degree; ++k) sum += 2.0 * (p.coefficient(k) * unit_phase(k * x)).real();
  return p.coupling * sum;
}

double potential_derivative(const TrigPotential& p, double x) {
  // d/dx [2 Re(v_k e(kx))] = 2 Re(2 pi i k v_k e(kx)).
  double sum = 0.0;
  for (int k = 1; k <= p.degree; ++k)
    sum += 2.0 * (Complex(0.0, kTwoPi * k) * p.coefficient(k) * unit_phase(k * x)).real();
  return p.coupling * sum;
}

Complex site_point(const CocycleParams& params, Complex z, std::int64_t k) {
  return z * unit_phase(params.omega.shift(k));
}

std::vector<Complex> site_diagonal(const CocycleParams& params, Complex z, std::int64_t a, std::int64_t b) {
  std::vector<Complex> out;
  if (b < a) return out;
  out.reserve(static_cast<std::size_t>(b - a + 1));
  for (std::int64_t k = a; k <= b; ++k)
    out.push_back(potential_eval(params.potential, site_point(params, z, k)) - params.energy);
  return out;
}

ScaledMatrix2 one_step(const CocycleParams& params, Complex z) {
  const Complex v = potential_eval(params.potential, z) - params.energy;
  ScaledMatrix2 m = normalize(Mat2{v, -1.0, 1.0, 0.0});
  m.det = ScaledComplex::one();
  return m;
}

ScaledMatrix2 monodromy_window(const CocycleParams& params, Complex z, std::int64_t a, std::int64_t b) {
  ScaledMatrix2 m = normalize(Mat2::identity());
  for (std::int64_t k = a; k <= b; ++k) m = mat_mul(one_step(params, site_point(params, z, k)), m);
  return m;
}

ScaledMatrix2 monodromy(const CocycleParams& params, Complex z, std::int64_t n) {
  if (n < 1) throw DomainError("monodromy: n must be >= 1");
  return monodromy_window(params, z, 1, n);
}

ScaledComplex dirichlet_det(const CocycleParams& params, Complex z, std::int64_t a, std::int64_t b) {
  if (b == a - 1) return ScaledComplex::one();
  if (b == a - 2) return ScaledComplex::zero();
  if (b < a) throw DomainError("dirichlet_det: empty window");
  DetRecursion rec;
  for (std::int64_t k = a; k <= b; ++k)
    rec.step(potential_eval(params.potential, site_point(params, z, k)) - params.energy);
  return ScaledComplex::from(rec.cur, rec.log_scale);
}

ScaledMatrix2 impurity_monodromy(const CocycleParams& params, Complex z, std::int64_t n,
                                 const ImpuritySpec& spec) {
  if (n < 1) throw DomainError("impurity_monodromy: n must be >= 1");
  for (std::size_t i = 0; i < spec.positions.size(); ++i) {
    const int k = spec.positions[i];
    if (k < 1 || k > n) throw DomainError("impurity_monodromy: position outside [1, n]");
    if (i > 0 && k <= spec.positions[i - 1]) throw DomainError("impurity_monodromy: positions not increasing");
  }
  ScaledMatrix2 projection = normalize(Mat2{-1.0, 0.0, 0.0, 0.0});
  ScaledMatrix2 m = normalize(Mat2::identity());
  std::size_t next = 0;
  for (std::int64_t k = 1; k <= n; ++k) {
    if (next < spec.positions.size() && spec.positions[next] == k) {
      m = mat_mul(projection, m);
      ++next;
    } else {
      m = mat_mul(one_step(params, site_point(params, z, k)), m);
    }
  }
  return m;
}

ScaledComplex green_entry(const CocycleParams& params, Complex z, std::int64_t N, std::int64_t j,
                          std::int64_t k, double eta) {
  if (!(1 <= j && j <= k && k <= N)) throw DomainError("green_entry: need 1 <= j <= k <= N");
  const CocycleParams shifted = params.with_energy(params.energy + Complex(0.0, eta));
  const ScaledComplex denom = dirichlet_det(shifted, z, 1, N);
  if (denom.is_zero()) throw PoleError("green_entry: f_[1,N] vanishes");
  return dirichlet_det(shifted, z, 1, j - 1) * dirichlet_det(shifted, z, k + 1, N) / denom;
}

}  // namespace qpc
