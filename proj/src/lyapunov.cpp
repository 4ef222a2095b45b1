#include "qpc/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qpc/errors.hpp"
#include "qpc/kernels.hpp"
#include "qpc/parallel.hpp"

namespace qpc {

namespace {

constexpr std::size_t kTileLanes = 64;

void check_grid(const CocycleParams& params, int grid, double y) {
  if (grid < 8) throw DomainError("Lyapunov: grid must be >= 8");
  if (!(std::abs(y) < params.potential.rho0 / 2.0)) throw DomainError("Lyapunov: |y| must be below rho0 / 2");
}

std::vector<double> real_log_norm_samples(const CocycleParams& params, std::int64_t n, int grid) {
  const double energy = params.energy.real();
  std::vector<Complex> site(static_cast<std::size_t>(n));
  for (std::int64_t k = 1; k <= n; ++k) site[k - 1] = unit_phase(params.omega.shift(k));

  std::vector<double> out(static_cast<std::size_t>(grid));
  const std::size_t tiles = (out.size() + kTileLanes - 1) / kTileLanes;
  parallel_for(tiles, [&](std::size_t t) {
    const std::size_t begin = t * kTileLanes;
    const std::size_t lanes = std::min(kTileLanes, out.size() - begin);
    std::vector<double> diag(static_cast<std::size_t>(n) * lanes);
    for (std::size_t l = 0; l < lanes; ++l) {
      const Complex u = unit_phase(static_cast<double>(begin + l) / grid);
      for (std::size_t k = 0; k < site.size(); ++k)
        diag[k * lanes + l] = potential_eval(params.potential, u * site[k]).real() - energy;
    }
    kernels::transfer_log_norms(diag, lanes, std::span<double>(out).subspan(begin, lanes));
  });
  return out;
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sample_std_error(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1) / v.size());
}

}  // namespace

std::vector<double> log_norm_samples(const CocycleParams& params, std::int64_t n, int grid, double y) {
  if (n < 1) throw DomainError("log_norm_samples: n must be >= 1");
  if (grid < 1) throw DomainError("log_norm_samples: grid must be >= 1");
  if (params.energy.imag() == 0.0 && y == 0.0) return real_log_norm_samples(params, n, grid);
  std::vector<double> out(static_cast<std::size_t>(grid));
  parallel_for(out.size(), [&](std::size_t j) {
    out[j] = log_norm(monodromy(params, phase_point(static_cast<double>(j) / grid, y), n));
  });
  return out;
}

std::vector<double> log_det_samples(const CocycleParams& params, std::int64_t n, int grid, double y) {
  if (n < 1) throw DomainError("log_det_samples: n must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(grid));
  parallel_for(out.size(), [&](std::size_t j) {
    out[j] = dirichlet_det(params, phase_point(static_cast<double>(j) / grid, y), 1, n).log_magnitude();
  });
  return out;
}

LyapunovEstimate finite_lyapunov(const CocycleParams& params, std::int64_t n, int grid, double y) {
  check_grid(params, grid, y);
  auto samples = log_norm_samples(params, n, grid, y);
  for (double& s : samples) s /= static_cast<double>(n);
  LyapunovEstimate est;
  est.n = n;
  est.value = mean(samples);
  est.grid_size = grid;
  est.y = y;
  est.std_error = sample_std_error(samples);
  est.energy = params.energy;
  return est;
}

ApReport ap_check(std::span<const ScaledMatrix2> factors, double mu_floor, double constant) {
  if (factors.empty()) throw DomainError("ap_check: no factors");
  ApReport rep;
  rep.n = factors.size();
  rep.constant = constant;

  double max_log_det = -std::numeric_limits<double>::infinity();
  for (const auto& f : factors) max_log_det = std::max(max_log_det, log_abs_det(f));
  // Scaling every factor by kappa^{-1/2} brings max |det| down to 1.
  std::vector<ScaledMatrix2> a(factors.begin(), factors.end());
  if (max_log_det > 0.0) {
    rep.det_rescale = -0.5 * max_log_det;
    for (auto& f : a) {
      f.log_scale += rep.det_rescale;
      f.det.log_abs += 2.0 * rep.det_rescale;
    }
  }

  std::vector<double> single(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) single[j] = a[j].is_zero() ? -INFINITY : log_norm(a[j]);
  rep.log_mu = *std::min_element(single.begin(), single.end());
  const double n = static_cast<double>(a.size());
  rep.hypothesis_large = rep.log_mu >= std::log(mu_floor) && rep.log_mu > std::log(n);
  rep.bound = constant * n * std::exp(-rep.log_mu);

  std::vector<double> pair(a.size() > 0 ? a.size() - 1 : 0);
  bool diff_ok = true;
  for (std::size_t j = 0; j + 1 < a.size(); ++j) {
    const ScaledMatrix2 prod = mat_mul(a[j + 1], a[j]);
    pair[j] = prod.is_zero() ? -INFINITY : log_norm(prod);
    if (!(single[j + 1] + single[j] - pair[j] < 0.5 * rep.log_mu)) diff_ok = false;
  }
  rep.hypothesis_diff = diff_ok;
  if (!(rep.hypothesis_large && rep.hypothesis_diff)) return rep;

  ScaledMatrix2 total = a[0];
  for (std::size_t j = 1; j < a.size(); ++j) total = mat_mul(a[j], total);
  double s = log_norm(total);
  for (std::size_t j = 1; j + 1 < a.size(); ++j) s += single[j];
  for (double p : pair) s -= p;
  rep.gap = std::abs(s);
  rep.implied_constant = *rep.gap / n * std::exp(rep.log_mu);
  return rep;
}

std::vector<ScaledMatrix2> random_hyperbolic_chain(std::mt19937_64& rng, std::size_t n, double log_mu_lo,
                                                   double log_mu_hi) {
  if (!(log_mu_hi >= log_mu_lo)) throw DomainError("random_hyperbolic_chain: empty log mu range");
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi), lm(log_mu_lo, log_mu_hi);
  auto rot = [](double t) { return Mat2{std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; };
  std::vector<ScaledMatrix2> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = angle(rng), b = angle(rng), l = lm(rng);
    // Scale e^{l} is carried in log form. The mantissa determinant would be
    // lost to cancellation, so the exact value 1 is set instead.
    const Mat2 d{1.0, 0.0, 0.0, std::exp(-2.0 * l)};
    ScaledMatrix2 m = normalize(rot(a) * d * rot(b), l);
    m.det = ScaledComplex::one();
    out.push_back(m);
  }
  return out;
}

ApExtrapolation ap_extrapolate(const CocycleParams& params, std::int64_t ell, std::int64_t N, int grid,
                               double gate, double constant) {
  if (ell < 32) throw DomainError("ap_extrapolate: ell must be >= 32");
  if (N < ell * ell) throw DomainError("ap_extrapolate: N must be >= ell^2");
  const LyapunovEstimate short_scale = finite_lyapunov(params, ell, grid);
  if (short_scale.value < gate)
    throw RegimeError("ap_extrapolate: L_ell = " + std::to_string(short_scale.value) +
                      " below positive-regime gate");
  const LyapunovEstimate long_scale = finite_lyapunov(params, 2 * ell, grid);

  ApExtrapolation out;
  out.extrapolated = long_scale;
  out.extrapolated.n = ell;
  out.extrapolated.value = 2.0 * long_scale.value - short_scale.value;
  out.extrapolated.std_error = std::hypot(2.0 * long_scale.std_error, short_scale.std_error);
  out.reference = finite_lyapunov(params, N, grid);
  out.difference = out.extrapolated.value - out.reference.value;
  out.tolerance = std::max(5.0 * std::hypot(out.extrapolated.std_error, out.reference.std_error),
                           constant * static_cast<double>(ell) / static_cast<double>(N));
  out.consistent = std::abs(out.difference) <= out.tolerance;
  return out;
}

UniformUpperReport uniform_upper_check(const CocycleParams& params, std::int64_t N, int grid) {
  const auto samples = log_norm_samples(params, N, grid);
  UniformUpperReport rep;
  rep.N = N;
  const double total = mean(samples);
  rep.mean_value = total / static_cast<double>(N);
  double max_dev = -INFINITY, sum_dev = 0.0;
  for (double s : samples) {
    max_dev = std::max(max_dev, s - total);
    sum_dev += s - total;
  }
  rep.max_deviation = max_dev;
  rep.mean_deviation = sum_dev / samples.size();
  const double logn = std::log(static_cast<double>(N));
  rep.ratio_log2 = max_dev / (logn * logn);
  return rep;
}

UniformUpperSweep uniform_upper_sweep(const CocycleParams& params, std::span<const std::int64_t> Ns, int grid) {
  UniformUpperSweep sweep;
  std::vector<double> lx, ly;
  for (auto N : Ns) {
    sweep.reports.push_back(uniform_upper_check(params, N, grid));
    if (sweep.reports.back().max_deviation > 0.0) {
      lx.push_back(std::log(static_cast<double>(N)));
      ly.push_back(std::log(sweep.reports.back().max_deviation));
    }
  }
  if (lx.size() >= 2) sweep.growth_exponent = fit_line(lx, ly).slope;
  return sweep;
}

namespace {

struct LdtSamples {
  std::vector<double> values;
  double center = 0.0;
};

LdtSamples ldt_samples(const CocycleParams& params, std::int64_t n, int grid, bool use_determinant) {
  if (grid < 1) throw DomainError("ldt_measure: grid must be >= 1");
  LdtSamples s;
  const auto norms = log_norm_samples(params, n, grid);
  s.center = mean(norms);
  s.values = use_determinant ? log_det_samples(params, n, grid) : norms;
  return s;
}

double deviation_fraction(const LdtSamples& s, double threshold) {
  std::size_t count = 0;
  for (double v : s.values)
    if (!(std::abs(v - s.center) <= threshold)) ++count;
  return static_cast<double>(count) / s.values.size();
}

}  // namespace

LdtEstimate ldt_measure(const CocycleParams& params, std::int64_t n, double delta, int grid, bool use_determinant) {
  if (!(delta > 0.0)) throw DomainError("ldt_measure: delta must be positive");
  const auto s = ldt_samples(params, n, grid, use_determinant);
  return {n, delta, deviation_fraction(s, delta * n), grid, use_determinant};
}

LdtSweep ldt_sweep(const CocycleParams& params, std::int64_t n, std::span<const double> deltas, int grid,
                   bool use_determinant) {
  const auto s = ldt_samples(params, n, grid, use_determinant);
  LdtSweep sweep;
  std::vector<double> x, y;
  for (double d : deltas) {
    if (!(d > 0.0)) throw DomainError("ldt_sweep: delta must be positive");
    const double f = deviation_fraction(s, d * n);
    sweep.points.push_back({n, d, f, grid, use_determinant});
    if (f > 0.0) {
      x.push_back(d * n);
      y.push_back(std::log(f));
    }
  }
  sweep.fitted_points = x.size();
  if (x.size() >= 2) {
    const auto fit = fit_line(x, y);
    sweep.rate = -fit.slope;
    sweep.log_prefactor = fit.intercept;
  }
  return sweep;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need >= 2 paired points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace qpc
