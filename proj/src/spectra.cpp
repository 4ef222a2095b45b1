#include "qpc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qpc/errors.hpp"
#include "qpc/kernels.hpp"
#include "qpc/lyapunov.hpp"
#include "qpc/parallel.hpp"

namespace qpc {

namespace {

// Factorisation of T - mu I with partial pivoting (LAPACK gttrf layout).
struct TridiagonalLu {
  std::vector<double> dl, d, du, du2;
  std::vector<std::size_t> ipiv;

  TridiagonalLu(std::span<const double> diag, double mu, double pivot_floor) {
    const std::size_t n = diag.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - mu;
    dl.assign(n > 0 ? n - 1 : 0, -1.0);
    du.assign(n > 0 ? n - 1 : 0, -1.0);
    du2.assign(n > 1 ? n - 2 : 0, 0.0);
    ipiv.resize(n);
    std::iota(ipiv.begin(), ipiv.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = pivot_floor;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        ipiv[i] = i + 1;
      }
    }
    for (auto& v : d)
      if (std::abs(v) < pivot_floor) v = std::copysign(pivot_floor, v == 0.0 ? 1.0 : v);
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t ip = ipiv[i];
      const double temp = b[i + 1 - ip + i] - dl[i] * b[ip];
      b[i] = b[ip];
      b[i + 1] = temp;
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t i = n >= 2 ? n - 2 : 0; i-- > 0;)
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize_vector(std::vector<double>& v) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  if (mx == 0.0) return;
  for (double& x : v) x /= mx;
  const double nrm = std::sqrt(dot(v, v));
  for (double& x : v) x /= nrm;
}

double tridiagonal_norm1(std::span<const double> diag) {
  double nrm = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double off = (i > 0 ? 1.0 : 0.0) + (i + 1 < diag.size() ? 1.0 : 0.0);
    nrm = std::max(nrm, std::abs(diag[i]) + off);
  }
  return nrm;
}

}  // namespace

std::vector<double> dirichlet_diagonal(const CocycleParams& params, double x, std::int64_t a, std::int64_t b) {
  std::vector<double> out;
  if (b < a) return out;
  out.reserve(static_cast<std::size_t>(b - a + 1));
  for (std::int64_t k = a; k <= b; ++k) out.push_back(potential_real(params.potential, x + params.omega.shift(k)));
  return out;
}

std::int32_t count_below(std::span<const double> diag, double E) {
  std::int32_t c = 0;
  kernels::sturm_counts(diag, std::span<const double>(&E, 1), std::span<std::int32_t>(&c, 1));
  return c;
}

std::int32_t count_in_open_interval(std::span<const double> diag, double lo, double hi) {
  if (!(hi > lo)) return 0;
  const double shifts[2] = {std::nextafter(lo, INFINITY), hi};
  std::int32_t c[2];
  kernels::sturm_counts(diag, shifts, c);
  return c[1] - c[0];
}

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, double tol) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  const auto [mn, mx] = std::minmax_element(diag.begin(), diag.end());
  std::vector<double> lo(n, *mn - 2.0 - 1e-12), hi(n, *mx + 2.0 + 1e-12);
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});
  std::vector<double> mids;
  std::vector<std::int32_t> counts;
  while (!active.empty()) {
    mids.resize(active.size());
    counts.resize(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) mids[i] = 0.5 * (lo[active[i]] + hi[active[i]]);
    kernels::sturm_counts(diag, mids, counts);
    std::size_t keep = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const std::size_t k = active[i];
      const double m = mids[i];
      const bool split = m > lo[k] && m < hi[k];
      if (split) {
        if (counts[i] > static_cast<std::int32_t>(k)) {
          hi[k] = m;
        } else {
          lo[k] = m;
        }
      }
      if (split && hi[k] - lo[k] > tol) active[keep++] = k;
    }
    active.resize(keep);
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = 0.5 * (lo[k] + hi[k]);
  return out;
}

std::vector<double> tridiagonal_eigenvectors(std::span<const double> diag, std::span<const double> eigenvalues) {
  const std::size_t n = diag.size();
  const std::size_t m = eigenvalues.size();
  std::vector<double> vecs(n * m);
  if (n == 0) return vecs;
  const double tnorm = tridiagonal_norm1(diag);
  const double eps = std::numeric_limits<double>::epsilon();
  const double pivot_floor = eps * std::max(tnorm, 1.0);
  const double cluster_tol = 1e-3 * std::max(tnorm, 1.0);

  std::size_t cluster_start = 0;
  std::vector<double> v(n);
  for (std::size_t j = 0; j < m; ++j) {
    if (j == 0 || eigenvalues[j] - eigenvalues[j - 1] > cluster_tol) cluster_start = j;
    const TridiagonalLu lu(diag, eigenvalues[j], pivot_floor);
    // Deterministic start vector, distinct per eigenvalue index.
    std::uint64_t state = 0x9E3779B97F4A7C15ull ^ (j * 0xBF58476D1CE4E5B9ull);
    for (auto& x : v) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      x = static_cast<double>(state >> 11) * 0x1p-53 - 0.5;
    }
    for (int iter = 0; iter < 3; ++iter) {
      lu.solve(v);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = cluster_start; i < j; ++i) {
          const std::span<const double> prev(vecs.data() + i * n, n);
          const double c = dot(prev, v);
          for (std::size_t t = 0; t < n; ++t) v[t] -= c * prev[t];
        }
      }
      normalize_vector(v);
    }
    // Sign convention: largest component positive.
    const auto big = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double sign = *big < 0.0 ? -1.0 : 1.0;
    for (std::size_t t = 0; t < n; ++t) vecs[j * n + t] = sign * v[t];
  }
  return vecs;
}

DirichletSpectrum dirichlet_spectrum(const CocycleParams& params, double x, std::int64_t N, bool want_vectors,
                                     double tol) {
  if (N < 1) throw DomainError("dirichlet_spectrum: N must be >= 1");
  DirichletSpectrum s;
  s.N = N;
  s.x = x;
  const auto diag = dirichlet_diagonal(params, x, 1, N);
  s.eigenvalues = tridiagonal_eigenvalues(diag, tol);
  for (std::size_t j = 0; j + 1 < s.eigenvalues.size(); ++j)
    s.gaps.push_back(s.eigenvalues[j + 1] - s.eigenvalues[j]);
  if (want_vectors) s.eigenvectors = tridiagonal_eigenvectors(diag, s.eigenvalues);
  return s;
}

double max_residual(const DirichletSpectrum& s, std::span<const double> diag) {
  double worst = 0.0;
  const std::size_t n = static_cast<std::size_t>(s.N);
  for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double hv = (diag[i] - s.eigenvalues[j]) * s.vector(j, i);
      if (i > 0) hv -= s.vector(j, i - 1);
      if (i + 1 < n) hv -= s.vector(j, i + 1);
      r2 += hv * hv;
    }
    worst = std::max(worst, std::sqrt(r2));
  }
  return worst;
}

double orthonormality_defect(const DirichletSpectrum& s) {
  double worst = 0.0;
  for (std::size_t j = 0; j < s.eigenvalues.size(); ++j)
    for (std::size_t k = j; k < s.eigenvalues.size(); ++k)
      worst = std::max(worst, std::abs(dot(s.column(j), s.column(k)) - (j == k ? 1.0 : 0.0)));
  return worst;
}

CharacteristicConsistency characteristic_consistency(const DirichletSpectrum& spectrum, const CocycleParams& params) {
  // |f| at an eigenvalue is compared with e^{N L}, its typical size near E_j.
  // The norm of M_N(E_j) itself is no yardstick: the eigenvalue error times
  // f'(E_j) can be as large as that norm for localized states.
  constexpr int kLyapunovGrid = 64;
  CharacteristicConsistency out;
  out.min_log_gap = INFINITY;
  const Complex z = unit_phase(spectrum.x);
  for (double e : spectrum.eigenvalues) {
    const auto p = params.with_energy(e);
    const double lf = dirichlet_det(p, z, 1, spectrum.N).log_magnitude();
    const double typical = static_cast<double>(spectrum.N) * finite_lyapunov(p, spectrum.N, kLyapunovGrid).value;
    out.max_relative = std::max(out.max_relative, std::exp(lf - typical));
    out.min_log_gap = std::min(out.min_log_gap, typical - lf);
  }
  return out;
}

double LocalizationProfile::tail_mass(std::int64_t Q) const {
  for (const auto& [q, m] : mass_outside)
    if (q == Q) return m;
  throw DomainError("LocalizationProfile: Q not computed");
}

LocalizationProfile localization(const DirichletSpectrum& spectrum, std::size_t j,
                                 std::span<const std::int64_t> extra_Q) {
  if (!spectrum.has_vectors()) throw DomainError("localization: spectrum has no eigenvectors");
  if (j >= spectrum.eigenvalues.size()) throw DomainError("localization: index out of range");
  const auto col = spectrum.column(j);
  const std::size_t n = col.size();
  std::size_t center = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(col[i]) > std::abs(col[center])) center = i;

  // mass[d] = sum of |psi|^2 at distance exactly d from the center.
  std::vector<double> by_distance(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = i > center ? i - center : center - i;
    by_distance[d] += col[i] * col[i];
  }
  std::vector<double> outside(n + 1, 0.0);  // outside[Q] = sum_{d > Q}
  for (std::size_t q = n; q-- > 0;) outside[q] = outside[q + 1] + (q + 1 < n ? by_distance[q + 1] : 0.0);

  std::vector<std::int64_t> ladder{0};
  for (std::int64_t q = 1; q < static_cast<std::int64_t>(n); q *= 2) ladder.push_back(q);
  for (auto q : extra_Q) ladder.push_back(q);
  std::sort(ladder.begin(), ladder.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

  LocalizationProfile prof;
  prof.center = static_cast<std::int64_t>(center) + 1;
  for (auto q : ladder) {
    const double m = q < 0 ? 1.0 : (q >= static_cast<std::int64_t>(n) ? 0.0 : outside[q]);
    prof.mass_outside.emplace_back(q, std::max(m, 0.0));
  }
  std::vector<double> xs, ys;
  for (std::size_t q = 1; q < n; ++q) {
    if (outside[q] > 1e-280) {
      xs.push_back(static_cast<double>(q));
      ys.push_back(std::log(outside[q]));
    }
  }
  if (xs.size() >= 2) prof.decay_rate = -fit_line(xs, ys).slope;
  return prof;
}

std::vector<std::size_t> indices_without_smallest_gaps(const DirichletSpectrum& spectrum, double q) {
  const std::size_t m = spectrum.eigenvalues.size();
  std::vector<double> nearest(m, INFINITY);
  for (std::size_t j = 0; j < m; ++j) {
    if (j > 0) nearest[j] = std::min(nearest[j], spectrum.gaps[j - 1]);
    if (j + 1 < m) nearest[j] = std::min(nearest[j], spectrum.gaps[j]);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nearest[a] < nearest[b]; });
  const auto drop = static_cast<std::size_t>(std::ceil(q * static_cast<double>(m)));
  std::vector<std::size_t> keep(order.begin() + std::min(drop, m), order.end());
  std::sort(keep.begin(), keep.end());
  return keep;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double w = pos - static_cast<double>(lo);
  if (w == 0.0 || values[lo] == values[hi]) return values[lo];
  return values[lo] + w * (values[hi] - values[lo]);
}

GapStats min_gap_stats(const CocycleParams& params, std::int64_t N, int x_grid,
                       std::optional<std::pair<double, double>> window, std::span<const double> delta_ladder) {
  if (N < 2) throw DomainError("min_gap_stats: N must be >= 2");
  if (x_grid < 1) throw DomainError("min_gap_stats: x_grid must be >= 1");
  GapStats st;
  st.N = N;
  st.x_grid = x_grid;
  st.min_gap.assign(static_cast<std::size_t>(x_grid), INFINITY);
  std::vector<std::vector<double>> per_x(static_cast<std::size_t>(x_grid));
  parallel_for(per_x.size(), [&](std::size_t i) {
    const auto s = dirichlet_spectrum(params, static_cast<double>(i) / x_grid, N, false);
    for (std::size_t j = 0; j < s.gaps.size(); ++j) {
      if (window && (s.eigenvalues[j] < window->first || s.eigenvalues[j + 1] > window->second)) continue;
      per_x[i].push_back(s.gaps[j]);
      st.min_gap[i] = std::min(st.min_gap[i], s.gaps[j]);
    }
  });
  std::vector<double> pooled;
  for (const auto& g : per_x) {
    pooled.insert(pooled.end(), g.begin(), g.end());
    for (double v : g)
      if (!(v > 0.0)) st.all_positive = false;
  }
  static constexpr double kQuantiles[] = {0.0, 0.01, 0.05, 0.25, 0.5};
  for (double q : kQuantiles) {
    st.min_gap_quantiles.emplace_back(q, quantile(st.min_gap, q));
    if (!pooled.empty()) st.pooled_quantiles.emplace_back(q, quantile(pooled, q));
  }
  static constexpr double kDefaultLadder[] = {0.3, 0.5, 0.7};
  const std::span<const double> ladder = delta_ladder.empty() ? std::span<const double>(kDefaultLadder) : delta_ladder;
  for (double d : ladder) {
    const double thr = std::exp(-std::pow(static_cast<double>(N), d));
    const auto below = std::count_if(st.min_gap.begin(), st.min_gap.end(), [thr](double g) { return g < thr; });
    st.small_gap_fraction.emplace_back(d, static_cast<double>(below) / x_grid);
  }
  return st;
}

WegnerCurve wegner_count(const CocycleParams& params, std::int64_t N, double E, std::span<const double> H_ladder,
                         int x_grid) {
  if (x_grid < 1) throw DomainError("wegner_count: x_grid must be >= 1");
  for (double h : H_ladder)
    if (!(h >= 1.0)) throw DomainError("wegner_count: H values must be >= 1");
  WegnerCurve c;
  c.N = N;
  c.E = E;
  c.x_grid = x_grid;
  const std::size_t nh = H_ladder.size();
  std::vector<std::int32_t> hits(static_cast<std::size_t>(x_grid) * nh, 0);
  parallel_for(static_cast<std::size_t>(x_grid), [&](std::size_t i) {
    const auto diag = dirichlet_diagonal(params, static_cast<double>(i) / x_grid, 1, N);
    std::vector<double> shifts(2 * nh);
    for (std::size_t h = 0; h < nh; ++h) {
      const double r = std::exp(-H_ladder[h]);
      shifts[2 * h] = std::nextafter(E - r, INFINITY);
      shifts[2 * h + 1] = E + r;
    }
    std::vector<std::int32_t> counts(2 * nh);
    kernels::sturm_counts(diag, shifts, counts);
    for (std::size_t h = 0; h < nh; ++h) hits[i * nh + h] = counts[2 * h + 1] > counts[2 * h] ? 1 : 0;
  });
  std::vector<double> xs, ys;
  for (std::size_t h = 0; h < nh; ++h) {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(x_grid); ++i) total += hits[i * nh + h];
    const double f = static_cast<double>(total) / x_grid;
    c.points.emplace_back(H_ladder[h], f);
    if (f > 0.0) {
      xs.push_back(H_ladder[h]);
      ys.push_back(std::log(f));
    }
  }
  c.fitted_points = xs.size();
  if (xs.size() >= 2) {
    c.slope = fit_line(xs, ys).slope;
    const double logn = std::log(static_cast<double>(N));
    c.scaled_slope = c.slope * logn * logn;
  }
  return c;
}

std::vector<double> rellich_velocities(const DirichletSpectrum& spectrum, const CocycleParams& params) {
  if (!spectrum.has_vectors()) throw DomainError("rellich_velocities: spectrum has no eigenvectors");
  const std::size_t n = static_cast<std::size_t>(spectrum.N);
  std::vector<double> dv(n);
  for (std::size_t i = 0; i < n; ++i)
    dv[i] = potential_derivative(params.potential, spectrum.x + params.omega.shift(static_cast<std::int64_t>(i) + 1));
  std::vector<double> out(spectrum.eigenvalues.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += spectrum.vector(j, i) * spectrum.vector(j, i) * dv[i];
    out[j] = s;
  }
  return out;
}

RellichVelocity rellich_velocity(const CocycleParams& params, double x, std::int64_t N, std::size_t j) {
  if (j >= static_cast<std::size_t>(N)) throw DomainError("rellich_velocity: index out of range");
  constexpr double kStep = 1e-6;
  const auto s = dirichlet_spectrum(params, x, N, true);
  RellichVelocity out;
  out.velocity = rellich_velocities(s, params)[j];
  const double plus = dirichlet_spectrum(params, x + kStep, N, false).eigenvalues[j];
  const double minus = dirichlet_spectrum(params, x - kStep, N, false).eigenvalues[j];
  out.finite_difference = (plus - minus) / (2.0 * kStep);
  // Noise floor of the difference quotient: eigenvalue rounding over the step.
  const double floor = 1e-6 * std::max(1.0, params.potential.sup_bound());
  const double denom = std::max({std::abs(out.velocity), std::abs(out.finite_difference), floor});
  out.relative_difference = std::abs(out.velocity - out.finite_difference) / denom;
  if (out.relative_difference > 1e-3)
    out.warning = "numerical instability: perturbative and finite-difference velocities differ by " +
                  std::to_string(out.relative_difference);
  return out;
}

RellichScan rellich_scan(const CocycleParams& params, std::int64_t N, int x_grid, double threshold) {
  RellichScan scan;
  scan.N = N;
  scan.x_grid = x_grid;
  scan.threshold = threshold;
  std::vector<std::vector<double>> vel(static_cast<std::size_t>(x_grid));
  parallel_for(vel.size(), [&](std::size_t i) {
    vel[i] = rellich_velocities(dirichlet_spectrum(params, static_cast<double>(i) / x_grid, N, true), params);
  });
  std::size_t small = 0, total = 0;
  scan.min_abs_velocity = INFINITY;
  for (const auto& v : vel)
    for (double s : v) {
      ++total;
      if (std::abs(s) < threshold) ++small;
      scan.min_abs_velocity = std::min(scan.min_abs_velocity, std::abs(s));
    }
  scan.small_fraction = total ? static_cast<double>(small) / total : 0.0;
  return scan;
}

}  // namespace qpc
