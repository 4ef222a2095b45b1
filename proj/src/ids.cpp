#include "qpc/ids.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpc/errors.hpp"
#include "qpc/kernels.hpp"
#include "qpc/lyapunov.hpp"
#include "qpc/parallel.hpp"
#include "qpc/spectra.hpp"

namespace qpc {

namespace {

constexpr std::size_t kPhaseBlock = 64;

std::size_t steps_for(const IdsTable& table, double eta) {
  const double h = table.spacing();
  if (!(eta >= h * (1.0 - 1e-9)))
    throw ResolutionError("IDS scan: eta = " + std::to_string(eta) + " is below the grid spacing " +
                          std::to_string(h));
  const auto m = static_cast<std::size_t>(std::llround(eta / h));
  if (2 * m >= table.values.size()) throw DomainError("IDS scan: eta exceeds half the grid span");
  return m;
}

std::vector<double> increments(const IdsTable& table, std::size_t m) {
  std::vector<double> out;
  for (std::size_t i = m; i + m < table.values.size(); ++i) out.push_back(table.values[i + m] - table.values[i - m]);
  return out;
}

// u log|u| - u, an antiderivative of log|u|.
double log_antiderivative(double u) { return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u; }

}  // namespace

double IdsTable::spacing() const {
  if (energy_grid.size() < 2) throw DomainError("IdsTable: grid needs two points");
  const double h = (energy_grid.back() - energy_grid.front()) / static_cast<double>(energy_grid.size() - 1);
  for (std::size_t i = 0; i + 1 < energy_grid.size(); ++i)
    if (std::abs(energy_grid[i + 1] - energy_grid[i] - h) > 1e-6 * h)
      throw DomainError("IdsTable: energy grid is not uniform");
  return h;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 1 || !(hi > lo)) throw DomainError("uniform_grid: need n >= 1 and hi > lo");
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  return g;
}

std::vector<double> ids_quantiles(const IdsTable& table, std::span<const double> levels) {
  std::vector<double> out;
  for (double level : levels) {
    const auto it = std::lower_bound(table.values.begin(), table.values.end(), level);
    if (it == table.values.end()) throw DomainError("ids_quantiles: level above the table range");
    out.push_back(table.energy_grid[static_cast<std::size_t>(it - table.values.begin())]);
  }
  return out;
}

std::vector<double> midpoint_levels(int count) {
  if (count < 1) throw DomainError("midpoint_levels: count must be >= 1");
  std::vector<double> l;
  for (int i = 1; i <= count; ++i) l.push_back((2.0 * i - 1.0) / (2.0 * count));
  return l;
}

double free_ids(double E) {
  if (E <= -2.0) return 0.0;
  if (E >= 2.0) return 1.0;
  return std::acos(-E / 2.0) / std::numbers::pi;
}

IdsTable ids_table(const CocycleParams& params, std::int64_t N, int x_grid, std::span<const double> energy_grid,
                   CountingMode mode) {
  if (N < 1) throw DomainError("ids_table: N must be >= 1");
  if (x_grid < 1) throw DomainError("ids_table: x_grid must be >= 1");
  if (!std::is_sorted(energy_grid.begin(), energy_grid.end())) throw DomainError("ids_table: energy grid not sorted");
  const std::size_t m = energy_grid.size();
  const std::size_t blocks = (static_cast<std::size_t>(x_grid) + kPhaseBlock - 1) / kPhaseBlock;
  // Integer sums are exact, so the reduction order cannot change the result.
  std::vector<std::int64_t> s1(blocks * m, 0), s2(blocks * m, 0);
  parallel_for(blocks, [&](std::size_t blk) {
    std::vector<std::int32_t> counts(m);
    const std::size_t end = std::min<std::size_t>((blk + 1) * kPhaseBlock, x_grid);
    for (std::size_t j = blk * kPhaseBlock; j < end; ++j) {
      const auto diag = dirichlet_diagonal(params, static_cast<double>(j) / x_grid, 1, N);
      if (mode == CountingMode::exact_sturm) {
        kernels::sturm_counts(diag, energy_grid, counts);
      } else {
        const auto ev = tridiagonal_eigenvalues(diag);
        for (std::size_t e = 0; e < m; ++e)
          counts[e] = static_cast<std::int32_t>(std::lower_bound(ev.begin(), ev.end(), energy_grid[e]) - ev.begin());
      }
      for (std::size_t e = 0; e < m; ++e) {
        s1[blk * m + e] += counts[e];
        s2[blk * m + e] += static_cast<std::int64_t>(counts[e]) * counts[e];
      }
    }
  });
  IdsTable t;
  t.energy_grid.assign(energy_grid.begin(), energy_grid.end());
  t.values.resize(m);
  t.std_error.resize(m);
  t.N = N;
  t.x_samples = x_grid;
  t.counting_mode = mode;
  const double n = static_cast<double>(x_grid);
  const double vol = static_cast<double>(N);
  for (std::size_t e = 0; e < m; ++e) {
    std::int64_t a = 0, b = 0;
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      a += s1[blk * m + e];
      b += s2[blk * m + e];
    }
    const double mean = static_cast<double>(a) / n;
    t.values[e] = mean / vol;
    if (x_grid > 1) {
      const double var = std::max(0.0, (static_cast<double>(b) / n - mean * mean) * n / (n - 1.0));
      t.std_error[e] = std::sqrt(var / n) / vol;
    }
  }
  return t;
}

HolderReport holder_scan(const IdsTable& table, std::span<const double> eta_ladder, int k0) {
  if (k0 < 1) throw DomainError("holder_scan: k0 must be >= 1");
  HolderReport rep;
  rep.k0 = k0;
  const double h = table.spacing();
  std::vector<double> lx, ly;
  for (double eta : eta_ladder) {
    const std::size_t m = steps_for(table, eta);
    const auto inc = increments(table, m);
    const double sup = *std::max_element(inc.begin(), inc.end());
    const double eff = static_cast<double>(m) * h;
    rep.modulus.emplace_back(eff, sup);
    if (sup > 0.0) {
      lx.push_back(std::log(eff));
      ly.push_back(std::log(sup));
    }
  }
  if (lx.size() >= 2) rep.exponent = fit_line(lx, ly).slope;
  rep.flagged = rep.exponent < 1.0 / (2.0 * k0) - 0.15;
  return rep;
}

LipschitzReport lipschitz_scan(const IdsTable& table, double eta, double q) {
  if (!(q >= 0.0 && q < 0.2)) throw DomainError("lipschitz_scan: q must lie in [0, 0.2)");
  const std::size_t m = steps_for(table, eta);
  auto inc = increments(table, m);
  std::sort(inc.begin(), inc.end(), std::greater<>());
  LipschitzReport rep;
  rep.eta = static_cast<double>(m) * table.spacing();
  rep.q = q;
  rep.energies = inc.size();
  rep.discarded = std::min(inc.size() - 1, static_cast<std::size_t>(std::ceil(q * static_cast<double>(inc.size()))));
  rep.unrestricted_ratio = inc.front() / rep.eta;
  rep.max_ratio = inc[rep.discarded] / rep.eta;
  return rep;
}

double log_potential(const IdsTable& table, double E) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < table.values.size(); ++i) {
    const double dn = table.values[i + 1] - table.values[i];
    if (dn == 0.0) continue;
    const double lo = table.energy_grid[i] - E, hi = table.energy_grid[i + 1] - E;
    const double h = hi - lo;
    // Exact cell average of log|E - E'| for N linear across the cell; for E
    // at the cell midpoint this is log(h / 2) - 1.
    sum += dn * (log_antiderivative(hi) - log_antiderivative(lo)) / h;
  }
  return sum;
}

double ThoulessReport::max_abs_residual() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.residual));
  return m;
}

ThoulessReport thouless_check(const IdsTable& table, std::span<const double> energies, const CocycleParams& params,
                              int lyap_grid) {
  ThoulessReport rep;
  if (table.values.size() < 256) rep.warnings.push_back("energy grid has fewer than 256 points");
  if (table.values.front() > 0.0 || table.values.back() < 1.0)
    rep.warnings.push_back("energy grid does not span the spectrum; mass outside the grid is ignored");
  for (double E : energies) {
    ThoulessRow row;
    row.energy = E;
    row.integral = log_potential(table, E);
    const auto L = finite_lyapunov(params.with_energy(E), table.N, lyap_grid);
    row.lyapunov = L.value;
    row.lyapunov_std_error = L.std_error;
    row.residual = row.lyapunov - row.integral;
    rep.rows.push_back(row);
  }
  return rep;
}

double ConcatenationProfile::log_sum() const {
  if (log_w.empty()) return -INFINITY;
  const double mx = *std::max_element(log_w.begin(), log_w.end());
  double s = 0.0;
  for (double v : log_w) s += std::exp(v - mx);
  return mx + std::log(s);
}

ConcatenationProfile concatenation_profile(const CocycleParams& params, double x, std::int64_t N, double E,
                                           double eta) {
  if (!(eta > 0.0)) throw DomainError("concatenation_profile: eta must be positive");
  if (N < 1) throw DomainError("concatenation_profile: N must be >= 1");
  const auto p = params.with_energy(Complex(E, eta));
  const Complex z = unit_phase(x);
  const auto n = static_cast<std::size_t>(N);
  std::vector<ScaledMatrix2> steps(n);
  for (std::size_t k = 0; k < n; ++k) steps[k] = one_step(p, site_point(p, z, static_cast<std::int64_t>(k) + 1));

  std::vector<double> prefix(n), suffix(n);
  ScaledMatrix2 acc = steps[0];
  prefix[0] = log_norm(acc);
  for (std::size_t k = 1; k < n; ++k) {
    acc = mat_mul(steps[k], acc);
    prefix[k] = log_norm(acc);
  }
  const double total = prefix[n - 1];
  // suffix[k - 1] = log ||M_[k+1,N]||; the empty product for k = N is the identity.
  suffix[n - 1] = 0.0;
  ScaledMatrix2 tail = normalize(Mat2::identity());
  for (std::size_t k = n - 1; k > 0; --k) {
    tail = mat_mul(tail, steps[k]);
    suffix[k - 1] = log_norm(tail);
  }
  ConcatenationProfile prof;
  prof.N = N;
  prof.x = x;
  prof.E = E;
  prof.eta = eta;
  prof.log_w.resize(n);
  for (std::size_t k = 0; k < n; ++k) prof.log_w[k] = prefix[k] + suffix[k] - total;
  return prof;
}

CountBound count_bound_check(const CocycleParams& params, double x, std::int64_t N, double E, double eta) {
  if (N < 4) throw DomainError("count_bound_check: N must be >= 4");
  const auto p = params.with_energy(Complex(E, eta));
  const Complex z = unit_phase(x);
  CountBound cb;
  double best = -INFINITY;
  for (std::int64_t a = 1; a <= 2; ++a)
    for (std::int64_t b = 1; b <= 2; ++b) {
      const double v = dirichlet_det(p, z, a, N - b + 1).log_magnitude();
      if (v > best) {
        best = v;
        cb.a = a;
        cb.b = b;
      }
    }
  cb.count = count_in_open_interval(dirichlet_diagonal(params, x, cb.a, N - cb.b + 1), E - eta, E + eta);
  cb.full_count = count_in_open_interval(dirichlet_diagonal(params, x, 1, N), E - eta, E + eta);
  cb.bound = 4.0 * eta * std::exp(concatenation_profile(params, x, N, E, eta).log_sum());
  return cb;
}

}  // namespace qpc
