#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpc/cocycle.hpp"

namespace qpc {

enum class CountingMode { exact_sturm, eigenvalue_list };

/// Phase-averaged normalized counting function N(E) = <(1/N) #{E_j < E}>_x.
struct IdsTable {
  std::vector<double> energy_grid;
  std::vector<double> values;
  /// Standard error of the phase average at each energy.
  std::vector<double> std_error;
  std::int64_t N = 0;
  int x_samples = 0;
  CountingMode counting_mode = CountingMode::exact_sturm;

  /// Spacing of a uniform grid. Throws DomainError otherwise.
  double spacing() const;
};

/// Phases x_j = j / x_grid. energy_grid must be sorted ascending.
IdsTable ids_table(const CocycleParams& params, std::int64_t N, int x_grid, std::span<const double> energy_grid,
                   CountingMode mode = CountingMode::exact_sturm);

/// For each level, the first grid energy with N(E) >= level.
std::vector<double> ids_quantiles(const IdsTable& table, std::span<const double> levels);

/// Levels (2i - 1) / (2 count), i = 1..count.
std::vector<double> midpoint_levels(int count);

/// n + 1 equispaced energies on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// Free density of states (1/pi) arccos(-E/2), clipped to [0, 1].
double free_ids(double E);

struct HolderReport {
  /// (eta, sup_E N(E + eta) - N(E - eta)); eta rounded to whole grid steps.
  std::vector<std::pair<double, double>> modulus;
  /// Slope of log modulus against log eta.
  double exponent = 0.0;
  int k0 = 1;
  /// exponent < 1 / (2 k0) - 0.15.
  bool flagged = false;
};

/// Requires a uniform energy grid; every eta must span at least one grid step
/// (ResolutionError otherwise).
HolderReport holder_scan(const IdsTable& table, std::span<const double> eta_ladder, int k0 = 1);

struct LipschitzReport {
  double eta = 0.0;
  double q = 0.0;
  /// Largest (N(E + eta) - N(E - eta)) / eta after dropping the q-fraction of
  /// energies with the largest increments.
  double max_ratio = 0.0;
  /// Same without trimming.
  double unrestricted_ratio = 0.0;
  std::size_t discarded = 0;
  std::size_t energies = 0;
};

/// 0 <= q < 0.2.
LipschitzReport lipschitz_scan(const IdsTable& table, double eta, double q);

/// Integral of log|E - E'| dN(E') over the table, with N linear inside each cell.
double log_potential(const IdsTable& table, double E);

struct ThoulessRow {
  double energy = 0.0;
  double integral = 0.0;
  double lyapunov = 0.0;
  double lyapunov_std_error = 0.0;
  /// lyapunov - integral.
  double residual = 0.0;
};

struct ThoulessReport {
  std::vector<ThoulessRow> rows;
  std::vector<std::string> warnings;
  double max_abs_residual() const;
};

/// Compares log_potential against finite_lyapunov(n = table.N, lyap_grid).
ThoulessReport thouless_check(const IdsTable& table, std::span<const double> energies, const CocycleParams& params,
                              int lyap_grid);

struct ConcatenationProfile {
  std::int64_t N = 0;
  double x = 0.0;
  double E = 0.0;
  double eta = 0.0;
  /// log W_{N,k} for k = 1..N (index k - 1).
  std::vector<double> log_w;

  /// log sum_k W_{N,k}.
  double log_sum() const;
};

/// W_{N,k} = ||M_[1,k]|| ||M_[k+1,N]|| / ||M_[1,N]|| at e(x), E + i eta. Requires eta > 0.
ConcatenationProfile concatenation_profile(const CocycleParams& params, double x, std::int64_t N, double E,
                                           double eta);

struct CountBound {
  /// Window [a, N - b + 1] maximizing |f| over a, b in {1, 2}.
  std::int64_t a = 1;
  std::int64_t b = 1;
  /// Eigenvalues of the window in (E - eta, E + eta).
  std::int64_t count = 0;
  /// Same for the full window [1, N].
  std::int64_t full_count = 0;
  /// 4 eta sum_k W_{N,k}.
  double bound = 0.0;

  bool holds() const { return static_cast<double>(count) <= bound * (1.0 + 1e-6); }
  /// Comparison for [1, N], which may exceed the window count by at most 2.
  bool full_holds() const { return static_cast<double>(full_count) <= bound * (1.0 + 1e-6) + 2.0; }
};

CountBound count_bound_check(const CocycleParams& params, double x, std::int64_t N, double E, double eta);

}  // namespace qpc
