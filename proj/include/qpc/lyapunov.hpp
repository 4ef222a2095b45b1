#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "qpc/cocycle.hpp"

namespace qpc {

/// Phase average of (1/n) log ||M_n(e(x + i y))|| over x_j = j / grid_size.
struct LyapunovEstimate {
  std::int64_t n = 0;
  double value = 0.0;
  int grid_size = 0;
  double y = 0.0;
  double std_error = 0.0;
  Complex energy{};
};

/// log ||M_n(e(j/grid + i y))|| for j = 0..grid-1. Real energies with y = 0
/// take the SIMD transfer kernel; everything else the scaled complex path.
std::vector<double> log_norm_samples(const CocycleParams& params, std::int64_t n, int grid, double y = 0.0);

/// log |f_[1,n](e(j/grid + i y))| for j = 0..grid-1.
std::vector<double> log_det_samples(const CocycleParams& params, std::int64_t n, int grid, double y = 0.0);

/// Requires grid >= 8 and |y| < rho0 / 2.
LyapunovEstimate finite_lyapunov(const CocycleParams& params, std::int64_t n, int grid, double y = 0.0);

struct ApReport {
  std::size_t n = 0;
  /// log of mu = min_j ||A_j|| (after determinant rescaling).
  double log_mu = 0.0;
  bool hypothesis_large = false;
  bool hypothesis_diff = false;
  /// |log||A_n...A_1|| + sum_{2..n-1} log||A_j|| - sum_{1..n-1} log||A_{j+1} A_j|||,
  /// present only when both hypotheses hold.
  std::optional<double> gap;
  /// Constant C of the bound C n / mu that was checked.
  double constant = 10.0;
  /// C n / mu.
  double bound = 0.0;
  /// gap * mu / n, the smallest constant that would make the bound hold.
  std::optional<double> implied_constant;
  /// Log shift applied to every factor so that max |det A_j| <= 1.
  double det_rescale = 0.0;

  bool holds() const { return gap.has_value() && *gap <= bound; }
};

/// Avalanche principle check for the product A_n ... A_1 (factors[0] = A_1).
/// mu_floor is the smallest admissible mu; hypotheses also require mu > n.
ApReport ap_check(std::span<const ScaledMatrix2> factors, double mu_floor, double constant = 10.0);

/// A_j = R(a_j) diag(mu_j, 1 / mu_j) R(b_j) with log mu_j uniform on
/// [log_mu_lo, log_mu_hi] and uniform rotation angles.
std::vector<ScaledMatrix2> random_hyperbolic_chain(std::mt19937_64& rng, std::size_t n, double log_mu_lo,
                                                   double log_mu_hi);

/// Default threshold below which a Lyapunov estimate counts as "not positive".
inline constexpr double kPositiveRegimeGate = 0.05;

struct ApExtrapolation {
  /// 2 L_{2l} - L_l.
  LyapunovEstimate extrapolated;
  LyapunovEstimate reference;
  double difference = 0.0;
  double tolerance = 0.0;
  bool consistent = false;
};

/// 2 L_{2l} - L_l, cross-checked against L_N with tolerance
/// max(5 std_error, constant * l / N). Requires l >= 32, N >= l^2. Throws
/// RegimeError if L_l < gate.
ApExtrapolation ap_extrapolate(const CocycleParams& params, std::int64_t ell, std::int64_t N, int grid,
                               double gate = kPositiveRegimeGate, double constant = 1.0);

struct UniformUpperReport {
  std::int64_t N = 0;
  /// L_N from the same samples.
  double mean_value = 0.0;
  /// max_x log||M_N(x)|| - N L_N.
  double max_deviation = 0.0;
  /// Mean of log||M_N(x)|| - N L_N, zero up to rounding.
  double mean_deviation = 0.0;
  /// max_deviation / (log N)^2.
  double ratio_log2 = 0.0;
};

UniformUpperReport uniform_upper_check(const CocycleParams& params, std::int64_t N, int grid);

struct UniformUpperSweep {
  std::vector<UniformUpperReport> reports;
  /// Least-squares slope of log(max_deviation) against log N.
  double growth_exponent = 0.0;
};

UniformUpperSweep uniform_upper_sweep(const CocycleParams& params, std::span<const std::int64_t> Ns, int grid);

struct LdtEstimate {
  std::int64_t n = 0;
  double delta = 0.0;
  /// Fraction of phases with |log||M_n|| - n L_n| > delta n (or log|f_n|).
  double fraction = 0.0;
  int grid_size = 0;
  bool determinant = false;
};

LdtEstimate ldt_measure(const CocycleParams& params, std::int64_t n, double delta, int grid, bool use_determinant);

struct LdtSweep {
  std::vector<LdtEstimate> points;
  /// Fit log(fraction) ~ log(C) - rate * delta * n over points with fraction > 0.
  double rate = 0.0;
  double log_prefactor = 0.0;
  std::size_t fitted_points = 0;
};

/// ldt_measure over a delta ladder, sharing one set of samples.
LdtSweep ldt_sweep(const CocycleParams& params, std::int64_t n, std::span<const double> deltas, int grid,
                   bool use_determinant);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x. Needs >= 2 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace qpc
