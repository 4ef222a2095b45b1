#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpc/cocycle.hpp"

namespace qpc {

/// Eigenvalues (and optionally eigenvectors) of H_[1,N](x, omega): diagonal
/// V(e(x + n omega)), n = 1..N, off-diagonal -1.
struct DirichletSpectrum {
  std::int64_t N = 0;
  double x = 0.0;
  std::vector<double> eigenvalues;
  /// Column-major N x N, column j is the eigenvector of eigenvalues[j]; empty
  /// unless requested.
  std::vector<double> eigenvectors;
  /// gaps[j] = eigenvalues[j + 1] - eigenvalues[j].
  std::vector<double> gaps;

  bool has_vectors() const { return !eigenvectors.empty(); }
  /// Component n (zero-based) of eigenvector j.
  double vector(std::size_t j, std::size_t n) const { return eigenvectors[j * N + n]; }
  std::span<const double> column(std::size_t j) const {
    return std::span<const double>(eigenvectors).subspan(j * N, N);
  }
};

/// V(e(x + k omega)) for k = a..b.
std::vector<double> dirichlet_diagonal(const CocycleParams& params, double x, std::int64_t a, std::int64_t b);

/// Number of eigenvalues below E of the tridiagonal with this diagonal and
/// off-diagonal -1.
std::int32_t count_below(std::span<const double> diag, double E);

/// Number of eigenvalues in the open interval (lo, hi).
std::int32_t count_in_open_interval(std::span<const double> diag, double lo, double hi);

/// All eigenvalues by Sturm bisection, ascending. With tol = 0 bisection runs
/// until the bracket cannot be split further in double precision.
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, double tol = 0.0);

/// Orthonormal eigenvectors for the given (accurate) eigenvalues by inverse
/// iteration, with Gram-Schmidt inside clusters of close eigenvalues.
/// Column-major result.
std::vector<double> tridiagonal_eigenvectors(std::span<const double> diag, std::span<const double> eigenvalues);

DirichletSpectrum dirichlet_spectrum(const CocycleParams& params, double x, std::int64_t N, bool want_vectors,
                                     double tol = 0.0);

/// ||H psi_j - E_j psi_j||_2 maximised over j.
double max_residual(const DirichletSpectrum& s, std::span<const double> diag);

/// max_{j,k} |<psi_j, psi_k> - delta_jk|.
double orthonormality_defect(const DirichletSpectrum& s);

struct CharacteristicConsistency {
  /// max_j |f_[1,N](e(x), E_j)| / e^{N L_N(E_j)}.
  double max_relative = 0.0;
  /// min_j (N L_N(E_j) - log |f_[1,N](E_j)|), natural-log units.
  double min_log_gap = 0.0;
};

CharacteristicConsistency characteristic_consistency(const DirichletSpectrum& spectrum, const CocycleParams& params);

struct LocalizationProfile {
  /// 1-based site of max |psi|.
  std::int64_t center = 0;
  /// (Q, sum_{|k - center| > Q} |psi(k)|^2) for Q in {0, 1, 2, 4, ...}.
  std::vector<std::pair<std::int64_t, double>> mass_outside;
  /// -slope of log mass_outside against Q (Q >= 1, nonzero masses).
  double decay_rate = 0.0;

  double tail_mass(std::int64_t Q) const;
};

/// Requires spectrum with vectors. Tail masses are computed for the dyadic
/// ladder plus any extra Q values.
LocalizationProfile localization(const DirichletSpectrum& spectrum, std::size_t j,
                                 std::span<const std::int64_t> extra_Q = {});

/// Indices of eigenvalues kept after discarding the fraction q with the
/// smallest distance to a neighbour (exceptional-set proxy).
std::vector<std::size_t> indices_without_smallest_gaps(const DirichletSpectrum& spectrum, double q);

struct GapStats {
  std::int64_t N = 0;
  int x_grid = 0;
  /// Minimal gap per sampled phase (inf when fewer than two eigenvalues fall in the window).
  std::vector<double> min_gap;
  /// Quantiles {0, 0.01, 0.05, 0.25, 0.5} of the per-phase minimal gap.
  std::vector<std::pair<double, double>> min_gap_quantiles;
  /// Quantiles of all gaps pooled.
  std::vector<std::pair<double, double>> pooled_quantiles;
  /// (delta, fraction of phases with min gap < exp(-N^delta)).
  std::vector<std::pair<double, double>> small_gap_fraction;
  bool all_positive = true;
};

GapStats min_gap_stats(const CocycleParams& params, std::int64_t N, int x_grid,
                       std::optional<std::pair<double, double>> window = std::nullopt,
                       std::span<const double> delta_ladder = {});

struct WegnerCurve {
  std::int64_t N = 0;
  double E = 0.0;
  int x_grid = 0;
  /// (H, fraction of phases with dist(sp H_N(x), E) < e^{-H}).
  std::vector<std::pair<double, double>> points;
  /// Slope of log fraction against H over points with fraction > 0.
  double slope = 0.0;
  /// slope * (log N)^2.
  double scaled_slope = 0.0;
  std::size_t fitted_points = 0;
};

WegnerCurve wegner_count(const CocycleParams& params, std::int64_t N, double E, std::span<const double> H_ladder,
                         int x_grid);

struct RellichVelocity {
  /// dE_j/dx by first-order perturbation.
  double velocity = 0.0;
  /// Centered finite difference with step 1e-6.
  double finite_difference = 0.0;
  double relative_difference = 0.0;
  std::optional<std::string> warning;
};

/// j is zero-based.
RellichVelocity rellich_velocity(const CocycleParams& params, double x, std::int64_t N, std::size_t j);

/// sum_n |psi_j(n)|^2 dV(e(x + n omega))/dx for every eigenpair in spectrum.
std::vector<double> rellich_velocities(const DirichletSpectrum& spectrum, const CocycleParams& params);

struct RellichScan {
  std::int64_t N = 0;
  int x_grid = 0;
  double threshold = 0.0;
  /// Fraction of (x, j) with |velocity| < threshold.
  double small_fraction = 0.0;
  double min_abs_velocity = 0.0;
};

RellichScan rellich_scan(const CocycleParams& params, std::int64_t N, int x_grid, double threshold);

/// Empirical quantile by linear interpolation of the sorted sample.
double quantile(std::vector<double> values, double q);

}  // namespace qpc
