#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qpc/cocycle.hpp"

namespace qpc {

/// Analytic function evaluated in scaled form.
using Evaluator = std::function<ScaledComplex(Complex)>;
/// Real-valued function of a complex variable (log-magnitudes).
using RealField = std::function<double(Complex)>;

/// z -> f_[1,N](z) at params.energy.
Evaluator dirichlet_evaluator(const CocycleParams& params, std::int64_t N);

/// z -> log |f(z)|.
RealField log_abs(Evaluator f);

/// Number of zeros of f in the open disk D(z0, r), by adaptive tracking of
/// arg f along the circle. The radius may be nudged by up to 1e-10 when a
/// zero sits on the contour; throws ContourError if that does not help.
int count_zeros_disk(const Evaluator& f, Complex z0, double r);

/// Number of zeros in r_in < |z| < r_out.
int count_zeros_annulus(const Evaluator& f, double r_in, double r_out);

struct ZeroBudget {
  /// Maximum number of quadtree boxes examined.
  std::size_t max_boxes = 2'000'000;
  /// Boxes with two or more zeros below this side are reported as clusters.
  double min_box = 1e-11;
};

struct Zero {
  Complex z{};
  /// |f(z)| / (|f'(z)| |z|): relative distance to the true zero, to first order.
  double residual = 0.0;
  /// Greater than one only for unresolved clusters.
  int multiplicity = 1;
  /// Winding count of the box the zero was isolated in.
  int box_count = 1;
};

struct ZeroSet {
  std::vector<Zero> zeros;
  std::int64_t N = 0;
  Complex energy{};
  /// Inner and outer radius of the searched region (annulus), or disk centre
  /// and radius for disk searches.
  double r_in = 0.0;
  double r_out = 0.0;
  /// Argument-principle count over the whole search region.
  int total_count = 0;
  /// Sum of the counts of the top-level boxes.
  int box_count_sum = 0;
  std::size_t boxes = 0;
  bool incomplete = false;
  /// Set when the box budget ran out (implies incomplete).
  bool budget_exhausted = false;

  /// Zeros counted with multiplicity.
  int counted() const;
  std::vector<Complex> points() const;
  double max_residual() const;
};

/// All zeros of f in r_in < |z| < r_out.
ZeroSet locate_zeros_annulus(const Evaluator& f, double r_in, double r_out, const ZeroBudget& budget = {});

/// All zeros of f in D(z0, r).
ZeroSet locate_zeros_disk(const Evaluator& f, Complex z0, double r, const ZeroBudget& budget = {});

/// Zeros of f_[1,N](., omega, E) in the annulus 1 - rho < |z| < 1 + rho.
/// Requires rho < rho0 / 2.
ZeroSet locate_zeros(const CocycleParams& params, std::int64_t N, Complex E, double rho,
                     const ZeroBudget& budget = {});

/// |f_[1,N](z)| / ||M_N(z)||.
double relative_magnitude(const CocycleParams& params, std::int64_t N, Complex z);

struct JensenAverage {
  Complex z0{};
  double r1 = 0.0;
  double r2 = 0.0;
  double value = 0.0;
  /// Difference between the last two refinement levels.
  double error_estimate = 0.0;

  /// 4 (r1 / r2)^2 J.
  double scaled() const { return 4.0 * r1 * r1 / (r2 * r2) * value; }
};

/// Double disk average of u(zeta) - u(z) over z in D(z0, r1), zeta in
/// D(z, r2). quadrature_n is the initial number of angular samples.
/// Throws PrecisionError if refinements disagree by more than 1e-3 max(1, |J|).
JensenAverage jensen_average(const RealField& u, Complex z0, double r1, double r2, int quadrature_n = 128);

struct ZeroSeparation {
  double min_distance = 0.0;
  std::pair<std::size_t, std::size_t> closest{};
  /// (log10 upper bin edge, number of zeros whose nearest neighbour lies in the bin).
  std::vector<std::pair<double, std::size_t>> histogram;
  /// (delta, exp(-N^delta), pairs closer than that).
  std::vector<std::tuple<double, double, std::size_t>> ladder;
};

/// Requires at least two points. N sets the exp(-N^delta) thresholds for
/// delta in {0.3, 0.5}.
ZeroSeparation zero_separation(std::span<const Complex> zeros, std::int64_t N);
ZeroSeparation zero_separation(const ZeroSet& zs);

/// Largest number of points inside any open disk of radius r0.
int per_disk_count(std::span<const Complex> points, double r0);
/// Clusters contribute their multiplicity.
int per_disk_count(const ZeroSet& zs, double r0);

struct Equidistribution {
  /// (q, quantile of ||z| - 1|) for q in {0.5, 0.9, 0.99, 1}.
  std::vector<std::pair<double, double>> radial_quantiles;
  double max_radial = 0.0;
  /// Star discrepancy of arg(z) / 2 pi mod 1 against the uniform law.
  double angular_discrepancy = 0.0;
};

/// Requires at least 10 points.
Equidistribution equidistribution_stats(std::span<const Complex> zeros);
Equidistribution equidistribution_stats(const ZeroSet& zs);

/// Star discrepancy of samples in [0, 1).
double star_discrepancy(std::vector<double> u);

struct SvgOptions {
  std::string title;
  /// Suppresses the generation timestamp.
  bool reproducible = false;
  /// Annulus radii drawn as dashed guides.
  double rho = 0.1;
};

void write_svg(std::ostream& out, const ZeroSet& zs, const SvgOptions& opts);

}  // namespace qpc
