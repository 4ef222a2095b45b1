#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qpc/errors.hpp"
#include "qpc/spectra.hpp"

using namespace qpc;

namespace {

CocycleParams am(double lambda) { return {Frequency::sqrt2(), Complex{}, TrigPotential::almost_mathieu(lambda)}; }
CocycleParams free_params() { return {Frequency::sqrt2(), Complex{}, TrigPotential::zero()}; }

double free_eigenvalue(int k, int N) { return -2.0 * std::cos(k * std::numbers::pi / (N + 1)); }

}  // namespace

TEST_SUITE("spectra") {
  TEST_CASE("free Laplacian eigenvalues") {
    const auto s = dirichlet_spectrum(free_params(), 0.3, 100, false);
    REQUIRE(s.eigenvalues.size() == 100);
    double err = 0.0;
    for (int k = 1; k <= 100; ++k) err = std::max(err, std::abs(s.eigenvalues[k - 1] - free_eigenvalue(k, 100)));
    CHECK(err <= 1e-10);
    REQUIRE(s.gaps.size() == 99);
    CHECK(s.gaps[0] == doctest::Approx(free_eigenvalue(2, 100) - free_eigenvalue(1, 100)));
  }

  TEST_CASE("one site: the eigenvalue is the potential") {
    const auto p = am(4.0);
    const auto s = dirichlet_spectrum(p, 0.2, 1, true);
    REQUIRE(s.eigenvalues.size() == 1);
    CHECK(s.eigenvalues[0] == doctest::Approx(potential_real(p.potential, 0.2 + p.omega.value())).epsilon(1e-14));
    CHECK(std::abs(s.vector(0, 0)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(dirichlet_spectrum(p, 0.2, 0, false), DomainError);
  }

  TEST_CASE("three sites agree with companion-matrix roots") {
    const auto p = am(4.0);
    const auto d = dirichlet_diagonal(p, 0.61, 1, 3);
    // Monic det(E - H) via p_k = (E - v_k) p_{k-1} - p_{k-2}, coefficients low to high.
    std::vector<std::complex<double>> pm{1.0}, pmm{};
    for (double v : d) {
      std::vector<std::complex<double>> next(pm.size() + 1, 0.0);
      for (std::size_t i = 0; i < pm.size(); ++i) {
        next[i + 1] += pm[i];
        next[i] -= v * pm[i];
      }
      for (std::size_t i = 0; i < pmm.size(); ++i) next[i] -= pmm[i];
      pmm = pm;
      pm = next;
    }
    pm.pop_back();
    auto roots = oracle::companion_roots(pm);
    std::vector<double> ref;
    for (auto r : roots) ref.push_back(r.real());
    std::sort(ref.begin(), ref.end());
    const auto s = dirichlet_spectrum(p, 0.61, 3, false);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(s.eigenvalues[i] - ref[i]) < 1e-12);
  }

  TEST_CASE("eigenvalues agree with a dense solver") {
    const auto p = am(4.0);
    const auto d = dirichlet_diagonal(p, 0.05, 1, 150);
    const auto ref = oracle::dense_eigenvalues(d);
    const auto got = tridiagonal_eigenvalues(d);
    REQUIRE(got.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-10);
    CHECK(std::accumulate(got.begin(), got.end(), 0.0) ==
          doctest::Approx(std::accumulate(d.begin(), d.end(), 0.0)).epsilon(1e-12));
  }

  TEST_CASE("eigenpairs have small residual and are orthonormal") {
    for (double lambda : {0.0, 1.0, 4.0}) {
      const auto p = lambda == 0.0 ? free_params() : am(lambda);
      const auto s = dirichlet_spectrum(p, 0.1234, 200, true);
      const auto d = dirichlet_diagonal(p, 0.1234, 1, 200);
      CHECK(max_residual(s, d) <= 1e-10);
      CHECK(orthonormality_defect(s) <= 1e-10);
    }
  }

  TEST_CASE("Cauchy interlacing when a site is removed") {
    const auto d = dirichlet_diagonal(am(4.0), 0.77, 1, 80);
    const auto big = tridiagonal_eigenvalues(d);
    const auto small = tridiagonal_eigenvalues(std::span<const double>(d).first(79));
    for (std::size_t i = 0; i < small.size(); ++i) {
      CHECK(big[i] <= small[i] + 1e-12);
      CHECK(small[i] <= big[i + 1] + 1e-12);
    }
  }

  TEST_CASE("eigenvalue counting") {
    const std::vector<double> d(10, 0.0);
    CHECK(count_below(d, -3.0) == 0);
    CHECK(count_below(d, 0.0) == 5);
    CHECK(count_below(d, 3.0) == 10);
    CHECK(count_in_open_interval(d, -1.0, 1.0) == count_below(d, 1.0) - count_below(d, -1.0));
  }

  TEST_CASE("characteristic polynomial vanishes at eigenvalues") {
    const auto free_c = characteristic_consistency(dirichlet_spectrum(free_params(), 0.0, 10, false), free_params());
    CHECK(free_c.max_relative <= 1e-8);

    const auto p = am(4.0);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 16; ++i) {
      const auto s = dirichlet_spectrum(p, u(rng), 100, false);
      const auto c = characteristic_consistency(s, p);
      CHECK(c.max_relative <= 1e-6);
      CHECK(c.min_log_gap >= 8.0);
    }
  }

  TEST_CASE("eigenvalues are simple zeros of the determinant") {
    const auto p = am(4.0);
    const auto s = dirichlet_spectrum(p, 0.3, 100, false);
    const Complex z = unit_phase(0.3);
    for (std::size_t j : {0u, 37u, 99u}) {
      const double e = s.eigenvalues[j];
      const double at = dirichlet_det(p.with_energy(e), z, 1, 100).log_magnitude();
      const double off = dirichlet_det(p.with_energy(e + 1e-3), z, 1, 100).log_magnitude();
      CHECK(off - at >= std::log(100.0));
    }
  }

  TEST_CASE("free eigenvectors are extended") {
    const auto s = dirichlet_spectrum(free_params(), 0.0, 100, true);
    const auto loc = localization(s, 50);
    CHECK(loc.tail_mass(16) >= 0.2);
    CHECK_THROWS_AS(loc.tail_mass(3), DomainError);
  }

  TEST_CASE("eigenvectors at coupling 4 are exponentially localized") {
    const auto s = dirichlet_spectrum(am(4.0), 0.1234, 400, true);
    const std::vector<std::int64_t> extra{20};
    int localized = 0;
    for (std::size_t j = 0; j < s.eigenvalues.size(); ++j)
      if (localization(s, j, extra).tail_mass(20) < 1e-6) ++localized;
    CHECK(localized >= 360);
    const auto loc = localization(s, 200, extra);
    // Tail mass below e^{-Q L / 4}, L = log 2.
    CHECK(loc.decay_rate >= std::log(2.0) / 4.0);
    CHECK_THROWS_AS(localization(dirichlet_spectrum(am(4.0), 0.1, 10, false), 0), DomainError);
  }

  TEST_CASE("free minimal gap sits at the band edge") {
    const auto g = min_gap_stats(free_params(), 50, 4);
    REQUIRE(g.min_gap.size() == 4);
    const double expect = free_eigenvalue(2, 50) - free_eigenvalue(1, 50);
    for (double m : g.min_gap) CHECK(m == doctest::Approx(expect).epsilon(1e-10));
    CHECK(g.all_positive);
  }

  TEST_CASE("gaps at coupling 4 are rarely tiny") {
    const std::vector<double> deltas{0.5};
    const auto g = min_gap_stats(am(4.0), 100, 256, std::nullopt, deltas);
    CHECK(g.all_positive);
    REQUIRE(g.small_gap_fraction.size() == 1);
    CHECK(g.small_gap_fraction[0].second <= 0.1);
    CHECK_THROWS_AS(min_gap_stats(am(4.0), 1, 8), DomainError);
  }

  TEST_CASE("discarding the smallest gaps") {
    const auto s = dirichlet_spectrum(am(4.0), 0.3, 100, false);
    CHECK(indices_without_smallest_gaps(s, 0.0).size() == 100);
    CHECK(indices_without_smallest_gaps(s, 0.1).size() == 90);
  }

  TEST_CASE("Wegner counts") {
    const std::vector<double> H{3.0, 4.0, 6.0};
    const auto outside = wegner_count(am(4.0), 64, 10.0, H, 64);
    for (const auto& [h, f] : outside.points) CHECK(f == 0.0);
    CHECK(outside.fitted_points == 0);

    // Even N: the closest free eigenvalue to 0 is 2 sin(pi / 258) ~ 0.0244.
    const auto free_curve = wegner_count(free_params(), 128, 0.0, H, 8);
    CHECK(free_curve.points[0].second == 1.0);
    CHECK(free_curve.points[1].second == 0.0);

    std::vector<double> ladder;
    for (int h = 3; h <= 10; ++h) ladder.push_back(h);
    const auto curve = wegner_count(am(4.0), 64, 0.3, ladder, 4096);
    CHECK(curve.fitted_points >= 3);
    CHECK(curve.slope < 0.0);
    const std::vector<double> bad{0.5};
    CHECK_THROWS_AS(wegner_count(am(4.0), 64, 0.3, bad, 8), DomainError);
  }

  TEST_CASE("Rellich velocities") {
    const auto zero = rellich_velocity(free_params(), 0.3, 20, 5);
    CHECK(zero.velocity == 0.0);

    const auto p = am(4.0);
    const auto one = rellich_velocity(p, 0.3, 1, 0);
    CHECK(one.velocity == doctest::Approx(potential_derivative(p.potential, 0.3 + p.omega.value())).epsilon(1e-12));

    for (std::size_t j : {0u, 20u, 63u}) {
      const auto r = rellich_velocity(p, 0.17, 64, j);
      CHECK(r.relative_difference < 1e-3);
      CHECK_FALSE(r.warning.has_value());
    }
    const auto scan = rellich_scan(p, 100, 512, 1e-3);
    CHECK(scan.small_fraction <= 0.05);
    CHECK(scan.min_abs_velocity >= 0.0);
    CHECK_THROWS_AS(rellich_velocity(p, 0.1, 10, 10), DomainError);
  }

  TEST_CASE("velocities sum to the derivative of the trace") {
    const auto p = am(4.0);
    const auto s = dirichlet_spectrum(p, 0.42, 60, true);
    const auto v = rellich_velocities(s, p);
    double trace_derivative = 0.0;
    for (int n = 1; n <= 60; ++n) trace_derivative += potential_derivative(p.potential, 0.42 + p.omega.shift(n));
    CHECK(std::accumulate(v.begin(), v.end(), 0.0) == doctest::Approx(trace_derivative).epsilon(1e-9));
  }

  TEST_CASE("quantile") {
    CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.0) == 1.0);
    CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 1.0) == 4.0);
    CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
  }
}
