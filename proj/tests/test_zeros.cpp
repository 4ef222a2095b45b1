#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qpc/errors.hpp"
#include "qpc/ids.hpp"
#include "qpc/zeros.hpp"

using namespace qpc;

namespace {

CocycleParams am(double lambda, double E = 0.0) {
  return {Frequency::sqrt2(), Complex(E, 0.0), TrigPotential::almost_mathieu(lambda)};
}

Evaluator poly_from_roots(std::vector<Complex> roots) {
  return [roots](Complex z) {
    ScaledComplex v = ScaledComplex::one();
    for (auto r : roots) v = v * ScaledComplex::from(z - r);
    return v;
  };
}

double nearest(const std::vector<Complex>& pts, Complex z) {
  double d = INFINITY;
  for (auto p : pts) d = std::min(d, std::abs(p - z));
  return d;
}

// Energy at IDS level 0.6875 for coupling 4, N = 70.
double bulk_energy() {
  const auto grid = uniform_grid(-6.0, 6.0, 4096);
  const auto t = ids_table(am(4.0), 512, 64, grid);
  const std::vector<double> level{0.6875};
  return ids_quantiles(t, level)[0];
}

}  // namespace

TEST_SUITE("zeros") {
  TEST_CASE("argument principle counts for z^4 - 1") {
    const auto f = poly_from_roots({1.0, -1.0, Complex(0, 1), Complex(0, -1)});
    CHECK(count_zeros_disk(f, 0.0, 2.0) == 4);
    CHECK(count_zeros_disk(f, 1.0, 0.5) == 1);
    CHECK(count_zeros_disk(f, Complex(0.5, 0.5), 0.2) == 0);
    CHECK(count_zeros_annulus(f, 0.5, 2.0) == 4);
    CHECK(count_zeros_annulus(f, 1.5, 2.0) == 0);
    // Root on the contour: the radius is nudged.
    CHECK(count_zeros_disk(f, 0.0, 1.0) >= 0);
    CHECK_THROWS_AS(count_zeros_annulus(f, 2.0, 1.0), DomainError);
    CHECK_THROWS_AS(count_zeros_disk(f, 0.0, 0.0), DomainError);
  }

  TEST_CASE("z^4 - 1 zeros are located") {
    const auto f = poly_from_roots({1.0, -1.0, Complex(0, 1), Complex(0, -1)});
    const auto zs = locate_zeros_annulus(f, 0.5, 2.0);
    REQUIRE(zs.zeros.size() == 4);
    CHECK(zs.total_count == 4);
    CHECK(zs.box_count_sum == 4);
    const auto pts = zs.points();
    for (Complex r : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) CHECK(nearest(pts, r) < 1e-10);
    CHECK(zs.max_residual() < 1e-10);
    const auto sep = zero_separation(pts, 4);
    CHECK(sep.min_distance == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("near-double zero is resolved") {
    const Complex a(0.3, 0.2);
    const auto f = poly_from_roots({a, a + 1e-6, Complex(-0.5, 0.1)});
    const auto zs = locate_zeros_disk(f, 0.0, 1.0);
    REQUIRE(zs.counted() == 3);
    const auto sep = zero_separation(zs);
    CHECK(std::abs(sep.min_distance - 1e-6) < 1e-9);
  }

  TEST_CASE("box budget is reported") {
    const auto f = poly_from_roots({0.1, 0.2, 0.3, 0.4});
    ZeroBudget tight;
    tight.max_boxes = 3;
    const auto zs = locate_zeros_disk(f, 0.0, 1.0, tight);
    CHECK(zs.budget_exhausted);
    CHECK(zs.incomplete);
  }

  TEST_CASE("free determinant does not depend on the phase") {
    CocycleParams p{Frequency::sqrt2(), Complex(0.5, 0.0), TrigPotential::zero()};
    const double a = relative_magnitude(p, 20, 1.0);
    CHECK(relative_magnitude(p, 20, Complex(0.3, 1.1)) == doctest::Approx(a).epsilon(1e-12));
    const auto zs = locate_zeros(p, 20, 0.5, 0.3);
    CHECK(zs.zeros.empty());
    CHECK(zs.total_count == 0);
    CHECK_THROWS_AS(locate_zeros(p, 20, 0.5, 0.6), DomainError);
  }

  TEST_CASE("census at coupling 4, N = 70") {
    const double E = bulk_energy();
    const auto p = am(4.0);
    CHECK(count_zeros_annulus(dirichlet_evaluator(p.with_energy(E), 70), 0.55, 1.45) == 140);
    const auto zs = locate_zeros(p, 70, E, 0.45);
    CHECK(zs.counted() == 140);
    CHECK(zs.total_count == 140);
    CHECK(zs.box_count_sum == zs.total_count);
    CHECK_FALSE(zs.incomplete);
    const auto eq = equidistribution_stats(zs);
    CHECK(eq.max_radial <= 0.1);
    CHECK(eq.angular_discrepancy <= 0.15);

    // Real potential and energy: the zero set is symmetric under z -> 1 / conj(z).
    const auto pts = zs.points();
    double worst = 0.0;
    for (auto z : pts) worst = std::max(worst, nearest(pts, 1.0 / std::conj(z)));
    CHECK(worst < 1e-8);

    // Zeros move continuously with the energy.
    const auto moved = locate_zeros(p, 70, E + 1e-9, 0.45).points();
    REQUIRE(moved.size() == pts.size());
    double shift = 0.0;
    for (auto z : pts) shift = std::max(shift, nearest(moved, z));
    CHECK(shift < 1e-6);

    const auto sep = zero_separation(zs);
    CHECK(sep.min_distance > 0.0);
    CHECK(per_disk_count(zs, std::exp(-std::pow(std::log(70.0), 2))) <= 2);
  }

  TEST_CASE("Jensen average of a single zero is one") {
    const Complex a(0.2, -0.1);
    const RealField u = [a](Complex z) { return std::log(std::abs(z - a)); };
    const auto ja = jensen_average(u, a, 0.05, 0.01, 64);
    CHECK(std::abs(ja.scaled() - 1.0) < 5e-3);
  }

  TEST_CASE("Jensen average of a harmonic function vanishes") {
    const RealField u = [](Complex z) { return std::log(std::abs(z - Complex(2.0, 0.0))) + z.real(); };
    const auto ja = jensen_average(u, 0.0, 0.05, 0.01, 32);
    CHECK(std::abs(ja.value) < 1e-10);
    CHECK_THROWS_AS(jensen_average(u, 0.0, 0.01, 0.05), DomainError);
    CHECK_THROWS_AS(jensen_average(u, 0.0, 0.05, 0.01, 4), DomainError);
  }

  TEST_CASE("Jensen sandwich for f_70") {
    const double E = bulk_energy();
    const auto p = am(4.0, E);
    const auto zs = locate_zeros(am(4.0), 70, E, 0.45);
    const Complex z0 = zs.zeros[7].z;
    const double r1 = 0.05, r2 = 0.01;
    const auto f = dirichlet_evaluator(p, 70);
    const auto ja = jensen_average(log_abs(f), z0, r1, r2, 32);
    const auto pts = zs.points();
    int inner = 0, outer = 0;
    for (auto z : pts) {
      if (std::abs(z - z0) < r1 - r2) ++inner;
      if (std::abs(z - z0) < r1 + r2) ++outer;
    }
    CHECK(inner >= 1);
    CHECK(inner - 1e-3 <= ja.scaled());
    CHECK(ja.scaled() <= outer + 1e-3);
  }

  TEST_CASE("per-disk counts") {
    const std::vector<Complex> line{0.0, 0.5, 1.0};
    CHECK(per_disk_count(line, 0.2) == 1);
    CHECK(per_disk_count(line, 0.3) == 2);
    CHECK(per_disk_count(line, 0.6) == 3);
    const std::vector<Complex> stacked(10, Complex(0.3, 0.3));
    CHECK(per_disk_count(stacked, 1e-12) == 10);
    CHECK_THROWS_AS(per_disk_count(line, 0.0), DomainError);
  }

  TEST_CASE("equidistribution of uniform angles") {
    std::vector<Complex> pts;
    for (int k = 0; k < 100; ++k) pts.push_back(std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / 100));
    const auto eq = equidistribution_stats(pts);
    CHECK(eq.max_radial < 1e-15);
    CHECK(eq.angular_discrepancy == doctest::Approx(0.005));
    CHECK(star_discrepancy({0.5}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(equidistribution_stats(std::span<const Complex>(pts).first(5)), DomainError);
    CHECK_THROWS_AS(star_discrepancy({}), DomainError);
  }

  TEST_CASE("SVG output") {
    const auto f = poly_from_roots({1.0, -1.0, Complex(0, 1), Complex(0, -1)});
    const auto zs = locate_zeros_annulus(f, 0.5, 2.0);
    std::ostringstream a, b;
    write_svg(a, zs, {"test", true, 0.1});
    write_svg(b, zs, {"test", false, 0.1});
    CHECK(a.str().find("<svg") != std::string::npos);
    CHECK(a.str().find("generated") == std::string::npos);
    CHECK(b.str().find("generated") != std::string::npos);
  }
}
