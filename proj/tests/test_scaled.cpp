#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qpc/errors.hpp"
#include "qpc/scaled.hpp"

using namespace qpc;

namespace {

double max_entry(const Mat2& m) {
  return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

// Random real matrix of determinant one.
Mat2 random_sl2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0), s(-1.5, 1.5);
  const double a = u(rng), b = s(rng), c = s(rng);
  return {a, b, c, (1.0 + b * c) / a};
}

}  // namespace

TEST_SUITE("scaled") {
  TEST_CASE("normalize keeps the identity, rescales huge entries, and maps zero to zero") {
    const auto id = normalize(Mat2::identity());
    CHECK(id.mantissa == Mat2::identity());
    CHECK(id.log_scale == 0.0);

    const double big = std::exp(50.0);
    const auto m = normalize(Mat2{big, big, big, big});
    CHECK(max_entry(m.mantissa) >= 1.0);
    CHECK(max_entry(m.mantissa) < 2.0);
    const double back = std::exp(m.log_scale) * m.mantissa.a.real();
    CHECK(std::abs(back / big - 1.0) < 1e-12);

    const auto z = normalize(Mat2{});
    CHECK(z.is_zero());
    CHECK(z.log_scale == 0.0);
    CHECK_THROWS_AS(log_norm(z), DomainError);
    CHECK_THROWS_AS(normalize(Mat2{NAN, 0.0, 0.0, 1.0}), DomainError);
  }

  TEST_CASE("rotation by 90 degrees squared is rotation by 180 degrees") {
    const auto r = normalize(Mat2{0.0, -1.0, 1.0, 0.0});
    const auto r2 = mat_mul(r, r);
    CHECK(r2.mantissa == Mat2{-1.0, 0.0, 0.0, -1.0});
    CHECK(r2.log_scale == 0.0);
  }

  TEST_CASE("products beyond the double range stay representable") {
    const auto d = normalize(Mat2{1.0, 0.0, 0.0, std::exp(-600.0)}, 300.0);
    const auto p = mat_mul(d, d);
    CHECK(std::isfinite(p.log_scale));
    CHECK(log_norm(p) == doctest::Approx(600.0).epsilon(1e-14));
    CHECK(log_abs_det(p) == doctest::Approx(0.0).epsilon(1e-9));
  }

  TEST_CASE("mat_mul scale stays within log 16 of the summed scales") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
      const auto a = normalize(Mat2{Complex(g(rng), g(rng)), g(rng), g(rng), Complex(g(rng), g(rng))}, 5.0 * g(rng));
      const auto b = normalize(Mat2{g(rng), Complex(g(rng), g(rng)), g(rng), g(rng)}, 5.0 * g(rng));
      const auto p = mat_mul(a, b);
      const double base = a.log_scale + b.log_scale;
      // The product can lose magnitude through cancellation, which moves the scale down.
      CHECK(p.log_scale <= base + std::log(16.0) + 1e-12);
      const Mat2 raw = a.mantissa * b.mantissa;
      CHECK(std::abs(std::exp(p.log_scale - base) * max_entry(p.mantissa) / max_entry(raw) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("log_norm of identity and of diag(3, 1/3)") {
    const auto id = normalize(Mat2::identity());
    CHECK(log_norm(id) == 0.0);
    CHECK(log_abs_det(id) == doctest::Approx(0.0));
    const auto d = normalize(Mat2{3.0, 0.0, 0.0, 1.0 / 3.0});
    CHECK(log_norm(d) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(std::abs(log_abs_det(d)) < 1e-15);
  }

  TEST_CASE("1000 random SL(2,R) factors match a 256-bit product") {
    std::mt19937_64 rng(2024);
    ScaledMatrix2 acc = normalize(Mat2::identity());
    oracle::BigMat big;
    for (int i = 0; i < 1000; ++i) {
      const Mat2 m = random_sl2(rng);
      acc = mat_mul(normalize(m), acc);
      big = oracle::mul(oracle::BigMat{m.a.real(), m.b.real(), m.c.real(), m.d.real()}, big);
    }
    const double ref = oracle::log_norm(big);
    CHECK(std::abs(log_norm(acc) - ref) <= 1e-8 * std::abs(ref));
  }

  TEST_CASE("unimodularity survives long products") {
    std::mt19937_64 rng(11);
    ScaledMatrix2 acc = normalize(Mat2::identity());
    for (int i = 0; i < 100; ++i) acc = mat_mul(normalize(random_sl2(rng)), acc);
    CHECK(std::abs(log_abs_det(acc)) < 1e-9);
    for (int i = 0; i < 900; ++i) acc = mat_mul(normalize(random_sl2(rng)), acc);
    CHECK(std::abs(log_abs_det(acc)) <= 1e-9);
  }

  TEST_CASE("associativity drift is below 1e-10") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    auto rnd = [&] {
      return normalize(Mat2{Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)),
                            Complex(g(rng), g(rng))},
                       10.0 * g(rng));
    };
    for (int i = 0; i < 500; ++i) {
      const auto a = rnd(), b = rnd(), c = rnd();
      CHECK(std::abs(log_norm(mat_mul(mat_mul(a, b), c)) - log_norm(mat_mul(a, mat_mul(b, c)))) < 1e-10);
    }
  }

  TEST_CASE("normalize is invariant under moving a positive factor into the carried log") {
    const Mat2 raw{Complex(0.3, -1.2), 2.5, Complex(0.0, 0.7), -4.1};
    for (int k = -20; k <= 20; k += 5) {
      // Powers of two leave the mantissa bitwise unchanged.
      const double f = std::ldexp(1.0, k);
      const auto a = normalize(Mat2{f * raw.a, f * raw.b, f * raw.c, f * raw.d}, 1.5);
      const auto b = normalize(raw, 1.5 + std::log(f));
      CHECK(a.mantissa == b.mantissa);
      CHECK(a.log_scale == doctest::Approx(b.log_scale).epsilon(1e-15));
    }
    for (double f : {3.0, 0.1, 1e7}) {
      // Other factors change the mantissa but not the represented matrix.
      const auto a = normalize(Mat2{f * raw.a, f * raw.b, f * raw.c, f * raw.d}, 0.25);
      const auto b = normalize(raw, 0.25 + std::log(f));
      const Complex va = a.entry(0, 0).value(), vb = b.entry(0, 0).value();
      CHECK(std::abs(va - vb) <= 1e-14 * std::abs(vb));
      CHECK(log_norm(a) == doctest::Approx(log_norm(b)).epsilon(1e-14));
    }
  }

  TEST_CASE("scaled complex arithmetic") {
    const auto a = ScaledComplex::from(Complex(3.0, 4.0));
    CHECK(a.log_magnitude() == doctest::Approx(std::log(5.0)));
    CHECK(std::abs(std::abs(a.phase) - 1.25) < 1e-15);
    const auto b = ScaledComplex::from(Complex(1e300, 0.0)) * ScaledComplex::from(Complex(1e300, 0.0));
    CHECK(b.log_magnitude() == doctest::Approx(600.0 * std::log(10.0)).epsilon(1e-14));
    CHECK(((a + (-a)).is_zero()));
    CHECK(std::abs((a / a).value() - Complex(1.0, 0.0)) < 1e-15);
    CHECK(ScaledComplex::zero().log_magnitude() == -INFINITY);
  }
}
