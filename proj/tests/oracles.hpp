#pragma once

// Independent reference computations: 256-bit products and recursions,
// dense Eigen solvers.

#include <algorithm>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using Big = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;

struct BigMat {
  Big a = 1, b = 0, c = 0, d = 1;
};

inline BigMat mul(const BigMat& x, const BigMat& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

/// log of the largest singular value.
inline double log_norm(const BigMat& m) {
  const Big t = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
  const Big det = m.a * m.d - m.b * m.c;
  const Big s2 = (t + sqrt(t * t - 4 * det * det)) / 2;
  return static_cast<double>(log(s2) / 2);
}

/// A_n ... A_1 with A_k = [[diag[k-1], -1], [1, 0]].
inline BigMat transfer_product(std::span<const double> diag) {
  BigMat m;
  for (double v : diag) m = mul(BigMat{Big(v), Big(-1), Big(1), Big(0)}, m);
  return m;
}

/// det(T - E) for the tridiagonal T with this diagonal and off-diagonal -1.
inline Big dirichlet(std::span<const double> diag, double E) {
  Big prev2 = 0, prev = 1;
  for (double v : diag) {
    const Big cur = (Big(v) - Big(E)) * prev - prev2;
    prev2 = prev;
    prev = cur;
  }
  return prev;
}

inline Eigen::MatrixXd tridiagonal(std::span<const double> diag) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = -1.0;
  }
  return h;
}

inline std::vector<double> dense_eigenvalues(std::span<const double> diag) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tridiagonal(diag), Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Roots of z^k + c[k-1] z^{k-1} + ... + c[0] from the companion matrix.
inline std::vector<std::complex<double>> companion_roots(std::span<const std::complex<double>> c) {
  const auto k = static_cast<Eigen::Index>(c.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k, k);
  for (Eigen::Index i = 1; i < k; ++i) m(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < k; ++i) m(i, k - 1) = -c[static_cast<std::size_t>(i)];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  return {es.eigenvalues().data(), es.eigenvalues().data() + k};
}

}  // namespace oracle
