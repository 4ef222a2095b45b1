#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "qpc/kernels.hpp"

namespace qpc::kernels::detail {

double finish_log_norm(double a, double b, double c, double d, std::int64_t log2_scale) {
  const double frob = a * a + b * b + c * c + d * d;
  const double det = std::abs(a * d - b * c);
  const double disc = std::max(frob * frob - 4.0 * det * det, 0.0);
  const double sigma2 = 0.5 * (frob + std::sqrt(disc));
  return static_cast<double>(log2_scale) * std::numbers::ln2 + 0.5 * std::log(sigma2);
}

std::int32_t sturm_count_one(const double* diag, std::size_t n, double s) {
  std::int32_t neg = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    q = i == 0 ? diag[i] - s : (diag[i] - s) - 1.0 / q;
    if (std::abs(q) < kPivotFloor) q = -kPivotFloor;
    neg += q < 0.0 ? 1 : 0;
  }
  return neg;
}

void sturm_counts_scalar(const double* diag, std::size_t n, const double* shifts, std::size_t m,
                         std::int32_t* counts) {
  for (std::size_t j = 0; j < m; ++j) counts[j] = sturm_count_one(diag, n, shifts[j]);
}

namespace {

// Rescale (a, b, c, d) so the largest magnitude lands in [1, 2); returns the
// binary exponent removed. Bit-level so the AVX2 variant can match exactly.
std::int64_t renormalize(double& a, double& b, double& c, double& d) {
  const double mx = std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  const auto bits = std::bit_cast<std::uint64_t>(mx);
  const auto biased = static_cast<std::int64_t>((bits >> 52) & 0x7ff);
  const auto factor = std::bit_cast<double>(static_cast<std::uint64_t>(2046 - biased) << 52);
  a *= factor;
  b *= factor;
  c *= factor;
  d *= factor;
  return biased - 1023;
}

}  // namespace

double transfer_log_norm_lane(const double* diag, std::size_t n, std::size_t stride, std::size_t lane) {
  // Rows of the running product: (a, b) on top, (c, d) below.
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  std::int64_t scale = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = diag[k * stride + lane];
    const double na = v * a - c;
    const double nb = v * b - d;
    c = a;
    d = b;
    a = na;
    b = nb;
    if ((k + 1) % kRenormEvery == 0) scale += renormalize(a, b, c, d);
  }
  return finish_log_norm(a, b, c, d, scale);
}

void transfer_log_norms_scalar(const double* diag, std::size_t n, std::size_t lanes, double* out) {
  for (std::size_t l = 0; l < lanes; ++l) out[l] = transfer_log_norm_lane(diag, n, lanes, l);
}

}  // namespace qpc::kernels::detail
