#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2 variant selected at runtime. Both variants perform the same IEEE
// operations in the same order, so their outputs are bitwise identical.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace qpc::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Best variant supported by this CPU and build.
Isa detected_isa();

/// Variant used by the dispatching entry points. Defaults to detected_isa(),
/// or scalar when QPC_SIMD=scalar is set in the environment.
Isa active_isa();

/// Throws DomainError if isa is not supported here.
void set_active_isa(Isa isa);

bool isa_supported(Isa isa);

/// counts[i] = number of eigenvalues below shifts[i] of the symmetric
/// tridiagonal matrix with the given diagonal and off-diagonal -1
/// (negative pivots of the LDL^T factorisation at each shift).
void sturm_counts(std::span<const double> diag, std::span<const double> shifts, std::span<std::int32_t> counts);
void sturm_counts(Isa isa, std::span<const double> diag, std::span<const double> shifts,
                  std::span<std::int32_t> counts);

/// For each lane l, out[l] = log || A_n ... A_1 || with real one-step
/// matrices A_k = [[diag[(k-1) * lanes + l], -1], [1, 0]].
void transfer_log_norms(std::span<const double> diag, std::size_t lanes, std::span<double> out);
void transfer_log_norms(Isa isa, std::span<const double> diag, std::size_t lanes, std::span<double> out);

namespace detail {

inline constexpr double kPivotFloor = 1e-300;
inline constexpr int kRenormEvery = 4;

// Variant entry points; avx2 ones exist only when compiled in.
void sturm_counts_scalar(const double* diag, std::size_t n, const double* shifts, std::size_t m,
                         std::int32_t* counts);
void transfer_log_norms_scalar(const double* diag, std::size_t n, std::size_t lanes, double* out);
void sturm_counts_avx2(const double* diag, std::size_t n, const double* shifts, std::size_t m,
                       std::int32_t* counts);
void transfer_log_norms_avx2(const double* diag, std::size_t n, std::size_t lanes, double* out);

std::int32_t sturm_count_one(const double* diag, std::size_t n, double shift);
double transfer_log_norm_lane(const double* diag, std::size_t n, std::size_t stride, std::size_t lane);

// log of the largest singular value of e^{log2_scale ln 2} [[a, b], [c, d]].
double finish_log_norm(double a, double b, double c, double d, std::int64_t log2_scale);

}  // namespace detail

}  // namespace qpc::kernels
