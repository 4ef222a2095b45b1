#include <atomic>
#include <cstdlib>
#include <string>

#include "qpc/errors.hpp"
#include "qpc/kernels.hpp"

namespace qpc::kernels {

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("QPC_SIMD"); env != nullptr && std::string(env) == "scalar") return Isa::scalar;
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(QPC_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detected_isa() { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw DomainError("kernels: " + std::string(isa_name(isa)) + " not supported here");
  active().store(isa, std::memory_order_relaxed);
}

void sturm_counts(Isa isa, std::span<const double> diag, std::span<const double> shifts,
                  std::span<std::int32_t> counts) {
  if (counts.size() != shifts.size()) throw DomainError("sturm_counts: size mismatch");
#if defined(QPC_HAVE_AVX2)
  if (isa == Isa::avx2) {
    detail::sturm_counts_avx2(diag.data(), diag.size(), shifts.data(), shifts.size(), counts.data());
    return;
  }
#endif
  (void)isa;
  detail::sturm_counts_scalar(diag.data(), diag.size(), shifts.data(), shifts.size(), counts.data());
}

void sturm_counts(std::span<const double> diag, std::span<const double> shifts, std::span<std::int32_t> counts) {
  sturm_counts(active_isa(), diag, shifts, counts);
}

void transfer_log_norms(Isa isa, std::span<const double> diag, std::size_t lanes, std::span<double> out) {
  if (lanes == 0 || diag.size() % lanes != 0 || out.size() != lanes)
    throw DomainError("transfer_log_norms: layout mismatch");
  const std::size_t n = diag.size() / lanes;
#if defined(QPC_HAVE_AVX2)
  if (isa == Isa::avx2) {
    detail::transfer_log_norms_avx2(diag.data(), n, lanes, out.data());
    return;
  }
#endif
  (void)isa;
  detail::transfer_log_norms_scalar(diag.data(), n, lanes, out.data());
}

void transfer_log_norms(std::span<const double> diag, std::size_t lanes, std::span<double> out) {
  transfer_log_norms(active_isa(), diag, lanes, out);
}

}  // namespace qpc::kernels
