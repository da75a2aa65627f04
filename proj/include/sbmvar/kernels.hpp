#pragma once

// Dense double-precision reductions used by the inner loops of the E-step,
// M-step, ELBO and error metrics. A scalar reference implementation is always
// available; AVX2+FMA (x86-64) and NEON (aarch64) variants are selected at
// runtime. Set SBMVAR_SIMD=scalar|avx2|neon|auto to override the choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace sbmvar::kernels {

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // sum_i w[i] * (a[i] - b[i])^2
  double (*weighted_squared_distance)(const double* a, const double* b, const double* w,
                                      std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the variant is not compiled in or not supported by this CPU.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

/// Table picked at first use (best supported, or the SBMVAR_SIMD override).
const KernelTable& active() noexcept;
/// Replace the active table; returns the previous one. Intended for tests and benchmarks.
const KernelTable& set_active(const KernelTable& table) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}
inline double weighted_squared_distance(std::span<const double> a, std::span<const double> b,
                                        std::span<const double> w) {
  return active().weighted_squared_distance(a.data(), b.data(), w.data(), a.size());
}

}  // namespace sbmvar::kernels
