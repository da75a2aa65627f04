#include <atomic>
#include <cstdlib>
#include <string_view>

#include "sbmvar/kernels.hpp"

namespace sbmvar::kernels {
namespace {

const KernelTable* pick() noexcept {
  const char* env = std::getenv("SBMVAR_SIMD");
  const std::string_view want = env ? env : "auto";
  if (want == "scalar") return &scalar_table();
  if (want == "avx2" && avx2_table()) return avx2_table();
  if (want == "neon" && neon_table()) return neon_table();
  if (const auto* t = avx2_table()) return t;
  if (const auto* t = neon_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{pick()};
  return table;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

const KernelTable& set_active(const KernelTable& table) noexcept {
  return *slot().exchange(&table, std::memory_order_acq_rel);
}

}  // namespace sbmvar::kernels
