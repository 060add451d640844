#include <cstdlib>
#include <string_view>

#include "qsn/kernels.hpp"

namespace qsn::kernels {

const KernelTable& scalar_table() noexcept { return detail::kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(QSN_WITH_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  static const KernelTable& chosen = []() -> const KernelTable& {
    if (const char* env = std::getenv("QSN_KERNELS"); env && std::string_view(env) == "scalar") {
      return scalar_table();
    }
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace qsn::kernels
