// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "projlab/kernels.hpp"

namespace projlab::kernels {

#if defined(PROJLAB_HAVE_AVX2)
namespace detail {
const Table& avx2_table();
}
#endif

const Table* avx2() {
#if defined(PROJLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  static const Table& table = []() -> const Table& {
    if (const char* env = std::getenv("PROJLAB_KERNELS");
        env != nullptr && std::string_view(env) == "scalar")
      return scalar();
    if (const Table* t = avx2()) return *t;
    return scalar();
  }();
  return table;
}

}  // namespace projlab::kernels
