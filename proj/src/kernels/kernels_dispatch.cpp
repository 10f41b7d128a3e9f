#include "semcom/kernels.hpp"

#include <cstdlib>
#include <string>

namespace semcom::kernels {

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_has_avx2() { return __builtin_cpu_supports("avx2"); }
#endif

namespace {

const KernelTable* pick_default() {
#if defined(__x86_64__) || defined(_M_X64)
  if (const char* env = std::getenv("SEMCOM_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar::table;
    if (want == "avx2" && cpu_has_avx2()) return &avx2::table;
  }
  if (cpu_has_avx2()) return &avx2::table;
#endif
  return &scalar::table;
}

const KernelTable*& current() {
  static const KernelTable* t = pick_default();
  return t;
}

}  // namespace

const KernelTable& active() { return *current(); }

bool select_backend(const std::string& name) {
  if (name == "scalar") {
    current() = &scalar::table;
    return true;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2" && cpu_has_avx2()) {
    current() = &avx2::table;
    return true;
  }
#endif
  return false;
}

}  // namespace semcom::kernels
