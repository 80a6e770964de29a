#include <atomic>

#include "relucond/kernels.hpp"
#include "relucond/types.hpp"

namespace relucond::kernels {

const Ops* avx2_ops();  // defined in kernels_avx2.cpp (null if not built in)

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* detect() {
  if (const Ops* simd = avx2_ops(); simd != nullptr && cpu_has_avx2()) return simd;
  return &scalar_ops();
}

}  // namespace

const Ops* simd_ops() {
  const Ops* simd = avx2_ops();
  return (simd != nullptr && cpu_has_avx2()) ? simd : nullptr;
}

bool simd_available() { return simd_ops() != nullptr; }

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (ops == nullptr) {
    ops = detect();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

void set_backend(Backend b) {
  switch (b) {
    case Backend::auto_detect:
      g_active.store(detect(), std::memory_order_release);
      break;
    case Backend::scalar:
      g_active.store(&scalar_ops(), std::memory_order_release);
      break;
    case Backend::simd: {
      const Ops* simd = simd_ops();
      if (simd == nullptr) throw InputError("SIMD kernels unavailable on this CPU/build");
      g_active.store(simd, std::memory_order_release);
      break;
    }
  }
}

}  // namespace relucond::kernels
