// Runtime backend selection for the elementwise kernels.

#include "mcsim/kernels.hpp"

namespace mcsim::kernels {

extern const Ops kScalarOps;
#if MCSIM_ARCH_X86
extern const Ops kAvx2Ops;
#endif
#if MCSIM_ARCH_ARM64
extern const Ops kNeonOps;
#endif

namespace {

bool host_has_avx2() {
#if MCSIM_ARCH_X86 && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend detect_backend() {
#if MCSIM_ARCH_X86
  if (host_has_avx2()) return Backend::Avx2;
#endif
#if MCSIM_ARCH_ARM64
  return Backend::Neon;
#endif
  return Backend::Scalar;
}

Backend g_active = detect_backend();

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "?";
}

bool backend_available(Backend b) { return backend_ops(b) != nullptr; }

const Ops* backend_ops(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &kScalarOps;
    case Backend::Avx2:
#if MCSIM_ARCH_X86
      if (host_has_avx2()) return &kAvx2Ops;
#endif
      return nullptr;
    case Backend::Neon:
#if MCSIM_ARCH_ARM64
      return &kNeonOps;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Backend active_backend() { return g_active; }

const Ops& active() { return *backend_ops(g_active); }

bool force_backend(Backend b) {
  if (!backend_available(b)) return false;
  g_active = b;
  return true;
}

void reset_backend() { g_active = detect_backend(); }

}  // namespace mcsim::kernels
