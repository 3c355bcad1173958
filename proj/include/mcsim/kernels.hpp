#pragma once

#include <cstddef>

// Platform detection for the vectorized kernel variants. The scalar
// reference kernels build everywhere; per-ISA variants are compiled into
// separate translation units and chosen at runtime.
#if defined(__x86_64__) || defined(_M_X64)
#define MCSIM_ARCH_X86 1
#else
#define MCSIM_ARCH_X86 0
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define MCSIM_ARCH_ARM64 1
#else
#define MCSIM_ARCH_ARM64 0
#endif

namespace mcsim::kernels {

// Elementwise inner loops of the per-step update. All variants of one kernel
// perform the identical IEEE operation sequence per element (no FMA, no
// reassociation), so scalar and vector backends produce bit-identical
// results and the engine output does not depend on the selected backend.
struct Ops {
  // a[i] *= b[i] -- dendritic line decay with per-compartment factors.
  void (*mul_inplace)(double* a, const double* b, std::size_t n);
  // out[i] = a[i] * b[i] -- synaptic conductance from line deviation.
  void (*mul)(double* out, const double* a, const double* b, std::size_t n);
  // v[i] = v_inf[i] + (v[i] - v_inf[i]) * alpha[i] -- exponential-Euler step.
  void (*exp_euler)(double* v, const double* v_inf, const double* alpha,
                    std::size_t n);
};

enum class Backend { Scalar = 0, Avx2, Neon };

const char* backend_name(Backend b);
bool backend_available(Backend b);

// Kernels of a specific backend; null pointers if unavailable on this host.
const Ops* backend_ops(Backend b);

// The dispatched backend: best available unless overridden.
Backend active_backend();
const Ops& active();

// Force a backend (used by the CLI flag and the equivalence tests).
// Returns false if the backend is not available on this host.
bool force_backend(Backend b);
void reset_backend();  // back to auto-detection

}  // namespace mcsim::kernels
