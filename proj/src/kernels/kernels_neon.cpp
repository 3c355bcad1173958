// NEON variants (aarch64). Vector main loop over 2 doubles, scalar remainder.
// vmulq_f64 / vaddq_f64 round exactly like the scalar operators; no fused
// multiply-add, so results match the scalar reference bit for bit.

#include "mcsim/kernels.hpp"

#if MCSIM_ARCH_ARM64

#include <arm_neon.h>

namespace mcsim::kernels {

namespace {

void mul_inplace_neon(double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t va = vld1q_f64(a + i);
    const float64x2_t vb = vld1q_f64(b + i);
    vst1q_f64(a + i, vmulq_f64(va, vb));
  }
  for (; i < n; ++i) a[i] *= b[i];
}

void mul_neon(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t va = vld1q_f64(a + i);
    const float64x2_t vb = vld1q_f64(b + i);
    vst1q_f64(out + i, vmulq_f64(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void exp_euler_neon(double* v, const double* v_inf, const double* alpha,
                    std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vv = vld1q_f64(v + i);
    const float64x2_t vi = vld1q_f64(v_inf + i);
    const float64x2_t va = vld1q_f64(alpha + i);
    const float64x2_t diff = vsubq_f64(vv, vi);
    vst1q_f64(v + i, vaddq_f64(vi, vmulq_f64(diff, va)));
  }
  for (; i < n; ++i) v[i] = v_inf[i] + (v[i] - v_inf[i]) * alpha[i];
}

}  // namespace

extern const Ops kNeonOps;
const Ops kNeonOps = {mul_inplace_neon, mul_neon, exp_euler_neon};

}  // namespace mcsim::kernels

#endif  // MCSIM_ARCH_ARM64
