// AVX2 variants. Vector main loop over 4 doubles, scalar remainder loop.
// _mm256_mul_pd / _mm256_add_pd round exactly like the scalar operators, and
// FMA is deliberately not used, so results are bit-identical to the scalar
// reference kernels.

#include "mcsim/kernels.hpp"

#if MCSIM_ARCH_X86

#include <immintrin.h>

namespace mcsim::kernels {

namespace {

void mul_inplace_avx2(double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(a + i, _mm256_mul_pd(va, vb));
  }
  for (; i < n; ++i) a[i] *= b[i];
}

void mul_avx2(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void exp_euler_avx2(double* v, const double* v_inf, const double* alpha,
                    std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vv = _mm256_loadu_pd(v + i);
    const __m256d vi = _mm256_loadu_pd(v_inf + i);
    const __m256d va = _mm256_loadu_pd(alpha + i);
    const __m256d diff = _mm256_sub_pd(vv, vi);
    _mm256_storeu_pd(v + i, _mm256_add_pd(vi, _mm256_mul_pd(diff, va)));
  }
  for (; i < n; ++i) v[i] = v_inf[i] + (v[i] - v_inf[i]) * alpha[i];
}

}  // namespace

extern const Ops kAvx2Ops;
const Ops kAvx2Ops = {mul_inplace_avx2, mul_avx2, exp_euler_avx2};

}  // namespace mcsim::kernels

#endif  // MCSIM_ARCH_X86
