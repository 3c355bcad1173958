// Scalar reference kernels. These define the semantics; the vector variants
// must match them bit for bit.

#include "mcsim/kernels.hpp"

namespace mcsim::kernels {

namespace {

void mul_inplace_scalar(double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
}

void mul_scalar(double* out, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void exp_euler_scalar(double* v, const double* v_inf, const double* alpha,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    v[i] = v_inf[i] + (v[i] - v_inf[i]) * alpha[i];
}

}  // namespace

extern const Ops kScalarOps;
const Ops kScalarOps = {mul_inplace_scalar, mul_scalar, exp_euler_scalar};

}  // namespace mcsim::kernels
