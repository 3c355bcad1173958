#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "mcsim/detmath.hpp"
#include "mcsim/kernels.hpp"

using namespace mcsim;
using namespace mcsim::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform01();
  return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

TEST_CASE("backend names and availability") {
  CHECK(std::string(backend_name(Backend::Scalar)) == "scalar");
  CHECK(std::string(backend_name(Backend::Avx2)) == "avx2");
  CHECK(std::string(backend_name(Backend::Neon)) == "neon");
  CHECK(backend_available(Backend::Scalar));
  CHECK(backend_ops(Backend::Scalar) != nullptr);
  // The dispatched backend must actually be available.
  CHECK(backend_available(active_backend()));
}

TEST_CASE("force and reset backend") {
  REQUIRE(force_backend(Backend::Scalar));
  CHECK(active_backend() == Backend::Scalar);
  reset_backend();
  CHECK(backend_available(active_backend()));
#if !MCSIM_ARCH_ARM64
  CHECK(!force_backend(Backend::Neon));  // never available off-arm
#endif
  reset_backend();
}

TEST_CASE("vector backends are bit-identical to the scalar reference") {
  const Ops* scalar = backend_ops(Backend::Scalar);
  REQUIRE(scalar != nullptr);

  for (const Backend b : {Backend::Avx2, Backend::Neon}) {
    if (!backend_available(b)) continue;
    INFO("backend " << backend_name(b));
    const Ops* vec = backend_ops(b);
    REQUIRE(vec != nullptr);

    Rng rng(2024);
    // Sizes straddle the vector width: empty, sub-width, exact multiples,
    // and remainders.
    for (const std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 33}) {
      const auto a0 = random_vec(rng, n, -2.0, 2.0);
      const auto b0 = random_vec(rng, n, 0.0, 1.0);
      const auto c0 = random_vec(rng, n, -1.0, 1.0);

      auto s1 = a0;
      auto s2 = a0;
      scalar->mul_inplace(s1.data(), b0.data(), n);
      vec->mul_inplace(s2.data(), b0.data(), n);
      CHECK(bits_equal(s1, s2));

      std::vector<double> o1(n), o2(n);
      scalar->mul(o1.data(), a0.data(), b0.data(), n);
      vec->mul(o2.data(), a0.data(), b0.data(), n);
      CHECK(bits_equal(o1, o2));

      auto v1 = a0;
      auto v2 = a0;
      scalar->exp_euler(v1.data(), c0.data(), b0.data(), n);
      vec->exp_euler(v2.data(), c0.data(), b0.data(), n);
      CHECK(bits_equal(v1, v2));
    }
  }
}

TEST_CASE("scalar kernels compute the documented expressions") {
  const Ops* ops = backend_ops(Backend::Scalar);
  double a[3] = {2.0, -1.5, 0.25};
  const double b[3] = {0.5, 2.0, -4.0};
  ops->mul_inplace(a, b, 3);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == -3.0);
  CHECK(a[2] == -1.0);

  double out[2];
  const double x[2] = {3.0, -2.0};
  const double y[2] = {0.25, 0.5};
  ops->mul(out, x, y, 2);
  CHECK(out[0] == 0.75);
  CHECK(out[1] == -1.0);

  // v' = v_inf + (v - v_inf) * alpha, evaluated in exactly that order.
  double v[2] = {1.0, 0.0};
  const double vinf[2] = {0.5, 1.0};
  const double alpha[2] = {0.5, 0.25};
  ops->exp_euler(v, vinf, alpha, 2);
  CHECK(v[0] == 0.75);
  CHECK(v[1] == 0.75);
}
