#include "mcsim/detmath.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace mcsim {

namespace {

// ln(2) split into a high part exact in double and a low correction term.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kLog2E = 1.44269504088896340736e+00;

// Exact scaling by 2^n for |n| within the normal exponent range.
double scale_pow2(double x, long n) {
  // Split the shift so the intermediate factor never overflows/underflows
  // while the final result is still representable.
  while (n > 1000) {
    x *= 0x1p1000;
    n -= 1000;
  }
  while (n < -1000) {
    x *= 0x1p-1000;
    n += 1000;
  }
  const std::uint64_t bits = static_cast<std::uint64_t>(n + 1023) << 52;
  return x * std::bit_cast<double>(bits);
}

}  // namespace

double det_exp(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x > 709.782712893384) return std::numeric_limits<double>::infinity();
  if (x < -745.2) return 0.0;

  // x = n*ln2 + r with |r| <= ln2/2.
  const double nd = std::floor(x * kLog2E + 0.5);
  const long n = static_cast<long>(nd);
  const double r = (x - nd * kLn2Hi) - nd * kLn2Lo;

  // Taylor series of exp(r); |r| <= 0.3466 so the r^13 term is < 2^-52.
  double p = 1.0 / 6227020800.0;  // 1/13!
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;

  return scale_pow2(p, n);
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void Rng::reseed(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Rng::next() {
  const auto rotl = [](std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  };
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  // Rejection sampling over the largest multiple of n that fits in 64 bits
  // keeps the draw unbiased and platform independent.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return v % n;
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

}  // namespace mcsim
