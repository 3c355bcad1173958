#pragma once

#include <cstdint>

namespace mcsim {

// Deterministic exp(x) for the simulation core.
//
// Trace and rewiring artifacts must be byte-identical across platforms for a
// given seed, and libm implementations differ in the last ulp. This variant
// uses only IEEE arithmetic (Cody-Waite argument reduction, Taylor polynomial,
// exact power-of-two scaling) and therefore produces identical bits on every
// conforming platform. Accuracy is within ~1 ulp of correctly rounded over the
// range the engine uses; tests pin the bound against std::exp.
double det_exp(double x) noexcept;

// splitmix64, used for seeding.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// xoshiro256** PRNG with rejection-sampled bounded draws. Unlike
// std::uniform_int_distribution, the draw sequence is identical on every
// platform, which the fixed-seed reproducibility guarantees rely on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) { reseed(seed); }

  void reseed(std::uint64_t seed);
  std::uint64_t next();

  // Uniform in [0, n); n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n);

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01();

 private:
  std::uint64_t s_[4]{};
};

}  // namespace mcsim
