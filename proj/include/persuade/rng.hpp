#pragma once

#include <cstdint>
#include <string_view>

namespace persuade {

// splitmix64 step.
std::uint64_t mix64(std::uint64_t x);

// FNV-1a over raw bytes; used to fold string labels into seeds.
std::uint64_t hash64(std::string_view bytes);

// Deterministic generator with hand-rolled distributions. The <random>
// engines are portable but the standard distributions are
// implementation-defined, which would break the byte-identical ledger
// contract across toolchains, so the few draws we need live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Child stream seeded from (seed, label, a, b); distinct inputs give
  // independent streams, so concurrent callers cannot perturb each other.
  static Rng derive(std::uint64_t seed, std::string_view label,
                    std::uint64_t a = 0, std::uint64_t b = 0);

  std::uint64_t next_u64();

  // Uniform in [0, bound), bound > 0. Rejection-sampled, no modulo bias.
  std::uint32_t below(std::uint32_t bound);

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01();

  bool bernoulli(double p);

  // Sum of n Bernoulli(p) draws. n is small everywhere this is used.
  long binomial(long n, double p);

 private:
  std::uint64_t state_;
};

}  // namespace persuade
