#include "persuade/rng.hpp"

namespace persuade {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng Rng::derive(std::uint64_t seed, std::string_view label, std::uint64_t a,
                std::uint64_t b) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ hash64(label));
  s = mix64(s ^ a);
  s = mix64(s ^ b);
  return Rng(s);
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint32_t Rng::below(std::uint32_t bound) {
  // Rejection sampling over the top 32 bits.
  const std::uint64_t span = 0x100000000ULL;
  const std::uint64_t limit = span - span % bound;
  for (;;) {
    std::uint64_t v = next_u64() >> 32;
    if (v < limit) return static_cast<std::uint32_t>(v % bound);
  }
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

long Rng::binomial(long n, double p) {
  long k = 0;
  for (long i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
  return k;
}

}  // namespace persuade
