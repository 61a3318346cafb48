#include "gsopt/rng.hpp"

#include <cmath>
#include <numbers>

namespace gsopt {

std::uint64_t mix_seed(std::uint64_t state, std::uint64_t key) {
  // splitmix64 finalizer applied to state ^ golden-ratio-spread key
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL * (key + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed) {
  // expand the seed into xoshiro256** state via splitmix64
  std::uint64_t z = seed;
  for (auto& s : s_) {
    z += 0x9e3779b97f4a7c15ULL;
    std::uint64_t t = z;
    t = (t ^ (t >> 30)) * 0xbf58476d1ce4e5b9ULL;
    t = (t ^ (t >> 27)) * 0x94d049bb133111ebULL;
    s = t ^ (t >> 31);
  }
}

static inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t Rng::next_u64() {
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

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::uniform_int(int n) {
  // rejection sampling on the top bits; unbiased for any n >= 1
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<int>(x % bound);
}

double Rng::normal(double mean, double stddev) {
  // Box-Muller, cosine branch only (one fresh sample per call)
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

long Rng::binomial(long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const double mean = static_cast<double>(n) * p;
  const double var = mean * (1.0 - p);
  if (var >= 25.0) {
    // Gaussian approximation; relative error is far below shot noise here
    const double k = std::round(normal(mean, std::sqrt(var)));
    if (k < 0.0) return 0;
    if (k > static_cast<double>(n)) return n;
    return static_cast<long>(k);
  }
  if (n <= 1024) {
    long k = 0;
    for (long i = 0; i < n; ++i) {
      if (uniform() < p) ++k;
    }
    return k;
  }
  // large n, small n*p (or n*(1-p)): geometric waiting-time method
  const bool flipped = p > 0.5;
  const double q = flipped ? 1.0 - p : p;
  const double log1q = std::log1p(-q);
  long k = 0;
  long sum = 0;
  while (true) {
    const double u = 1.0 - uniform();  // (0, 1]
    sum += static_cast<long>(std::floor(std::log(u) / log1q)) + 1;
    if (sum > n) break;
    ++k;
  }
  return flipped ? n - k : k;
}

}  // namespace gsopt
