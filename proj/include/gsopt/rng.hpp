#pragma once

#include <cstdint>
#include <string_view>

namespace gsopt {

/// splitmix64 step; decorrelates derived seeds.
std::uint64_t mix_seed(std::uint64_t state, std::uint64_t key);

/// FNV-1a hash of a tag string, for purpose-scoped seed derivation.
std::uint64_t hash_tag(std::string_view tag);

/// Deterministic random stream (xoshiro-free, hand-rolled on splitmix64 +
/// mt19937_64 state). All samplers below are implemented in this library so
/// that generated sequences do not depend on the standard library's
/// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                        ///< [0, 1)
  double uniform(double lo, double hi);    ///< [lo, hi)
  int uniform_int(int n);                  ///< uniform on {0, ..., n-1}
  double normal(double mean, double stddev);
  /// Binomial(n, p) sample; exact for small n, Gaussian approximation once
  /// n*p*(1-p) is large enough that the approximation error is negligible.
  long binomial(long n, double p);

 private:
  std::uint64_t s_[4];
};

/// Seed handle supporting hierarchical derivation of independent substreams,
/// e.g. (run seed) -> (evaluation index) -> (circuit index).
struct SeedSeq {
  std::uint64_t state = 0;

  SeedSeq child(std::uint64_t key) const { return SeedSeq{mix_seed(state, key)}; }
  SeedSeq child(std::string_view tag) const { return child(hash_tag(tag)); }
  Rng rng() const { return Rng(state); }
};

}  // namespace gsopt
