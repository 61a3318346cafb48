#pragma once

// Shared helpers for the test suites: random matrices, synthetic exact-data
// generators, and small statistics utilities. Oracles used by the tests are
// written here or inline, independent of the library implementation paths
// they check.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "gsopt/gateset.hpp"
#include "gsopt/hs.hpp"
#include "gsopt/rng.hpp"

namespace gsopt::test {

inline Mat2c random_unitary(Rng& rng) {
  const double nx = rng.normal(0.0, 1.0);
  const double ny = rng.normal(0.0, 1.0);
  const double nz = rng.normal(0.0, 1.0);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return rotation_unitary(angle, nx, ny, nz);
}

inline Mat2c random_density_matrix(Rng& rng) {
  // random Bloch vector with |r| <= 1
  double x, y, z;
  do {
    x = rng.uniform(-1.0, 1.0);
    y = rng.uniform(-1.0, 1.0);
    z = rng.uniform(-1.0, 1.0);
  } while (x * x + y * y + z * z > 1.0);
  const auto& s = PauliBasis::sigmas();
  return 0.5 * (Mat2c::Identity() + x * s[1] + y * s[2] + z * s[3]);
}

inline Mat4 random_matrix(Rng& rng, double scale = 1.0) {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = scale * rng.normal(0.0, 1.0);
  return m;
}

/// A synthetic "true" model: explicit gate maps plus state/effect vectors.
/// Expectation data generated here is exact (no sampling), independent of the
/// plant.
struct SyntheticModel {
  std::array<Mat4, kNumGates> gates;
  Vec4 rho;
  Vec4 effect;

  static SyntheticModel ideal(const GateSet& gs) {
    SyntheticModel m;
    for (int k = 0; k < kNumGates; ++k) m.gates[k] = gs.targets[k].m;
    m.rho = ground_state().coords;
    m.effect = ground_state().coords;
    return m;
  }

  double probability(const std::vector<int>& gate_indices) const {
    Vec4 v = rho;
    for (int g : gate_indices) v = gates[g] * v;
    return effect.dot(v);
  }

  /// p_ijk expectation matrices, (i, j) indexed over the SPAM set.
  std::array<Mat4, kNumGates> gtilde() const {
    std::array<Mat4, kNumGates> out;
    for (int k = 0; k < kNumGates; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          out[k](i, j) = probability({kSpamIndices[j], k, kSpamIndices[i]});
    return out;
  }
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  const double m = mean_of(v);
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  return std::sqrt(var / static_cast<double>(v.size() - 1));
}

}  // namespace gsopt::test
