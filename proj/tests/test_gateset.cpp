#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gsopt/errors.hpp"
#include "gsopt/gateset.hpp"
#include "support.hpp"

using namespace gsopt;

TEST_CASE("target gates satisfy the group relations") {
  const GateSet gs = build_gateset();
  CHECK((gs.targets[kIdle].m - Mat4::Identity()).norm() < 1e-14);

  Mat4 x_pi = Mat4::Identity();
  x_pi(2, 2) = -1.0;
  x_pi(3, 3) = -1.0;
  CHECK((gs.targets[kXPi].m - x_pi).norm() < 1e-12);

  CHECK(((gs.targets[kXHalfNeg] * gs.targets[kXHalf]).m - Mat4::Identity()).norm() < 1e-12);
  CHECK(((gs.targets[kYHalfNeg] * gs.targets[kYHalf]).m - Mat4::Identity()).norm() < 1e-12);
  CHECK(((gs.targets[kXHalf] * gs.targets[kXHalf]).m - gs.targets[kXPi].m).norm() < 1e-12);
  CHECK(((gs.targets[kYHalf] * gs.targets[kYHalf]).m - gs.targets[kYPi].m).norm() < 1e-12);
}

TEST_CASE("spam set prepares a full-rank frame") {
  const GateSet gs = build_gateset();
  Mat4 frame;
  for (int j = 0; j < 4; ++j)
    frame.col(j) = gs.targets[kSpamIndices[j]].m * ground_state().coords;
  Eigen::JacobiSVD<Mat4> svd(frame);
  CHECK(svd.singularValues()(3) > 0.1);  // Gram rank 4
}

TEST_CASE("clifford table structure") {
  const GateSet gs = build_gateset();
  const CliffordTable table = build_clifford_table(gs);

  CHECK(table.decompositions[0] == std::vector<int>{0});  // identity is the idle gate
  CHECK(table.decompositions[kXPi] == std::vector<int>{kXPi});

  const double mean = table.mean_length();
  CHECK(mean >= 1.7);
  CHECK(mean <= 2.0);

  // pairwise distinct
  for (int i = 0; i < 24; ++i)
    for (int j = i + 1; j < 24; ++j)
      CHECK((table.composed[i].m - table.composed[j].m).norm() > 1e-6);

  // every decomposition composes to its stored PTM
  for (int i = 0; i < 24; ++i) {
    Ptm prod;
    for (int g : table.decompositions[i]) prod = gs.targets[g] * prod;
    CHECK((prod.m - table.composed[i].m).norm() < 1e-12);
  }
}

TEST_CASE("clifford group closure over random pairs") {
  const GateSet gs = build_gateset();
  const CliffordTable table = build_clifford_table(gs);
  Rng rng(515);
  for (int trial = 0; trial < 500; ++trial) {
    const Ptm prod = table.composed[rng.uniform_int(24)] * table.composed[rng.uniform_int(24)];
    double best = 1e9;
    for (const auto& c : table.composed) best = std::min(best, (c.m - prod.m).norm());
    CHECK(best < 1e-9);
  }
}

TEST_CASE("invert_clifford recovers inverses") {
  const GateSet gs = build_gateset();
  const CliffordTable table = build_clifford_table(gs);

  CHECK(invert_clifford(table, Ptm{}) == 0);
  CHECK(invert_clifford(table, gs.targets[kXPi]) == kXPi);

  // oracle: brute-force search for the group inverse of X90
  const Ptm x_half = gs.targets[kXHalf];
  int expected = -1;
  for (int j = 0; j < 24; ++j)
    if (((table.composed[j] * x_half).m - Mat4::Identity()).norm() < 1e-9) expected = j;
  REQUIRE(expected >= 0);
  CHECK(invert_clifford(table, x_half) == expected);

  // recovery maps |0>> back to |0>> for random products
  Rng rng(616);
  const Vec4 zero = ground_state().coords;
  for (int trial = 0; trial < 100; ++trial) {
    Ptm prod;
    for (int k = 0; k < 6; ++k) prod = table.composed[rng.uniform_int(24)] * prod;
    const int rec = invert_clifford(table, prod);
    const Vec4 out = (table.composed[rec] * prod).m * zero;
    CHECK(zero.dot(out) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("invert_clifford rejects non-group input") {
  const GateSet gs = build_gateset();
  const CliffordTable table = build_clifford_table(gs);
  const Ptm odd = unitary_to_ptm(rotation_unitary(0.3, 1, 0, 0));
  CHECK_THROWS_AS(invert_clifford(table, odd), LookupError);
}

TEST_CASE("sample_clifford_circuit contracts") {
  const GateSet gs = build_gateset();
  const CliffordTable table = build_clifford_table(gs);

  Rng rng(717);
  const Circuit empty = sample_clifford_circuit(table, 0, rng);
  CHECK(empty.indices.empty());
  CHECK(empty.recovery == 0);

  // composed PTM including recovery maps |0>> to |0>> by construction
  const Vec4 zero = ground_state().coords;
  for (int trial = 0; trial < 50; ++trial) {
    const Circuit c = sample_clifford_circuit(table, 10, rng);
    const Ptm full = circuit_target_ptm(c, gs, &table);
    CHECK(zero.dot(full.m * zero) == doctest::Approx(1.0).epsilon(1e-9));
  }

  // determinism
  Rng rng_a(42), rng_b(42);
  const Circuit a = sample_clifford_circuit(table, 10, rng_a);
  const Circuit b = sample_clifford_circuit(table, 10, rng_b);
  CHECK(a.indices == b.indices);
  CHECK(a.recovery == b.recovery);
}

TEST_CASE("sample_gate_string contracts") {
  Rng rng(818);
  const Circuit empty = sample_gate_string(0, rng);
  CHECK(empty.indices.empty());
  CHECK(empty.recovery == -1);

  const Circuit c = sample_gate_string(18, rng);
  CHECK(c.length() == 18);
  for (int g : c.indices) {
    CHECK(g >= 0);
    CHECK(g < kNumGates);
  }

  Rng rng_a(42), rng_b(42);
  CHECK(sample_gate_string(18, rng_a).indices == sample_gate_string(18, rng_b).indices);
}

TEST_CASE("clifford sampling is uniform") {
  const GateSet gs = build_gateset();
  const CliffordTable table = build_clifford_table(gs);
  Rng rng(919);
  std::array<int, 24> counts{};
  const int n = 100000;
  const int draws_per_circuit = 5;
  for (int i = 0; i < n / draws_per_circuit; ++i) {
    const Circuit c = sample_clifford_circuit(table, draws_per_circuit, rng);
    for (int idx : c.indices) ++counts[idx];
  }
  const double p = 1.0 / 24.0;
  const double sigma = std::sqrt(n * p * (1.0 - p));
  for (int k = 0; k < 24; ++k) CHECK(std::abs(counts[k] - n * p) < 5.0 * sigma);
}

TEST_CASE("matched gate length reproduces the published pairing") {
  CHECK(matched_gate_length(5) == 9);
  CHECK(matched_gate_length(10) == 18);
  CHECK(matched_gate_length(15) == 27);
}

TEST_CASE("flatten_to_gates expands cliffords and recovery") {
  const GateSet gs = build_gateset();
  const CliffordTable table = build_clifford_table(gs);
  Circuit c;
  c.kind = Circuit::Kind::CliffordString;
  c.indices = {kXPi, 0};
  c.recovery = kXPi;  // X180 X180 = identity, idle in between
  const auto gates = flatten_to_gates(c, &table);
  CHECK(gates == std::vector<int>{kXPi, 0, kXPi});
  CHECK_THROWS_AS(flatten_to_gates(c, nullptr), ValidationError);
}

TEST_CASE("calibrated pulses rotate by the gate angle") {
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  CHECK(gs.pulses[kIdle].ax.size() == 1);
  CHECK(gs.pulses[kIdle].ax[0] == 0.0);
  CHECK(gs.pulses[kXHalf].ax[0] == doctest::Approx((std::numbers::pi / 2) / 30e-9));
  CHECK(gs.pulses[kXHalfNeg].ax[0] == doctest::Approx(-(std::numbers::pi / 2) / 30e-9));
  CHECK(gs.pulses[kYPi].ay[0] == doctest::Approx(std::numbers::pi / 30e-9));
  CHECK(gs.pulses[kYPi].ax[0] == 0.0);
}
