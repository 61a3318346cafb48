#include "gsopt/gateset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "gsopt/errors.hpp"

namespace gsopt {

namespace {

constexpr double kPi = std::numbers::pi;

// Entries of every gate-set / Clifford PTM are 0 or +-1 (signed permutation
// matrices), so rounding gives an exact canonical key.
std::array<int, 16> ptm_key(const Ptm& p) {
  std::array<int, 16> key{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double v = p.m(i, j);
      const int r = static_cast<int>(std::lround(v));
      if (std::abs(v - r) > 1e-9 || r < -1 || r > 1)
        throw NumericalError("ptm_key: matrix entry is not a signed unit");
      key[i * 4 + j] = r;
    }
  return key;
}

}  // namespace

const std::array<GateRotation, kNumGates>& gate_rotations() {
  static const std::array<GateRotation, kNumGates> rot = {{
      {0.0, true},          // I
      {kPi / 2.0, true},    // X90
      {-kPi / 2.0, true},   // -X90
      {kPi / 2.0, false},   // Y90
      {-kPi / 2.0, false},  // -Y90
      {kPi, true},          // X180
      {kPi, false},         // Y180
  }};
  return rot;
}

GateSet build_gateset() {
  GateSet gs;
  const auto& rot = gate_rotations();
  for (int k = 0; k < kNumGates; ++k) {
    gs.unitaries[k] = rotation_unitary(rot[k].angle, rot[k].about_x ? 1.0 : 0.0,
                                       rot[k].about_x ? 0.0 : 1.0, 0.0);
    gs.targets[k] = unitary_to_ptm(gs.unitaries[k]);
  }
  return gs;
}

PulseShape calibrated_pulse(int gate, double duration, double dt) {
  if (gate < 0 || gate >= kNumGates)
    throw ValidationError("calibrated_pulse: gate index out of range");
  const auto& rot = gate_rotations()[gate];
  if (gate == kIdle) {
    PulseShape idle;
    idle.dt = dt;
    idle.ax.assign(1, 0.0);
    idle.ay.assign(1, 0.0);
    return idle;
  }
  PulseShape p = rectangular(std::abs(rot.angle) / duration, duration, dt);
  if (rot.angle < 0.0) p = p.scaled(-1.0);
  if (!rot.about_x) std::swap(p.ax, p.ay);
  return p;
}

GateSet build_gateset(double dt, double gate_duration) {
  GateSet gs = build_gateset();
  for (int k = 0; k < kNumGates; ++k)
    gs.pulses[k] = calibrated_pulse(k, gate_duration, dt);
  return gs;
}

double CliffordTable::mean_length() const {
  double total = 0.0;
  for (const auto& d : decompositions) total += static_cast<double>(d.size());
  return total / 24.0;
}

CliffordTable build_clifford_table(const GateSet& gs) {
  // breadth-first search over products of the non-idle gates; the first
  // (shortest, lexicographically earliest) decomposition per element wins
  std::map<std::array<int, 16>, std::vector<int>> found;
  found.emplace(ptm_key(gs.targets[kIdle]), std::vector<int>{kIdle});

  std::vector<std::pair<Ptm, std::vector<int>>> frontier;
  frontier.emplace_back(gs.targets[kIdle], std::vector<int>{});
  while (found.size() < 24 && !frontier.empty()) {
    std::vector<std::pair<Ptm, std::vector<int>>> next;
    for (const auto& [ptm, word] : frontier) {
      for (int g = 1; g < kNumGates; ++g) {
        Ptm prod = gs.targets[g] * ptm;  // gate g applied after `word`
        auto key = ptm_key(prod);
        std::vector<int> extended = word;
        extended.push_back(g);
        if (found.emplace(std::move(key), extended).second)
          next.emplace_back(prod, std::move(extended));
      }
    }
    frontier = std::move(next);
  }
  if (found.size() != 24)
    throw NumericalError("build_clifford_table: generated group is not of order 24");

  CliffordTable table;
  // deterministic ordering: identity first, then by (length, lexicographic word)
  std::vector<std::vector<int>> words;
  words.reserve(24);
  for (const auto& [key, word] : found) words.push_back(word);
  std::sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (int i = 0; i < 24; ++i) {
    table.decompositions[i] = words[i];
    Ptm prod = gs.targets[kIdle];
    for (int g : words[i]) prod = gs.targets[g] * prod;
    table.composed[i] = prod;
  }

  // closure and distinctness check
  std::map<std::array<int, 16>, int> index_of;
  for (int i = 0; i < 24; ++i) {
    if (!index_of.emplace(ptm_key(table.composed[i]), i).second)
      throw NumericalError("build_clifford_table: duplicate composed PTM");
  }
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 24; ++j)
      if (!index_of.count(ptm_key(table.composed[i] * table.composed[j])))
        throw NumericalError("build_clifford_table: group not closed under composition");
  return table;
}

int invert_clifford(const CliffordTable& table, const Ptm& product) {
  // identify `product` as a group element first
  double min_dist = std::numeric_limits<double>::infinity();
  for (const auto& c : table.composed)
    min_dist = std::min(min_dist, (c.m - product.m).norm());
  if (min_dist > 1e-6)
    throw LookupError("invert_clifford: product is not an element of the Clifford group");

  const Vec4 zero = ground_state().coords;
  int best = -1;
  double best_identity_dist = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 24; ++j) {
    const Mat4 full = table.composed[j].m * product.m;
    if (std::abs(zero.dot(full * zero) - 1.0) > 1e-9) continue;
    const double d = (full - Mat4::Identity()).norm();
    if (d < best_identity_dist) {
      best_identity_dist = d;
      best = j;
    }
  }
  if (best < 0)
    throw LookupError("invert_clifford: no recovery Clifford restores |0>>");
  return best;
}

Circuit sample_clifford_circuit(const CliffordTable& table, int m, Rng& rng) {
  if (m < 0) throw ValidationError("sample_clifford_circuit: m must be >= 0");
  Circuit c;
  c.kind = Circuit::Kind::CliffordString;
  c.indices.reserve(m);
  Ptm product;
  for (int i = 0; i < m; ++i) {
    const int idx = rng.uniform_int(24);
    c.indices.push_back(idx);
    product = table.composed[idx] * product;
  }
  c.recovery = invert_clifford(table, product);
  return c;
}

Circuit sample_gate_string(int length, Rng& rng) {
  if (length < 0) throw ValidationError("sample_gate_string: length must be >= 0");
  Circuit c;
  c.kind = Circuit::Kind::GateString;
  c.indices.reserve(length);
  for (int i = 0; i < length; ++i) c.indices.push_back(rng.uniform_int(kNumGates));
  return c;
}

std::vector<int> flatten_to_gates(const Circuit& circuit, const CliffordTable* table) {
  if (circuit.kind == Circuit::Kind::GateString) {
    for (int g : circuit.indices)
      if (g < 0 || g >= kNumGates)
        throw ValidationError("flatten_to_gates: gate index out of range");
    return circuit.indices;
  }
  if (table == nullptr)
    throw ValidationError("flatten_to_gates: Clifford circuit requires a table");
  std::vector<int> gates;
  for (int c : circuit.indices) {
    if (c < 0 || c >= 24)
      throw ValidationError("flatten_to_gates: Clifford index out of range");
    const auto& d = table->decompositions[c];
    gates.insert(gates.end(), d.begin(), d.end());
  }
  if (circuit.recovery >= 0) {
    const auto& d = table->decompositions[circuit.recovery];
    gates.insert(gates.end(), d.begin(), d.end());
  }
  return gates;
}

Ptm circuit_target_ptm(const Circuit& circuit, const GateSet& gs, const CliffordTable* table) {
  Ptm product;
  for (int g : flatten_to_gates(circuit, table)) product = gs.targets[g] * product;
  return product;
}

int matched_gate_length(int clifford_length) {
  return static_cast<int>(std::lround(1.8 * clifford_length));
}

}  // namespace gsopt
