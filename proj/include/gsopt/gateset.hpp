#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gsopt/hs.hpp"
#include "gsopt/pulse.hpp"
#include "gsopt/rng.hpp"

namespace gsopt {

//=========================================================================
// The 7-gate target set {I, X90, -X90, Y90, -Y90, X180, Y180}, the 4-element
// SPAM set, single-qubit Clifford synthesis over the gate-set, and random
// circuit sampling. Rotation convention: angle theta about axis n means
// U = exp(-i theta (n . sigma) / 2).
//=========================================================================

constexpr int kNumGates = 7;

enum GateIndex : int {
  kIdle = 0,
  kXHalf = 1,
  kXHalfNeg = 2,
  kYHalf = 3,
  kYHalfNeg = 4,
  kXPi = 5,
  kYPi = 6,
};

/// SPAM gate indices into the gate-set: {I, X90, Y90, X180} prepare/measure
/// along all Bloch axes.
constexpr std::array<int, 4> kSpamIndices = {0, 1, 3, 5};

/// Rotation (angle, x-axis?) realizing each gate; y-axis otherwise.
struct GateRotation {
  double angle;
  bool about_x;
};
const std::array<GateRotation, kNumGates>& gate_rotations();

struct GateSet {
  std::array<Ptm, kNumGates> targets;
  std::array<Mat2c, kNumGates> unitaries;
  std::array<PulseShape, kNumGates> pulses;  ///< physical realization of each gate
};

/// Target PTMs/unitaries only; pulses left empty.
GateSet build_gateset();

/// Calibrated rectangular pulse for one gate: amplitude angle/duration on the
/// gate's axis (signed); the idle gate is a single zero-amplitude sample.
PulseShape calibrated_pulse(int gate, double duration, double dt);

/// build_gateset() plus calibrated_pulse bindings at a common duration.
GateSet build_gateset(double dt, double gate_duration);

/// The 24 single-qubit Cliffords, each with a shortest decomposition into
/// gate-set indices (BFS over products, deterministic tie-breaking).
struct CliffordTable {
  std::array<std::vector<int>, 24> decompositions;  ///< time order, first gate first
  std::array<Ptm, 24> composed;

  double mean_length() const;
};

/// Throws NumericalError if the synthesized table is not 24 distinct elements
/// closed under composition.
CliffordTable build_clifford_table(const GateSet& gs);

/// Index of the Clifford whose PTM composed after `product` maps |0>> back to
/// |0>>; ties broken by Frobenius distance of the full composition to the
/// identity. Throws LookupError if `product` is not a group element (1e-6).
int invert_clifford(const CliffordTable& table, const Ptm& product);

struct Circuit {
  enum class Kind { GateString, CliffordString };
  Kind kind = Kind::GateString;
  std::vector<int> indices;  ///< gate-set or Clifford indices, time order
  int recovery = -1;         ///< Clifford index, CliffordString only

  int length() const { return static_cast<int>(indices.size()); }
};

/// m uniform Clifford indices plus the recovery gate.
Circuit sample_clifford_circuit(const CliffordTable& table, int m, Rng& rng);

/// L uniform gate-set indices, no recovery.
Circuit sample_gate_string(int length, Rng& rng);

/// Expand a circuit into the gate-set index sequence actually played
/// (Clifford decompositions concatenated, recovery included).
std::vector<int> flatten_to_gates(const Circuit& circuit, const CliffordTable* table);

/// Ideal PTM of the whole circuit (recovery included).
Ptm circuit_target_ptm(const Circuit& circuit, const GateSet& gs, const CliffordTable* table);

/// Gate-string length matched to a Clifford count via the nominal 1.8
/// gates-per-Clifford average (5 -> 9, 10 -> 18, 15 -> 27).
int matched_gate_length(int clifford_length);

}  // namespace gsopt
