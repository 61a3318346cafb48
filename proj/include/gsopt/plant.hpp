#pragma once

#include <cstdint>
#include <vector>

#include "gsopt/gateset.hpp"
#include "gsopt/hs.hpp"
#include "gsopt/pulse.hpp"
#include "gsopt/rng.hpp"

namespace gsopt {

//=========================================================================
// Simulated stand-in for the spin-ensemble experiment: an inhomogeneous
// two-level ensemble driven by sampled pulses, per-gate coherence damping,
// fluorescence readout with shot noise, and the three-part normalization
// sequence (Rabi block, bright-level block, method body).
//=========================================================================

/// One ensemble member: detuning (rad/s), drive-amplitude scale, weight.
struct EnsembleMember {
  double detuning = 0.0;
  double rabi_scale = 1.0;
  double weight = 1.0;
};

enum class DriftMode { None, RandomWalk };

struct EnsembleModel {
  std::vector<EnsembleMember> members;
  double t2 = 2e-6;              ///< per-gate coherence damping time (s)
  long shots = 10000;            ///< counts per expectation value; 0 = analytic mode
  double contrast_c0 = 1.0;      ///< fluorescence rate of |0>
  double contrast_c1 = 0.7;      ///< fluorescence rate of |-1>
  double spam_purity = 0.97;     ///< rho_init = purity |0><0| + (1-purity) I/2
  DriftMode drift = DriftMode::None;
  double drift_sigma = 0.0;      ///< random-walk step on the global rabi scale
  double drift_multiplier = 1.0; ///< current random-walk state
  std::uint64_t seed = 12345;

  HSVector initial_state() const;
  HSVector measurement_effect() const;  ///< ideal |0><0| effect
};

/// Three detuning lines {-delta, 0, +delta} shifted by a common carrier
/// offset, with the given weights, times a Gauss-Hermite discretized Gaussian
/// rabi-scale spread.
EnsembleModel make_ensemble_model(double delta, std::array<double, 3> line_weights,
                                  double rabi_sigma, double detuning_offset = 0.0);

/// The default plant: lines at 2*pi*2 MHz with weights {0.3, 0.4, 0.3}, a
/// common 2*pi*0.8 MHz carrier offset, 3% rabi spread, T2 = 2 us, 1e4 shots,
/// 0.97 initialization purity.
EnsembleModel default_model();

/// Single on-resonance member, analytic readout, pure initialization, no
/// decoherence: produces exact target-model data for calibrated pulses.
EnsembleModel noiseless_model();

/// Time-ordered piecewise-constant propagator of
/// H = (delta/2) sigma_z + (scale/2)(ax(t) sigma_x + ay(t) sigma_y).
Mat2c propagate(const PulseShape& pulse, const EnsembleMember& member);

/// Weight-averaged PTM over members followed by multiplicative damping of the
/// sigma_x / sigma_y rows by exp(-duration / T2). Trace preserving.
Ptm gate_superop(const PulseShape& pulse, const EnsembleModel& model);

/// gate_superop for every gate of the set.
std::array<Ptm, kNumGates> gateset_superops(const GateSet& gs, const EnsembleModel& model);

/// True survival of one circuit under the model (no readout noise).
double circuit_probability(const Circuit& circuit, const std::array<Ptm, kNumGates>& superops,
                           const CliffordTable* table, const EnsembleModel& model);

/// circuit_probability followed by binomial(shots, p)/shots estimation.
double run_circuit(const Circuit& circuit, const GateSet& gs, const CliffordTable* table,
                   const EnsembleModel& model, Rng& rng);

/// Ensemble-averaged |0>-population under constant max-amplitude x drive,
/// starting from ideal |0>, sampled at n midpoints across `duration`.
std::vector<double> rabi_trace(const EnsembleModel& model, double duration, double a_max,
                               int n_samples = 120);

/// Raw fluorescence of one three-part measurement sequence.
struct RawRecord {
  std::vector<double> rabi_block;  ///< 600 ns max-amplitude Rabi fluorescence
  std::vector<double> zero_level;  ///< 20 bright-level samples
  std::vector<double> body;        ///< fluorescence per body circuit
};

struct MeasureResult {
  RawRecord raw;
  std::vector<double> expectations;  ///< normalized body expectations
  double c0_hat = 0.0;
  double c1_hat = 0.0;
};

/// Simulate the full sequence and normalize the body fluorescence:
/// c0_hat from the bright block, the dephased midpoint from the tail average
/// of the Rabi block, c1_hat = 2 mid - c0_hat, p = (F - c1_hat)/(c0_hat - c1_hat).
/// Throws NormalizationError on contrast collapse (c0_hat <= c1_hat).
MeasureResult measure_record(const std::vector<Circuit>& body, const GateSet& gs,
                             const CliffordTable* table, const EnsembleModel& model,
                             double a_max, Rng& rng);

/// One random-walk step on the global rabi-scale multiplier; no-op unless
/// drift is configured.
EnsembleModel advance_drift(EnsembleModel model, Rng& rng);

}  // namespace gsopt
