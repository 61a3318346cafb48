#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gsopt/foms.hpp"
#include "gsopt/gateset.hpp"
#include "gsopt/plant.hpp"
#include "gsopt/pulse.hpp"

namespace gsopt {

//=========================================================================
// Closed-loop pulse optimization: Nelder-Mead over the coefficients of a
// randomly drawn bounded-frequency basis, restarted over super-iterations,
// with noise-aware re-evaluation, windowed stopping and drift re-measurement.
// Only the optimized gate's pulse varies; the rest of the set stays fixed.
//=========================================================================

struct DcrabConfig {
  int superiterations = 3;
  int vectors_per_pulse = 2;
  int max_oscillations = 4;        ///< frequency bound: 2*pi*n / duration
  int stop_window = 200;           ///< evaluations without improvement > sigma
  int reeval_max = 3;              ///< re-evaluations of an ambiguous improvement
  int drift_remeasure_every = 40;  ///< evaluations between best-pulse re-measurements
  int max_evals_per_superiteration = 600;
  double a_max = 0.0;              ///< hard envelope bound (reference amplitude)
  int sigma_repeats = 100;         ///< guess evaluations used to estimate sigma
  int endpoint_repeats = 20;       ///< evaluations averaged for guess/ref/opt values
  double eps_gain = 1e-9;          ///< minimum |ref - guess| separation for a gain
  double initial_step_fraction = 0.1;  ///< Nelder-Mead simplex step / a_max
};

struct ValueWithStd {
  double value = 0.0;
  double std = 0.0;
};

struct TraceRow {
  int eval_index = 0;
  int superiteration = 0;
  double fom = 0.0;
  double std_estimate = 0.0;  ///< method-internal std, NaN when undefined
  bool is_reeval = false;
  bool is_drift_check = false;
};

struct OptimizationRecord {
  DcrabConfig config;
  FomSpec fom;
  std::vector<TraceRow> trace;
  PulseShape best_pulse;
  ValueWithStd fom_guess;
  ValueWithStd fom_ref;
  ValueWithStd fom_opt;
  double sigma = 0.0;          ///< measured FoM standard deviation of the guess
  double gain = 0.0;
  bool gain_defined = false;
  std::uint64_t plant_seed = 0;
  std::uint64_t run_seed = 0;
  int n_evals = 0;
  /// (eval index, pulse) at every accepted improvement, for per-improvement dumps.
  std::vector<std::pair<int, PulseShape>> improvements;
};

/// Sample standard deviation of `repeats` FoM evaluations of one pulse bound
/// into the optimized slot. Does not mutate the plant.
double estimate_sigma(const FomSpec& spec, const PulseShape& pulse, const GateSet& gs,
                      const CliffordTable& table, const EnsembleModel& model, double a_max,
                      SeedSeq seed, int repeats = 100);

struct NelderMeadOptions {
  int max_evals = 600;
  double initial_step = 0.1;
  std::function<bool()> should_stop;  ///< polled after every objective call
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int n_evals = 0;
};

/// Classical simplex method (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). Returns best-so-far on budget exhaustion or stop signal.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> x0, const NelderMeadOptions& options);

/// Closed-loop optimization of the G2 pulse against the chosen FoM.
/// `gs` must carry the guess pulse in slot 2 and calibrated pulses elsewhere.
/// Deterministic given (model.seed, run seed in `seed`).
OptimizationRecord dcrab_run(const FomSpec& spec, const GateSet& gs, const CliffordTable& table,
                             EnsembleModel model, const PulseShape& reference_pulse,
                             const DcrabConfig& cfg, SeedSeq seed);

/// (fom_opt - fom_guess) / (fom_ref - fom_guess): 0 at the guess, 1 at the
/// reference. Throws ValidationError when the separation is below eps_gain.
double gain(double fom_opt, double fom_guess, double fom_ref, double eps_gain = 1e-9);

}  // namespace gsopt
