#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsopt/foms.hpp"
#include "gsopt/optimizer.hpp"

namespace gsopt {

//=========================================================================
// Cross-evaluation of pulses across all methods, amplitude sweeps,
// correlation matrices and fluence reporting.
//=========================================================================

/// Gain observations: rows are optimizations (e.g. different circuit
/// lengths), columns are evaluation methods.
struct DataMatrix {
  std::vector<std::string> column_names;
  Eigen::MatrixXd values;
};

/// Pearson correlation matrix of the columns. Throws ValidationError naming
/// the first zero-variance column.
Eigen::MatrixXd correlation_matrix(const DataMatrix& data);

struct SweepPoint {
  double amplitude_factor = 0.0;
  double mean = 0.0;
  double std = 0.0;
  bool valid = false;
  int repeats = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  int argmin_index = -1;  ///< -1 when no point is valid
};

/// FoM of the gate-set with the optimized slot swept over rectangular pulses
/// of the guess duration at amplitude_factor x the calibrated amplitude;
/// mean +- std over `repeats` fresh evaluations per point.
SweepResult amplitude_sweep(const FomSpec& spec, std::span<const double> factors,
                            const GateSet& gs, const CliffordTable& table,
                            const EnsembleModel& model, double a_max, int repeats,
                            SeedSeq seed);

struct GainRow {
  std::string method;
  int length = 0;
  bool defined = false;
  double gain = 0.0;
  double gain_std = 0.0;
  double fom_pulse = 0.0;
  double fom_guess = 0.0;
  double fom_ref = 0.0;
};

/// Gain of `pulse` under each FoM spec (and optionally RB, where the average
/// error per Clifford takes the place of the FoM). Guess and reference are
/// measured fresh under the same seed family; gains whose guess/reference
/// separation is within noise are reported undefined.
std::vector<GainRow> cross_evaluate(const PulseShape& pulse, const GateSet& gs,
                                    const PulseShape& reference_pulse,
                                    const CliffordTable& table, const EnsembleModel& model,
                                    double a_max, std::span<const FomSpec> specs,
                                    bool include_rb, int repeats, SeedSeq seed);

struct FluenceRow {
  std::string name;
  double value = 0.0;  ///< rad^2/s
};

/// Fluence per pulse plus the guess/reference baselines (appended last).
std::vector<FluenceRow> fluence_report(const std::vector<std::pair<std::string, PulseShape>>& pulses,
                                       const PulseShape& guess, const PulseShape& reference);

}  // namespace gsopt
