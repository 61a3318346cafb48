#pragma once

#include <string>
#include <vector>

#include "gsopt/analysis.hpp"
#include "gsopt/hs.hpp"
#include "gsopt/optimizer.hpp"
#include "gsopt/pulse.hpp"

namespace gsopt {

//=========================================================================
// File formats. All floats are written with 17 significant digits so that
// identical runs produce byte-identical files; writes go through a temp
// file + rename so output files are append-free and atomic per run.
//=========================================================================

std::string format_double(double v);  ///< %.17g

void atomic_write(const std::string& path, const std::string& content);

/// Row-major CSV; complex matrices as paired re/im columns.
void write_matrix_csv(const std::string& path, const Mat4& m);
void write_matrix_csv(const std::string& path, const Mat4c& m);

/// Pulse CSV: header `t_ns,ax_rad_per_s,ay_rad_per_s`, midpoint times.
void write_pulse_csv(const std::string& path, const PulseShape& pulse);
PulseShape read_pulse_csv(const std::string& path);

/// fom_trace.csv: eval_index, superiteration, method, L, N, fom,
/// std_estimate, is_reeval, is_drift_check.
void write_fom_trace_csv(const std::string& path, const OptimizationRecord& record);

/// sweep.csv: amplitude, mean_fom, std (missing points leave fields empty).
void write_sweep_csv(const std::string& path, const SweepResult& sweep);

/// gains.csv: method, L, gain, std, fom_pulse, fom_guess, fom_ref.
void write_gains_csv(const std::string& path, const std::vector<GainRow>& rows);
std::vector<GainRow> read_gains_csv(const std::string& path);

/// correlation.csv: header row of method names, then the p x p matrix.
void write_correlation_csv(const std::string& path, const std::vector<std::string>& names,
                           const Eigen::MatrixXd& corr);

/// fluence.csv: name, fluence_rad2_per_s.
void write_fluence_csv(const std::string& path, const std::vector<FluenceRow>& rows);

/// rb.csv: m, survival, std.
void write_rb_csv(const std::string& path, const RbResult& rb);

/// result.json summary of one optimization run.
void write_result_json(const std::string& path, const OptimizationRecord& record);

}  // namespace gsopt
