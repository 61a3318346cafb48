#include "gsopt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gsopt/errors.hpp"

namespace gsopt {

namespace {

ValueWithStd mean_and_std_of(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = values.size() > 1 ? var / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var)};
}

/// Repeated FoM evaluations of one candidate pulse bound into slot 2; the
/// circuit set is fixed and only the readout noise varies across repeats.
ValueWithStd repeated_fom(const FomSpec& spec, const PulseShape& pulse, const GateSet& gs,
                          const CliffordTable& table, const EnsembleModel& model,
                          double a_max, int repeats, SeedSeq circuit_seed, SeedSeq seed) {
  GateSet bound = gs;
  bound.pulses[kXHalfNeg] = pulse;
  std::vector<double> values;
  values.reserve(repeats);
  for (int i = 0; i < repeats; ++i) {
    SeedSeq eval_seed = seed.child(i);
    for (int attempt = 0;; ++attempt) {
      try {
        values.push_back(evaluate_fom(spec, bound, table, model, a_max, circuit_seed,
                                      eval_seed.child(attempt))
                             .value);
        break;
      } catch (const NormalizationError&) {
        if (attempt >= 8) throw;
      } catch (const NumericalError&) {
        if (attempt >= 8) throw;
      }
    }
  }
  return mean_and_std_of(values);
}

}  // namespace

Eigen::MatrixXd correlation_matrix(const DataMatrix& data) {
  const auto& x = data.values;
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (n < 2 || p < 2)
    throw ValidationError("correlation_matrix: need at least 2 rows and 2 columns");

  Eigen::VectorXd mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  Eigen::VectorXd norms(p);
  for (int j = 0; j < p; ++j) {
    norms(j) = centered.col(j).norm();
    if (norms(j) == 0.0) {
      const std::string name =
          j < static_cast<int>(data.column_names.size()) ? data.column_names[j]
                                                         : std::to_string(j);
      throw ValidationError("correlation_matrix: column '" + name + "' has zero variance");
    }
  }
  Eigen::MatrixXd corr(p, p);
  for (int j = 0; j < p; ++j) {
    corr(j, j) = 1.0;
    for (int k = j + 1; k < p; ++k) {
      const double r = centered.col(j).dot(centered.col(k)) / (norms(j) * norms(k));
      corr(j, k) = r;
      corr(k, j) = r;
    }
  }
  return corr;
}

SweepResult amplitude_sweep(const FomSpec& spec, std::span<const double> factors,
                            const GateSet& gs, const CliffordTable& table,
                            const EnsembleModel& model, double a_max, int repeats,
                            SeedSeq seed) {
  if (factors.size() < 5)
    throw ValidationError("amplitude_sweep: grid must have at least 5 points");

  const PulseShape& guess = gs.pulses[kXHalfNeg];
  const SeedSeq circuit_seed = seed.child("circuitset");  // shared across the sweep
  SweepResult result;
  result.points.reserve(factors.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    SweepPoint point;
    point.amplitude_factor = factors[i];
    point.repeats = repeats;
    const PulseShape swept = clip(guess.scaled(factors[i]), a_max);
    try {
      const auto stats = repeated_fom(spec, swept, gs, table, model, a_max, repeats,
                                      circuit_seed, seed.child(i));
      point.mean = stats.value;
      point.std = stats.std / std::sqrt(static_cast<double>(repeats));
      point.valid = std::isfinite(stats.value);
    } catch (const Error&) {
      point.valid = false;  // recorded as missing, excluded from the argmin
    }
    if (point.valid && point.mean < best) {
      best = point.mean;
      result.argmin_index = static_cast<int>(i);
    }
    result.points.push_back(point);
  }
  return result;
}

std::vector<GainRow> cross_evaluate(const PulseShape& pulse, const GateSet& gs,
                                    const PulseShape& reference_pulse,
                                    const CliffordTable& table, const EnsembleModel& model,
                                    double a_max, std::span<const FomSpec> specs,
                                    bool include_rb, int repeats, SeedSeq seed) {
  const PulseShape& guess = gs.pulses[kXHalfNeg];
  std::vector<GainRow> rows;

  for (std::size_t s = 0; s < specs.size(); ++s) {
    const FomSpec& spec = specs[s];
    SeedSeq method_seed = seed.child(fom_kind_name(spec.kind)).child(spec.length);
    const SeedSeq circuits = method_seed.child("circuitset");  // shared by all three pulses
    const auto f_guess = repeated_fom(spec, guess, gs, table, model, a_max, repeats, circuits,
                                      method_seed.child("guess"));
    const auto f_ref = repeated_fom(spec, reference_pulse, gs, table, model, a_max, repeats,
                                    circuits, method_seed.child("ref"));
    const auto f_pulse = repeated_fom(spec, pulse, gs, table, model, a_max, repeats, circuits,
                                      method_seed.child("pulse"));

    GainRow row;
    row.method = fom_kind_name(spec.kind);
    row.length = spec.length;
    row.fom_pulse = f_pulse.value;
    row.fom_guess = f_guess.value;
    row.fom_ref = f_ref.value;

    const double sqrt_n = std::sqrt(static_cast<double>(repeats));
    const double sep_noise =
        std::hypot(f_guess.std / sqrt_n, f_ref.std / sqrt_n);
    const double separation = f_ref.value - f_guess.value;
    if (std::abs(separation) > std::max(1e-12, sep_noise)) {
      row.defined = true;
      row.gain = (f_pulse.value - f_guess.value) / separation;
      // first-order propagation of the three mean uncertainties
      const double d = separation;
      const double g = row.gain;
      row.gain_std = std::sqrt((f_pulse.std * f_pulse.std +
                                (g - 1.0) * (g - 1.0) * f_guess.std * f_guess.std +
                                g * g * f_ref.std * f_ref.std) /
                               (sqrt_n * sqrt_n)) /
                     std::abs(d);
    }
    rows.push_back(row);
  }

  if (include_rb) {
    // RB gain uses the fitted average error per Clifford in place of a FoM
    SeedSeq rb_seed = seed.child("rb");
    const auto lengths = default_rb_lengths();
    GateSet bound = gs;

    const auto rb_r = [&](const PulseShape& p, SeedSeq s) {
      bound.pulses[kXHalfNeg] = p;
      const RbResult rb = run_rb(bound, table, model, a_max, lengths, 300, s);
      return std::pair<double, double>(rb.fit.error_per_clifford, rb.fit.decay_std / 2.0);
    };
    const auto [r_guess, sr_guess] = rb_r(guess, rb_seed.child("guess"));
    const auto [r_ref, sr_ref] = rb_r(reference_pulse, rb_seed.child("ref"));
    const auto [r_pulse, sr_pulse] = rb_r(pulse, rb_seed.child("pulse"));

    GainRow row;
    row.method = "rb";
    row.length = lengths.back();
    row.fom_pulse = r_pulse;
    row.fom_guess = r_guess;
    row.fom_ref = r_ref;
    const double separation = r_ref - r_guess;
    const double sep_noise = std::hypot(sr_guess, sr_ref);
    if (std::abs(separation) > std::max(1e-12, sep_noise)) {
      row.defined = true;
      row.gain = (r_pulse - r_guess) / separation;
      const double g = row.gain;
      row.gain_std = std::sqrt(sr_pulse * sr_pulse + (g - 1.0) * (g - 1.0) * sr_guess * sr_guess +
                               g * g * sr_ref * sr_ref) /
                     std::abs(separation);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<FluenceRow> fluence_report(
    const std::vector<std::pair<std::string, PulseShape>>& pulses, const PulseShape& guess,
    const PulseShape& reference) {
  std::vector<FluenceRow> rows;
  rows.reserve(pulses.size() + 2);
  for (const auto& [name, p] : pulses) rows.push_back({name, fluence(p)});
  rows.push_back({"guess", fluence(guess)});
  rows.push_back({"reference", fluence(reference)});
  return rows;
}

}  // namespace gsopt
