#include "gsopt/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gsopt/errors.hpp"

namespace gsopt {

namespace {

constexpr double kSqrt2Inv = 1.0 / std::numbers::sqrt2;
constexpr int kRabiBlockSamples = 120;
constexpr double kRabiBlockDuration = 600e-9;
constexpr int kZeroLevelSamples = 20;

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

/// Fluorescence of population p, with shot noise unless analytic mode.
double fluorescence(double p, const EnsembleModel& model, Rng& rng) {
  const double contrast = model.contrast_c0 - model.contrast_c1;
  if (model.shots <= 0) return model.contrast_c1 + contrast * p;
  const double p_hat =
      static_cast<double>(rng.binomial(model.shots, clamp01(p))) /
      static_cast<double>(model.shots);
  return model.contrast_c1 + contrast * p_hat;
}

}  // namespace

HSVector EnsembleModel::initial_state() const {
  HSVector v;
  v.coords << kSqrt2Inv, 0.0, 0.0, spam_purity * kSqrt2Inv;
  return v;
}

HSVector EnsembleModel::measurement_effect() const { return ground_state(); }

EnsembleModel make_ensemble_model(double delta, std::array<double, 3> line_weights,
                                  double rabi_sigma, double detuning_offset) {
  // 5-node Gauss-Hermite discretization of the Gaussian rabi-scale spread
  static const std::array<double, 3> gh_nodes = {0.0, 0.95857246461381850711,
                                                 2.02018287045608563293};
  static const std::array<double, 3> gh_weights = {0.94530872048294188123,
                                                   0.39361932315224115983,
                                                   0.01995324205904591321};
  const double wsum = gh_weights[0] + 2.0 * gh_weights[1] + 2.0 * gh_weights[2];

  std::vector<double> eps_nodes, eps_weights;
  if (rabi_sigma > 0.0) {
    for (int i = 2; i >= 1; --i) {
      eps_nodes.push_back(1.0 - std::numbers::sqrt2 * rabi_sigma * gh_nodes[i]);
      eps_weights.push_back(gh_weights[i] / wsum);
    }
    eps_nodes.push_back(1.0);
    eps_weights.push_back(gh_weights[0] / wsum);
    for (int i = 1; i <= 2; ++i) {
      eps_nodes.push_back(1.0 + std::numbers::sqrt2 * rabi_sigma * gh_nodes[i]);
      eps_weights.push_back(gh_weights[i] / wsum);
    }
  } else {
    eps_nodes.push_back(1.0);
    eps_weights.push_back(1.0);
  }

  EnsembleModel model;
  const std::array<double, 3> detunings = {-delta, 0.0, delta};
  for (int line = 0; line < 3; ++line)
    for (std::size_t i = 0; i < eps_nodes.size(); ++i)
      model.members.push_back({detunings[line] + detuning_offset, eps_nodes[i],
                               line_weights[line] * eps_weights[i]});
  return model;
}

EnsembleModel default_model() {
  return make_ensemble_model(2.0 * std::numbers::pi * 2e6, {0.3, 0.4, 0.3}, 0.03,
                             2.0 * std::numbers::pi * 0.8e6);
}

EnsembleModel noiseless_model() {
  EnsembleModel model;
  model.members.push_back({0.0, 1.0, 1.0});
  model.t2 = std::numeric_limits<double>::infinity();
  model.shots = 0;
  model.spam_purity = 1.0;
  return model;
}

Mat2c propagate(const PulseShape& pulse, const EnsembleMember& member) {
  const complexd im{0.0, 1.0};
  Mat2c u = Mat2c::Identity();
  for (std::size_t k = 0; k < pulse.ax.size(); ++k) {
    const double hx = member.rabi_scale * pulse.ax[k];
    const double hy = member.rabi_scale * pulse.ay[k];
    const double hz = member.detuning;
    const double w = std::sqrt(hx * hx + hy * hy + hz * hz);
    Mat2c step;
    if (w * pulse.dt < 1e-300) {
      step = Mat2c::Identity();
    } else {
      const double phi = 0.5 * w * pulse.dt;
      const double c = std::cos(phi);
      const double s = std::sin(phi) / w;
      step << c - im * s * hz, s * (-im * hx - hy),
              s * (-im * hx + hy), c + im * s * hz;
    }
    u = step * u;  // time order: sample k acts after samples < k
  }
  return u;
}

Ptm gate_superop(const PulseShape& pulse, const EnsembleModel& model) {
  Mat4 avg = Mat4::Zero();
  for (const auto& m : model.members) {
    EnsembleMember effective = m;
    effective.rabi_scale *= model.drift_multiplier;
    avg += m.weight * unitary_to_ptm(propagate(pulse, effective)).m;
  }
  const double damping = std::exp(-pulse.duration() / model.t2);
  avg.row(1) *= damping;
  avg.row(2) *= damping;
  return Ptm(avg);
}

std::array<Ptm, kNumGates> gateset_superops(const GateSet& gs, const EnsembleModel& model) {
  std::array<Ptm, kNumGates> ops;
  for (int k = 0; k < kNumGates; ++k) ops[k] = gate_superop(gs.pulses[k], model);
  return ops;
}

double circuit_probability(const Circuit& circuit, const std::array<Ptm, kNumGates>& superops,
                           const CliffordTable* table, const EnsembleModel& model) {
  Vec4 v = model.initial_state().coords;
  for (int g : flatten_to_gates(circuit, table)) v = superops[g].m * v;
  return model.measurement_effect().coords.dot(v);
}

double run_circuit(const Circuit& circuit, const GateSet& gs, const CliffordTable* table,
                   const EnsembleModel& model, Rng& rng) {
  const auto superops = gateset_superops(gs, model);
  const double p = circuit_probability(circuit, superops, table, model);
  if (model.shots <= 0) return p;
  return static_cast<double>(rng.binomial(model.shots, clamp01(p))) /
         static_cast<double>(model.shots);
}

std::vector<double> rabi_trace(const EnsembleModel& model, double duration, double a_max,
                               int n_samples) {
  if (duration <= 0.0) throw ValidationError("rabi_trace: duration must be positive");
  if (n_samples < 1) throw ValidationError("rabi_trace: need at least one sample");
  std::vector<double> populations(n_samples, 0.0);
  for (const auto& m : model.members) {
    const double omega = m.rabi_scale * model.drift_multiplier * a_max;
    const double w2 = m.detuning * m.detuning + omega * omega;
    const double transfer_scale = w2 > 0.0 ? omega * omega / w2 : 0.0;
    const double w = std::sqrt(w2);
    for (int k = 0; k < n_samples; ++k) {
      const double t = sample_time(k, duration / n_samples);
      const double sn = std::sin(0.5 * w * t);
      populations[k] += m.weight * (1.0 - transfer_scale * sn * sn);
    }
  }
  return populations;
}

MeasureResult measure_record(const std::vector<Circuit>& body, const GateSet& gs,
                             const CliffordTable* table, const EnsembleModel& model,
                             double a_max, Rng& rng) {
  MeasureResult result;
  const double s = model.spam_purity;

  // Rabi block: driven from the prepared (imperfectly initialized) state
  const auto trace = rabi_trace(model, kRabiBlockDuration, a_max, kRabiBlockSamples);
  result.raw.rabi_block.reserve(trace.size());
  for (double p_pure : trace)
    result.raw.rabi_block.push_back(
        fluorescence(s * p_pure + 0.5 * (1.0 - s), model, rng));

  // bright-level block: repolarized reference level
  result.raw.zero_level.reserve(kZeroLevelSamples);
  for (int i = 0; i < kZeroLevelSamples; ++i)
    result.raw.zero_level.push_back(fluorescence(1.0, model, rng));

  const auto superops = gateset_superops(gs, model);
  result.raw.body.reserve(body.size());
  std::vector<double> p_true(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    p_true[i] = circuit_probability(body[i], superops, table, model);
    result.raw.body.push_back(fluorescence(p_true[i], model, rng));
  }

  if (model.shots <= 0) {
    // analytic mode models the infinite-shot limit where the normalization
    // levels are known exactly; expectations come out bias-free
    result.c0_hat = model.contrast_c0;
    result.c1_hat = model.contrast_c1;
    result.expectations = std::move(p_true);
    return result;
  }

  double c0_hat = 0.0;
  for (double f : result.raw.zero_level) c0_hat += f;
  c0_hat /= static_cast<double>(result.raw.zero_level.size());

  // dephased midpoint from the tail half of the Rabi block
  const std::size_t tail_start = result.raw.rabi_block.size() / 2;
  double mid = 0.0;
  for (std::size_t k = tail_start; k < result.raw.rabi_block.size(); ++k)
    mid += result.raw.rabi_block[k];
  mid /= static_cast<double>(result.raw.rabi_block.size() - tail_start);

  const double c1_hat = 2.0 * mid - c0_hat;
  if (c0_hat <= c1_hat)
    throw NormalizationError("measure_record: contrast collapsed (c0_hat <= c1_hat)");

  result.c0_hat = c0_hat;
  result.c1_hat = c1_hat;
  result.expectations.reserve(body.size());
  for (double f : result.raw.body)
    result.expectations.push_back((f - c1_hat) / (c0_hat - c1_hat));
  return result;
}

EnsembleModel advance_drift(EnsembleModel model, Rng& rng) {
  if (model.drift == DriftMode::None || model.drift_sigma == 0.0) return model;
  model.drift_multiplier += rng.normal(0.0, model.drift_sigma);
  model.drift_multiplier = std::max(model.drift_multiplier, 1e-6);  // keep drive physical
  return model;
}

}  // namespace gsopt
