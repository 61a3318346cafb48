#include "gsopt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "gsopt/errors.hpp"

namespace gsopt {

namespace {

struct KeySpec {
  const char* key;
  const char* default_value;
  const char* doc;
};

// every configurable key with its default and one-line documentation
const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> keys = {
      {"plant.delta_hz", "2e6", "detuning line splitting (Hz); lines at {-d, 0, +d}"},
      {"plant.detuning_offset_hz", "0.8e6", "common carrier offset of all lines (Hz)"},
      {"plant.line_weights", "0.3,0.4,0.3", "weights of the three detuning lines"},
      {"plant.rabi_spread", "0.03", "relative Gaussian drive-amplitude spread"},
      {"plant.t2_s", "2e-6", "per-gate coherence damping time (s)"},
      {"plant.shots", "10000", "readout counts per expectation value; 0 = analytic"},
      {"plant.contrast_c0", "1.0", "fluorescence rate of |0> (arb. units)"},
      {"plant.contrast_c1", "0.7", "fluorescence rate of |-1> (arb. units)"},
      {"plant.spam_purity", "0.97", "initialization: rho = p|0><0| + (1-p) I/2"},
      {"plant.drift", "none", "drift mode: none | random_walk"},
      {"plant.drift_sigma", "0.0", "random-walk step on the global drive scale"},
      {"plant.seed", "12345", "plant random seed"},
      {"gateset.dt_s", "0.25e-9", "envelope sample spacing (s)"},
      {"gateset.guess_duration_s", "30e-9", "guess / calibrated gate duration (s)"},
      {"gateset.reference_duration_s", "14e-9", "shortest rectangular pulse duration (s)"},
      {"fom.kind", "orbit", "qpt | lgst | gtilde | rlgst | orbit"},
      {"fom.length", "10", "circuit length (RLGST gates / ORBIT Cliffords)"},
      {"fom.circuits", "300", "random circuits per evaluation"},
      {"fom.qpt_gate", "2", "gate index reconstructed by QPT"},
      {"optimizer.superiterations", "3", "basis restarts"},
      {"optimizer.vectors_per_pulse", "2", "random frequencies per quadrature"},
      {"optimizer.max_oscillations", "4", "frequency bound 2*pi*n/duration"},
      {"optimizer.stop_window", "200", "stop after this many evals without gain > sigma"},
      {"optimizer.reeval_max", "3", "re-evaluations of an ambiguous improvement"},
      {"optimizer.drift_remeasure_every", "40", "evals between best-pulse re-measurements"},
      {"optimizer.max_evals_per_superiteration", "600", "evaluation budget per super-iteration"},
      {"optimizer.sigma_repeats", "100", "guess evaluations for the sigma estimate"},
      {"optimizer.endpoint_repeats", "20", "evaluations averaged for guess/ref/opt"},
      {"optimizer.eps_gain", "1e-9", "minimum |ref - guess| separation for a gain"},
      {"optimizer.initial_step_fraction", "0.1", "Nelder-Mead initial step / a_max"},
      {"optimizer.seed", "1", "optimizer random seed"},
      {"analysis.sweep_points", "21", "amplitude sweep grid size"},
      {"analysis.sweep_lo", "0.5", "sweep lower bound (x calibrated amplitude)"},
      {"analysis.sweep_hi", "1.5", "sweep upper bound (x calibrated amplitude)"},
      {"analysis.repeats", "20", "repeated measurements per reported mean"},
      {"analysis.rb_circuits", "300", "random circuits per RB length"},
      {"output.dir", "runs", "output root (GSOPT_OUTPUT_ROOT overrides)"},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& spec : registry()) values_[spec.key] = spec.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end())
    throw ValidationError("config: unknown key '" + key + "'");
  it->second = trim(value);
}

void RunConfig::load_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: line " + std::to_string(line_no) +
                            " is not of the form key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  load_string(buffer.str());
}

std::string RunConfig::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    throw ValidationError("config: unknown key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' has non-numeric value '" + v + "'");
  }
}

int RunConfig::get_int(const std::string& key) const {
  const double x = get_double(key);
  const int i = static_cast<int>(std::llround(x));
  if (std::abs(x - i) > 1e-9)
    throw ValidationError("config: key '" + key + "' must be an integer");
  return i;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' is not an unsigned integer");
  }
}

std::string RunConfig::resolved_text() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
  return out.str();
}

std::string RunConfig::reference_text() {
  std::ostringstream out;
  out << "# All configuration keys with their defaults.\n"
      << "# Syntax: key = value, '#' starts a comment.\n\n";
  for (const auto& spec : registry())
    out << "# " << spec.doc << "\n" << spec.key << " = " << spec.default_value << "\n\n";
  return out.str();
}

EnsembleModel RunConfig::make_model() const {
  const std::string weights_str = get_string("plant.line_weights");
  std::array<double, 3> weights{};
  {
    std::istringstream in(weights_str);
    std::string part;
    int i = 0;
    while (std::getline(in, part, ',')) {
      if (i >= 3) throw ValidationError("config: plant.line_weights needs 3 entries");
      weights[i++] = std::stod(trim(part));
    }
    if (i != 3) throw ValidationError("config: plant.line_weights needs 3 entries");
    const double sum = weights[0] + weights[1] + weights[2];
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("config: plant.line_weights must sum to 1");
  }

  EnsembleModel model = make_ensemble_model(
      2.0 * std::numbers::pi * get_double("plant.delta_hz"), weights,
      get_double("plant.rabi_spread"),
      2.0 * std::numbers::pi * get_double("plant.detuning_offset_hz"));
  model.t2 = get_double("plant.t2_s");
  model.shots = get_int("plant.shots");
  model.contrast_c0 = get_double("plant.contrast_c0");
  model.contrast_c1 = get_double("plant.contrast_c1");
  model.spam_purity = get_double("plant.spam_purity");
  model.drift_sigma = get_double("plant.drift_sigma");
  const std::string drift = get_string("plant.drift");
  if (drift == "none")
    model.drift = DriftMode::None;
  else if (drift == "random_walk")
    model.drift = DriftMode::RandomWalk;
  else
    throw ValidationError("config: plant.drift must be none or random_walk");
  model.seed = get_u64("plant.seed");
  if (model.t2 <= 0.0) throw ValidationError("config: plant.t2_s must be positive");
  if (model.contrast_c0 <= model.contrast_c1 || model.contrast_c1 <= 0.0)
    throw ValidationError("config: contrast must satisfy c0 > c1 > 0");
  return model;
}

GateSet RunConfig::make_gateset() const {
  return build_gateset(get_double("gateset.dt_s"), get_double("gateset.guess_duration_s"));
}

PulseShape RunConfig::reference_pulse() const {
  const double duration = get_double("gateset.reference_duration_s");
  return calibrated_pulse(kXHalfNeg, duration, get_double("gateset.dt_s"));
}

double RunConfig::a_max() const {
  return 0.5 * std::numbers::pi / get_double("gateset.reference_duration_s");
}

FomSpec RunConfig::make_fom_spec() const {
  FomSpec spec;
  const std::string kind = get_string("fom.kind");
  const auto parsed = fom_kind_from_name(kind);
  if (!parsed) throw ValidationError("config: unknown fom.kind '" + kind + "'");
  spec.kind = *parsed;
  spec.length = get_int("fom.length");
  spec.n_circuits = get_int("fom.circuits");
  spec.qpt_gate = get_int("fom.qpt_gate");
  if (spec.n_circuits < 1) throw ValidationError("config: fom.circuits must be >= 1");
  return spec;
}

DcrabConfig RunConfig::make_dcrab_config() const {
  DcrabConfig cfg;
  cfg.superiterations = get_int("optimizer.superiterations");
  cfg.vectors_per_pulse = get_int("optimizer.vectors_per_pulse");
  cfg.max_oscillations = get_int("optimizer.max_oscillations");
  cfg.stop_window = get_int("optimizer.stop_window");
  cfg.reeval_max = get_int("optimizer.reeval_max");
  cfg.drift_remeasure_every = get_int("optimizer.drift_remeasure_every");
  cfg.max_evals_per_superiteration = get_int("optimizer.max_evals_per_superiteration");
  cfg.sigma_repeats = get_int("optimizer.sigma_repeats");
  cfg.endpoint_repeats = get_int("optimizer.endpoint_repeats");
  cfg.eps_gain = get_double("optimizer.eps_gain");
  cfg.initial_step_fraction = get_double("optimizer.initial_step_fraction");
  cfg.a_max = a_max();
  if (cfg.superiterations < 1 || cfg.vectors_per_pulse < 1 || cfg.stop_window < 1 ||
      cfg.reeval_max < 1 || cfg.max_evals_per_superiteration < 1 || cfg.sigma_repeats < 1 ||
      cfg.endpoint_repeats < 1)
    throw ValidationError("config: optimizer counts must be >= 1");
  return cfg;
}

}  // namespace gsopt
