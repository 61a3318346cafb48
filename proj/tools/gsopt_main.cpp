// gsopt: closed-loop gate-set optimization workbench on a simulated
// inhomogeneous spin-ensemble qubit.
//
// Subcommands: sweep | optimize | evaluate | rb | correlate | fluence.
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "gsopt/analysis.hpp"
#include "gsopt/config.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/io.hpp"

namespace fs = std::filesystem;
using namespace gsopt;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file");
  cmd->add_option("--set", args.overrides, "override a config key (key=value)");
  cmd->add_option("--out", args.output_dir, "output directory");
  cmd->add_option("--threads", args.threads, "worker cap (evaluation is sequential)");
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig config;
  if (!args.config_path.empty()) config.load_file(args.config_path);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ValidationError("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

std::string output_root(const RunConfig& config, const CommonArgs& args) {
  if (!args.output_dir.empty()) return args.output_dir;
  if (const char* env = std::getenv("GSOPT_OUTPUT_ROOT"); env && *env) return env;
  return config.get_string("output.dir");
}

std::vector<double> sweep_grid(const RunConfig& config, const std::string& grid_arg) {
  double lo = config.get_double("analysis.sweep_lo");
  double hi = config.get_double("analysis.sweep_hi");
  int n = config.get_int("analysis.sweep_points");
  if (!grid_arg.empty()) {
    // lo:hi:n
    std::istringstream in(grid_arg);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ValidationError("--grid expects lo:hi:points");
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    n = std::stoi(parts[2]);
  }
  if (n < 5 || hi <= lo) throw ValidationError("sweep grid needs hi > lo and >= 5 points");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1);
  return grid;
}

FomSpec spec_for_method(const RunConfig& config, const std::string& method, int length) {
  const auto kind = fom_kind_from_name(method);
  if (!kind) throw ValidationError("unknown method '" + method + "'");
  FomSpec spec = config.make_fom_spec();
  spec.kind = *kind;
  if (length > 0) spec.length = length;
  return spec;
}

int cmd_sweep(const CommonArgs& args, const std::string& method,
              const std::vector<int>& lengths, const std::string& grid_arg) {
  const RunConfig config = load_config(args);
  const auto grid = sweep_grid(config, grid_arg);
  const GateSet gs = config.make_gateset();
  const CliffordTable table = build_clifford_table(gs);
  const EnsembleModel model = config.make_model();
  const int repeats = config.get_int("analysis.repeats");
  const std::string root = output_root(config, args);

  std::vector<int> all_lengths = lengths;
  if (all_lengths.empty()) all_lengths.push_back(config.get_int("fom.length"));

  const bool length_dependent = (method == "rlgst" || method == "orbit");
  if (!length_dependent && lengths.size() > 1)
    throw ValidationError("--lengths applies only to rlgst/orbit sweeps");

  for (int length : all_lengths) {
    const FomSpec spec = spec_for_method(config, method, length);
    SeedSeq seed = SeedSeq{config.get_u64("plant.seed")}
                       .child("sweep")
                       .child(method)
                       .child(static_cast<std::uint64_t>(length));
    const SweepResult sweep =
        amplitude_sweep(spec, grid, gs, table, model, config.a_max(), repeats, seed);
    std::ostringstream name;
    name << "sweep_" << method;
    if (length_dependent) name << "_L" << length;
    name << ".csv";
    const std::string path = (fs::path(root) / name.str()).string();
    write_sweep_csv(path, sweep);
    std::cout << path;
    if (sweep.argmin_index >= 0)
      std::cout << "  argmin amplitude factor "
                << sweep.points[sweep.argmin_index].amplitude_factor;
    std::cout << "\n";
  }
  atomic_write((fs::path(root) / "config.snapshot").string(), config.resolved_text());
  return 0;
}

int cmd_optimize(const CommonArgs& args, const std::string& method, int length,
                 std::uint64_t seed_arg) {
  RunConfig config = load_config(args);
  if (!method.empty()) config.set("fom.kind", method);
  if (length > 0) config.set("fom.length", std::to_string(length));
  if (seed_arg != 0) config.set("optimizer.seed", std::to_string(seed_arg));

  const FomSpec spec = config.make_fom_spec();
  const GateSet gs = config.make_gateset();
  const CliffordTable table = build_clifford_table(gs);
  const EnsembleModel model = config.make_model();
  const DcrabConfig cfg = config.make_dcrab_config();
  const std::uint64_t run_seed = config.get_u64("optimizer.seed");

  std::ostringstream dir_name;
  dir_name << "run_" << fom_kind_name(spec.kind) << "_L" << spec.length << "_seed"
           << run_seed;
  const fs::path run_dir = fs::path(output_root(config, args)) / dir_name.str();

  const OptimizationRecord record = dcrab_run(spec, gs, table, model,
                                              config.reference_pulse(), cfg,
                                              SeedSeq{run_seed});

  atomic_write((run_dir / "config.snapshot").string(), config.resolved_text());
  write_fom_trace_csv((run_dir / "fom_trace.csv").string(), record);
  write_pulse_csv((run_dir / "best_pulse.csv").string(), record.best_pulse);
  for (const auto& [eval_index, pulse] : record.improvements) {
    std::ostringstream name;
    name << "improvement_" << std::setw(6) << std::setfill('0') << eval_index << ".csv";
    write_pulse_csv((run_dir / "pulses" / name.str()).string(), pulse);
  }
  write_result_json((run_dir / "result.json").string(), record);

  std::cout << run_dir.string() << "\n"
            << "fom_guess " << record.fom_guess.value << "  fom_opt " << record.fom_opt.value
            << "  fom_ref " << record.fom_ref.value << "\n";
  if (record.gain_defined)
    std::cout << "gain " << record.gain << " after " << record.n_evals << " evaluations\n";
  else
    std::cout << "gain undefined (guess/reference separation below threshold)\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& pulse_path, bool all_methods,
                 bool with_rb, const std::string& dump_dir) {
  const RunConfig config = load_config(args);
  const PulseShape pulse = read_pulse_csv(pulse_path);
  const GateSet gs = config.make_gateset();
  const CliffordTable table = build_clifford_table(gs);
  const EnsembleModel model = config.make_model();
  const int repeats = config.get_int("analysis.repeats");

  std::vector<FomSpec> specs;
  if (all_methods) {
    for (FomKind kind : {FomKind::Qpt, FomKind::Lgst, FomKind::GTilde, FomKind::Rlgst,
                         FomKind::Orbit}) {
      FomSpec spec = config.make_fom_spec();
      spec.kind = kind;
      if (kind == FomKind::Rlgst) spec.length = matched_gate_length(config.get_int("fom.length"));
      specs.push_back(spec);
    }
  } else {
    specs.push_back(config.make_fom_spec());
  }

  SeedSeq seed = SeedSeq{config.get_u64("plant.seed")}.child("evaluate");
  const auto rows = cross_evaluate(pulse, gs, config.reference_pulse(), table, model,
                                   config.a_max(), specs, with_rb, repeats, seed);

  const std::string root = output_root(config, args);
  write_gains_csv((fs::path(root) / "gains.csv").string(), rows);
  atomic_write((fs::path(root) / "config.snapshot").string(), config.resolved_text());

  if (!dump_dir.empty()) {
    // debug dump: LGST estimates and the QPT chi matrix of the evaluated pulse
    GateSet bound = gs;
    bound.pulses[kXHalfNeg] = pulse;
    EnsembleModel analytic = model;
    analytic.shots = 0;
    std::vector<Circuit> body;
    for (int k = 0; k < kNumGates; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          Circuit c;
          c.indices = {kSpamIndices[j], k, kSpamIndices[i]};
          body.push_back(c);
        }
    Rng rng = seed.child("dump").rng();
    const auto measured = measure_record(body, bound, &table, analytic, config.a_max(), rng);
    std::array<Mat4, kNumGates> gtilde;
    for (int k = 0; k < kNumGates; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          gtilde[k](i, j) = measured.expectations[16 * k + 4 * i + j];
    const LgstEstimates est = lgst_estimate(gtilde, gs);
    for (int k = 0; k < kNumGates; ++k)
      write_matrix_csv((fs::path(dump_dir) / ("lgst_gate_" + std::to_string(k) + ".csv")).string(),
                       est.gates[k]);
    const SpamFrame frame = ideal_spam_frame(gs);
    const Ptm qpt_ptm(frame.a_inv * gtilde[config.get_int("fom.qpt_gate")] * frame.b_inv);
    write_matrix_csv((fs::path(dump_dir) / "qpt_chi.csv").string(), ptm_to_chi(qpt_ptm).m);
  }

  for (const auto& r : rows) {
    std::cout << r.method << " L=" << r.length << "  ";
    if (r.defined)
      std::cout << "gain " << r.gain << " +- " << r.gain_std << "\n";
    else
      std::cout << "gain undefined\n";
  }
  return 0;
}

int cmd_rb(const CommonArgs& args, const std::string& pulse_path) {
  const RunConfig config = load_config(args);
  GateSet gs = config.make_gateset();
  if (!pulse_path.empty()) gs.pulses[kXHalfNeg] = read_pulse_csv(pulse_path);
  const CliffordTable table = build_clifford_table(gs);
  const EnsembleModel model = config.make_model();

  SeedSeq seed = SeedSeq{config.get_u64("plant.seed")}.child("rb");
  const auto lengths = default_rb_lengths();
  const RbResult rb = run_rb(gs, table, model, config.a_max(), lengths,
                             config.get_int("analysis.rb_circuits"), seed);

  const std::string root = output_root(config, args);
  write_rb_csv((fs::path(root) / "rb.csv").string(), rb);
  std::cout << "A " << rb.fit.amplitude << " +- " << rb.fit.amplitude_std << "\n"
            << "q " << rb.fit.decay << " +- " << rb.fit.decay_std << "\n"
            << "r " << rb.fit.error_per_clifford << " +- " << rb.fit.decay_std / 2.0
            << (rb.fit.converged ? "" : "  (boundary fit)") << "\n";
  return 0;
}

int cmd_correlate(const std::vector<std::string>& gain_files, const std::string& out_path) {
  if (gain_files.size() < 2)
    throw ValidationError("correlate needs at least two gains.csv files");

  std::vector<std::vector<GainRow>> runs;
  for (const auto& f : gain_files) runs.push_back(read_gains_csv(f));

  // methods usable in every run, with defined gains everywhere
  const auto column_key = [](const GainRow& r) {
    return r.method + "_L" + std::to_string(r.length);
  };
  std::vector<std::string> columns;
  for (const auto& row : runs[0])
    if (row.defined) columns.push_back(column_key(row));
  for (const auto& run : runs) {
    std::set<std::string> present;
    for (const auto& row : run)
      if (row.defined) present.insert(column_key(row));
    std::erase_if(columns, [&](const std::string& c) { return !present.count(c); });
  }
  if (columns.size() < 2)
    throw ValidationError("correlate: fewer than two aligned method columns across files");

  DataMatrix data;
  data.column_names = columns;
  data.values.resize(static_cast<Eigen::Index>(runs.size()),
                     static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = 0; j < columns.size(); ++j) {
      bool found = false;
      for (const auto& row : runs[i])
        if (row.defined && column_key(row) == columns[j]) {
          data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.gain;
          found = true;
          break;
        }
      if (!found) throw ValidationError("correlate: misaligned columns across files");
    }

  const Eigen::MatrixXd corr = correlation_matrix(data);
  write_correlation_csv(out_path, data.column_names, corr);
  std::cout << out_path << "\n";
  return 0;
}

int cmd_fluence(const CommonArgs& args, const std::vector<std::string>& pulse_files) {
  const RunConfig config = load_config(args);
  std::vector<std::pair<std::string, PulseShape>> pulses;
  for (const auto& f : pulse_files)
    pulses.emplace_back(fs::path(f).stem().string(), read_pulse_csv(f));
  const GateSet gs = config.make_gateset();
  const auto rows = fluence_report(pulses, gs.pulses[kXHalfNeg], config.reference_pulse());
  const std::string root = output_root(config, args);
  write_fluence_csv((fs::path(root) / "fluence.csv").string(), rows);
  for (const auto& r : rows) std::cout << r.name << "  " << r.value << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop gate-set optimization workbench"};
  app.require_subcommand(0, 1);

  std::string reference_out;
  app.add_option("--emit-config-reference", reference_out,
                 "write the documented default configuration and exit");

  CommonArgs sweep_args, optimize_args, evaluate_args, rb_args, fluence_args;

  auto* sweep = app.add_subcommand("sweep", "amplitude sweep of the optimized gate's pulse");
  std::string sweep_method = "orbit";
  std::vector<int> sweep_lengths;
  std::string sweep_grid_arg;
  add_common(sweep, sweep_args);
  sweep->add_option("--method", sweep_method, "qpt | lgst | gtilde | rlgst | orbit");
  sweep->add_option("--lengths", sweep_lengths, "circuit lengths (rlgst/orbit)")
      ->delimiter(',');
  sweep->add_option("--grid", sweep_grid_arg, "amplitude grid lo:hi:points");

  auto* optimize = app.add_subcommand("optimize", "closed-loop pulse optimization");
  std::string optimize_method;
  int optimize_length = 0;
  std::uint64_t optimize_seed = 0;
  add_common(optimize, optimize_args);
  optimize->add_option("--method", optimize_method, "FoM used during the optimization");
  optimize->add_option("--L", optimize_length, "circuit length");
  optimize->add_option("--seed", optimize_seed, "optimizer seed");

  auto* evaluate = app.add_subcommand("evaluate", "cross-evaluate a pulse file");
  std::string evaluate_pulse;
  bool evaluate_all = false;
  bool evaluate_rb = false;
  std::string evaluate_dump;
  add_common(evaluate, evaluate_args);
  evaluate->add_option("--pulse", evaluate_pulse, "pulse CSV file")->required();
  evaluate->add_flag("--all-methods", evaluate_all, "evaluate under every FoM");
  evaluate->add_flag("--rb", evaluate_rb, "include a randomized benchmarking gain");
  evaluate->add_option("--dump", evaluate_dump, "dump estimate matrices to this directory");

  auto* rb = app.add_subcommand("rb", "randomized benchmarking experiment");
  std::string rb_pulse;
  add_common(rb, rb_args);
  rb->add_option("--pulse", rb_pulse, "pulse CSV bound into the optimized slot");

  auto* correlate = app.add_subcommand("correlate", "correlation matrix of gain files");
  std::vector<std::string> correlate_files;
  std::string correlate_out = "correlation.csv";
  correlate->add_option("--gains", correlate_files, "gains.csv files")->required();
  correlate->add_option("--out", correlate_out, "output path");

  auto* fluence_cmd = app.add_subcommand("fluence", "fluence table for pulse files");
  std::vector<std::string> fluence_files;
  add_common(fluence_cmd, fluence_args);
  fluence_cmd->add_option("--pulses", fluence_files, "pulse CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;  // usage errors exit 2
  }

  try {
    if (!reference_out.empty()) {
      atomic_write(reference_out, RunConfig::reference_text());
      std::cout << reference_out << "\n";
      return 0;
    }
    if (sweep->parsed())
      return cmd_sweep(sweep_args, sweep_method, sweep_lengths, sweep_grid_arg);
    if (optimize->parsed())
      return cmd_optimize(optimize_args, optimize_method, optimize_length, optimize_seed);
    if (evaluate->parsed())
      return cmd_evaluate(evaluate_args, evaluate_pulse, evaluate_all, evaluate_rb,
                          evaluate_dump);
    if (rb->parsed()) return cmd_rb(rb_args, rb_pulse);
    if (correlate->parsed()) return cmd_correlate(correlate_files, correlate_out);
    if (fluence_cmd->parsed()) return cmd_fluence(fluence_args, fluence_files);
    std::cout << app.help();
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
