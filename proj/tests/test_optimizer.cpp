#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gsopt/config.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/optimizer.hpp"
#include "support.hpp"

using namespace gsopt;

namespace {
const double kAmax = 0.5 * std::numbers::pi / 14e-9;
}

TEST_CASE("estimate_sigma is zero on a noiseless plant") {
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  const CliffordTable table = build_clifford_table(gs);
  const EnsembleModel model = noiseless_model();
  FomSpec spec;
  spec.kind = FomKind::Orbit;
  spec.length = 5;
  spec.n_circuits = 50;
  CHECK(estimate_sigma(spec, gs.pulses[kXHalfNeg], gs, table, model, kAmax, SeedSeq{1}, 20) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("estimate_sigma tracks the binomial propagation prediction") {
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  const CliffordTable table = build_clifford_table(gs);
  const EnsembleModel model = default_model();
  FomSpec spec;
  spec.kind = FomKind::Orbit;
  spec.length = 10;
  spec.n_circuits = 300;

  const double sigma =
      estimate_sigma(spec, gs.pulses[kXHalfNeg], gs, table, model, kAmax, SeedSeq{2}, 100);

  // oracle: binomial variance of a survival near the measured mean,
  // propagated through the mean over N circuits
  const FomValue one =
      evaluate_fom(spec, gs, table, model, kAmax, SeedSeq{2}.child("circuits"),
                   SeedSeq{5}.child("n"));
  const double p = 1.0 - one.value;
  const double predicted =
      std::sqrt(p * (1.0 - p) / static_cast<double>(model.shots) / spec.n_circuits);
  CHECK(sigma > 0.5 * predicted);
  CHECK(sigma < 2.0 * predicted);
}

TEST_CASE("estimate_sigma is deterministic") {
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  const CliffordTable table = build_clifford_table(gs);
  const EnsembleModel model = default_model();
  FomSpec spec;
  spec.kind = FomKind::Orbit;
  spec.length = 5;
  spec.n_circuits = 50;
  const double a = estimate_sigma(spec, gs.pulses[kXHalfNeg], gs, table, model, kAmax,
                                  SeedSeq{3}, 30);
  const double b = estimate_sigma(spec, gs.pulses[kXHalfNeg], gs, table, model, kAmax,
                                  SeedSeq{3}, 30);
  CHECK(a == b);
}

TEST_CASE("nelder_mead minimizes a convex quadratic") {
  const auto objective = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  };
  NelderMeadOptions options;
  options.max_evals = 200;
  options.initial_step = 0.5;
  const auto result = nelder_mead(objective, {1.0, 1.0}, options);
  CHECK(result.f < 1e-8);
  CHECK(result.n_evals <= 200);
}

TEST_CASE("nelder_mead solves the 2d Rosenbrock benchmark") {
  const auto rosenbrock = [](std::span<const double> x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  NelderMeadOptions options;
  options.max_evals = 600;
  options.initial_step = 0.5;
  const auto result = nelder_mead(rosenbrock, {-1.2, 1.0}, options);
  CHECK(result.f < 1e-4);

  // oracle: brute-force refinement grid around the analytic optimum (1, 1)
  double grid_min = 1e9;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double x[2] = {0.9 + 0.005 * i, 0.9 + 0.005 * j};
      grid_min = std::min(grid_min, rosenbrock(x));
    }
  CHECK(result.f <= grid_min + 1e-4);
}

TEST_CASE("nelder_mead returns the start point for a constant objective") {
  const auto constant = [](std::span<const double>) { return 7.0; };
  NelderMeadOptions options;
  options.max_evals = 50;
  options.initial_step = 1.0;
  const auto result = nelder_mead(constant, {3.0, -1.0, 2.0}, options);
  CHECK(result.f == 7.0);
  CHECK(result.x == std::vector<double>{3.0, -1.0, 2.0});
  CHECK(result.n_evals == 50);
}

TEST_CASE("gain arithmetic and errors") {
  CHECK(gain(0.5, 1.0, 0.5) == doctest::Approx(1.0));
  CHECK(gain(1.0, 1.0, 0.5) == doctest::Approx(0.0));
  CHECK(gain(0.3, 1.0, 0.5) > 1.0);
  CHECK_THROWS_AS(gain(0.5, 1.0, 1.0 + 1e-12, 1e-9), ValidationError);

  // frame invariance: common shifts and positive scalings cancel
  Rng rng(81);
  for (int i = 0; i < 50; ++i) {
    const double u = rng.uniform(0.5, 1.5);
    const double r = u - rng.uniform(0.1, 0.5);
    const double o = rng.uniform(0.2, 1.6);
    const double shift = rng.uniform(-3.0, 3.0);
    const double scale = rng.uniform(0.1, 5.0);
    const double base = gain(o, u, r);
    CHECK(gain(o + shift, u + shift, r + shift) == doctest::Approx(base).epsilon(1e-9));
    CHECK(gain(o * scale, u * scale, r * scale) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("dcrab_run on a noiseless plant accepts no false improvement") {
  const RunConfig config;
  const GateSet gs = config.make_gateset();
  const CliffordTable table = build_clifford_table(gs);
  const EnsembleModel model = noiseless_model();

  FomSpec spec;
  spec.kind = FomKind::Qpt;

  DcrabConfig cfg = config.make_dcrab_config();
  cfg.superiterations = 1;
  cfg.max_evals_per_superiteration = 60;
  cfg.stop_window = 50;
  cfg.sigma_repeats = 10;
  cfg.endpoint_repeats = 5;

  const OptimizationRecord record =
      dcrab_run(spec, gs, table, model, config.reference_pulse(), cfg, SeedSeq{7});

  CHECK(record.sigma == doctest::Approx(0.0));
  CHECK(record.fom_guess.value < 1e-9);
  CHECK(record.improvements.empty());  // the guess is already optimal
  CHECK(record.best_pulse.ax == gs.pulses[kXHalfNeg].ax);
  CHECK_FALSE(record.gain_defined);  // both endpoints are exactly zero
  for (const auto& row : record.trace) CHECK_FALSE(row.is_reeval);
}

TEST_CASE("dcrab_run is deterministic and bound safe") {
  const RunConfig config;
  const GateSet gs = config.make_gateset();
  const CliffordTable table = build_clifford_table(gs);
  EnsembleModel model = config.make_model();

  FomSpec spec;
  spec.kind = FomKind::Orbit;
  spec.length = 5;
  spec.n_circuits = 50;

  DcrabConfig cfg = config.make_dcrab_config();
  cfg.superiterations = 2;
  cfg.max_evals_per_superiteration = 80;
  cfg.stop_window = 60;
  cfg.sigma_repeats = 20;
  cfg.endpoint_repeats = 5;

  const OptimizationRecord a =
      dcrab_run(spec, gs, table, model, config.reference_pulse(), cfg, SeedSeq{8});
  const OptimizationRecord b =
      dcrab_run(spec, gs, table, model, config.reference_pulse(), cfg, SeedSeq{8});

  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].fom == b.trace[i].fom);  // bit identical
    CHECK(a.trace[i].eval_index == b.trace[i].eval_index);
    CHECK(a.trace[i].superiteration == b.trace[i].superiteration);
    CHECK(a.trace[i].is_reeval == b.trace[i].is_reeval);
    CHECK(a.trace[i].is_drift_check == b.trace[i].is_drift_check);
  }
  CHECK(a.best_pulse.ax == b.best_pulse.ax);
  CHECK(a.best_pulse.ay == b.best_pulse.ay);
  CHECK(a.fom_opt.value == b.fom_opt.value);

  // constraint safety: the accepted pulses satisfy the envelope bound exactly
  CHECK(a.best_pulse.max_envelope() <= cfg.a_max);
  for (const auto& [idx, pulse] : a.improvements) CHECK(pulse.max_envelope() <= cfg.a_max);

  // the record never reports a pulse worse than the guess beyond noise
  CHECK(a.fom_opt.value <= a.fom_guess.value + a.sigma);
}

TEST_CASE("dcrab_run improves the default plant at small budget") {
  const RunConfig config;
  const GateSet gs = config.make_gateset();
  const CliffordTable table = build_clifford_table(gs);
  EnsembleModel model = config.make_model();

  FomSpec spec;
  spec.kind = FomKind::Orbit;
  spec.length = 10;
  spec.n_circuits = 100;

  DcrabConfig cfg = config.make_dcrab_config();
  cfg.superiterations = 2;
  cfg.max_evals_per_superiteration = 250;
  cfg.stop_window = 200;
  cfg.sigma_repeats = 50;
  cfg.endpoint_repeats = 10;

  const OptimizationRecord record =
      dcrab_run(spec, gs, table, model, config.reference_pulse(), cfg, SeedSeq{9});
  REQUIRE(record.gain_defined);
  CHECK(record.gain > 0.3);
  CHECK(record.n_evals <= 500);
}

TEST_CASE("dcrab_run exercises drift re-measurement") {
  const RunConfig config;
  const GateSet gs = config.make_gateset();
  const CliffordTable table = build_clifford_table(gs);
  EnsembleModel model = config.make_model();
  model.drift = DriftMode::RandomWalk;
  model.drift_sigma = 2e-4;

  FomSpec spec;
  spec.kind = FomKind::Orbit;
  spec.length = 5;
  spec.n_circuits = 50;

  DcrabConfig cfg = config.make_dcrab_config();
  cfg.superiterations = 1;
  cfg.max_evals_per_superiteration = 100;
  cfg.stop_window = 90;
  cfg.drift_remeasure_every = 25;
  cfg.sigma_repeats = 20;
  cfg.endpoint_repeats = 5;

  const OptimizationRecord record =
      dcrab_run(spec, gs, table, model, config.reference_pulse(), cfg, SeedSeq{10});
  int drift_checks = 0;
  for (const auto& row : record.trace) drift_checks += row.is_drift_check ? 1 : 0;
  CHECK(drift_checks >= 2);
}
