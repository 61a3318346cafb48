#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gsopt/errors.hpp"
#include "gsopt/plant.hpp"
#include "support.hpp"

using namespace gsopt;

namespace {
constexpr double kPi = std::numbers::pi;
const double kAmax = 0.5 * kPi / 14e-9;

double transfer_probability(const Mat2c& u) {
  return std::norm(u(1, 0));  // |<1|U|0>|^2
}
}  // namespace

TEST_CASE("propagate trivial cases") {
  const EnsembleMember resonant{0.0, 1.0, 1.0};
  const PulseShape zero = rectangular(0.0, 10e-9, 0.25e-9);
  CHECK((propagate(zero, resonant) - Mat2c::Identity()).norm() < 1e-13);

  // resonant pi pulse flips the population completely
  const PulseShape pi_pulse = rectangular(kPi / 20e-9, 20e-9, 0.25e-9);
  CHECK(transfer_probability(propagate(pi_pulse, resonant)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("propagate matches the generalized Rabi formula") {
  // oracle: transfer = (a^2/(a^2+d^2)) sin^2(sqrt(a^2+d^2) t / 2)
  const double omega = 2.0 * kPi * 10e6;
  const double t = kPi / omega;
  const EnsembleMember detuned{omega, 1.0, 1.0};
  const PulseShape pulse = rectangular(omega, t, t / 200.0);
  const double w = std::sqrt(2.0) * omega;
  const double expected = 0.5 * std::pow(std::sin(0.5 * w * t), 2);
  CHECK(transfer_probability(propagate(pulse, detuned)) ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("propagate is time ordered") {
  // x then y differs from y then x; check against explicit products
  PulseShape xy = rectangular(kPi / 10e-9, 20e-9, 0.5e-9);
  for (std::size_t k = 20; k < 40; ++k) std::swap(xy.ax[k], xy.ay[k]);
  const EnsembleMember m{0.0, 1.0, 1.0};
  const Mat2c u = propagate(xy, m);
  const Mat2c u_x = rotation_unitary(kPi, 1, 0, 0);
  const Mat2c u_y = rotation_unitary(kPi, 0, 1, 0);
  CHECK((u - u_y * u_x).norm() < 1e-9);  // first half drives x, second y
}

TEST_CASE("gate_superop noiseless limit matches the target") {
  EnsembleModel model = noiseless_model();
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  for (int k = 0; k < kNumGates; ++k) {
    const Ptm op = gate_superop(gs.pulses[k], model);
    CHECK((op.m - gs.targets[k].m).norm() < 1e-9);
  }
}

TEST_CASE("two-member dephasing contracts the coherence block") {
  const double delta = 2.0 * kPi * 3e6;
  const double t = 50e-9;
  EnsembleModel model;
  model.members = {{-delta, 1.0, 0.5}, {delta, 1.0, 0.5}};
  model.t2 = 2e-6;
  const PulseShape idle = rectangular(0.0, t, 0.25e-9);
  const Ptm op = gate_superop(idle, model);

  const double contraction = std::cos(delta * t) * std::exp(-t / model.t2);
  CHECK(op.m(1, 1) == doctest::Approx(contraction).epsilon(1e-9));
  CHECK(op.m(2, 2) == doctest::Approx(contraction).epsilon(1e-9));
  CHECK(op.m(3, 3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(op.m(1, 2)) < 1e-12);
}

TEST_CASE("gate_superop is trace preserving for arbitrary pulses") {
  Rng rng(23);
  EnsembleModel model = default_model();
  PulseShape p = rectangular(0.0, 30e-9, 0.25e-9);
  for (std::size_t k = 0; k < p.ax.size(); ++k) {
    p.ax[k] = rng.normal(0.0, 0.3 * kAmax);
    p.ay[k] = rng.normal(0.0, 0.3 * kAmax);
  }
  const Ptm op = gate_superop(p, model);
  CHECK(std::abs(op.m(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(op.m(0, 1)) + std::abs(op.m(0, 2)) + std::abs(op.m(0, 3)) < 1e-12);
}

TEST_CASE("single-member undamped superop is unitary derived") {
  EnsembleModel model;
  model.members = {{2.0 * kPi * 1e6, 1.02, 1.0}};
  model.t2 = std::numeric_limits<double>::infinity();
  const PulseShape p = rectangular(kPi / 30e-9, 30e-9, 0.25e-9);
  const Ptm op = gate_superop(p, model);
  const Eigen::Matrix3d block = op.m.block<3, 3>(1, 1);
  CHECK((block * block.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-10);
  CHECK(block.determinant() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("run_circuit analytic mode on trivial circuits") {
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  const CliffordTable table = build_clifford_table(gs);
  EnsembleModel model = noiseless_model();
  Rng rng(31);

  Circuit empty;
  CHECK(run_circuit(empty, gs, &table, model, rng) == doctest::Approx(1.0).epsilon(1e-12));

  Circuit flip;
  flip.indices = {kXPi};
  CHECK(run_circuit(flip, gs, &table, model, rng) == doctest::Approx(0.0).epsilon(1e-12));

  Circuit bad;
  bad.indices = {7};
  CHECK_THROWS_AS(run_circuit(bad, gs, &table, model, rng), ValidationError);
}

TEST_CASE("run_circuit estimates match the binomial confidence oracle") {
  // purity 0.4 makes the empty-circuit population exactly 0.7
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  const CliffordTable table = build_clifford_table(gs);
  EnsembleModel model = noiseless_model();
  model.spam_purity = 0.4;
  model.shots = 10000;

  Circuit empty;
  Rng rng(32);
  const double bound = 3.0 * std::sqrt(0.7 * 0.3 / 10000.0);
  for (int i = 0; i < 20; ++i)
    CHECK(std::abs(run_circuit(empty, gs, &table, model, rng) - 0.7) < bound);
}

TEST_CASE("rabi_trace single member is a pure sinusoid") {
  EnsembleModel model = noiseless_model();
  const double a = kAmax;
  const auto trace = rabi_trace(model, 600e-9, a, 240);
  for (int k = 0; k < 240; ++k) {
    const double t = (k + 0.5) * 600e-9 / 240;
    CHECK(trace[k] == doctest::Approx(1.0 - std::pow(std::sin(0.5 * a * t), 2)).epsilon(1e-12));
  }
}

TEST_CASE("rabi_trace two members equals the sum of analytic curves") {
  const double delta = 2.0 * kPi * 2e6;
  EnsembleModel model;
  model.members = {{-delta, 1.0, 0.5}, {delta, 1.0, 0.5}};
  const double a = kAmax;
  const auto trace = rabi_trace(model, 600e-9, a, 200);
  for (int k = 0; k < 200; ++k) {
    const double t = (k + 0.5) * 600e-9 / 200;
    const double w = std::sqrt(a * a + delta * delta);
    const double single = 1.0 - (a * a / (w * w)) * std::pow(std::sin(0.5 * w * t), 2);
    CHECK(trace[k] == doctest::Approx(single).epsilon(1e-12));  // both members identical here
  }
}

TEST_CASE("default model shows a decaying beat envelope within 600 ns") {
  const EnsembleModel model = default_model();
  const auto trace = rabi_trace(model, 600e-9, kAmax, 600);
  // local maxima of the population trace the upper envelope
  std::vector<double> peaks;
  for (std::size_t k = 1; k + 1 < trace.size(); ++k)
    if (trace[k] > trace[k - 1] && trace[k] >= trace[k + 1]) peaks.push_back(trace[k] - 0.5);
  REQUIRE(peaks.size() >= 5);
  double peak_max = 0.0, peak_min = 1e9;
  for (double p : peaks) {
    peak_max = std::max(peak_max, p);
    peak_min = std::min(peak_min, p);
  }
  CHECK(peak_min < 0.8 * peak_max);
}

TEST_CASE("measure_record analytic mode returns exact expectations") {
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  const CliffordTable table = build_clifford_table(gs);
  const EnsembleModel model = noiseless_model();
  Rng rng(41);

  Circuit empty;
  Circuit flip;
  flip.indices = {kXPi};
  const auto result = measure_record({empty, flip}, gs, &table, model, kAmax, rng);
  CHECK(result.expectations[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(result.expectations[1]) < 1e-9);
  for (double f : result.raw.rabi_block) CHECK(f >= 0.0);
  for (double f : result.raw.body) CHECK(f >= 0.0);
}

TEST_CASE("normalization cancels the readout contrast") {
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  const CliffordTable table = build_clifford_table(gs);
  EnsembleModel model = default_model();
  Rng rng_a(52), rng_b(52);  // paired seeds: identical binomial draws

  std::vector<Circuit> body(5);
  body[1].indices = {kXHalf};
  body[2].indices = {kXPi};
  body[3].indices = {kYHalf, kXHalf};
  body[4].indices = {kXHalf, kXHalf, kXHalf};

  const auto full = measure_record(body, gs, &table, model, kAmax, rng_a);
  EnsembleModel halved = model;
  halved.contrast_c0 = model.contrast_c1 + 0.5 * (model.contrast_c0 - model.contrast_c1);
  const auto scaled = measure_record(body, gs, &table, halved, kAmax, rng_b);

  for (std::size_t i = 0; i < body.size(); ++i)
    CHECK(full.expectations[i] == doctest::Approx(scaled.expectations[i]).epsilon(1e-9));
}

TEST_CASE("advance_drift") {
  EnsembleModel model = default_model();
  Rng rng(61);
  SUBCASE("no-op without drift") {
    const EnsembleModel out = advance_drift(model, rng);
    CHECK(out.drift_multiplier == 1.0);
  }
  SUBCASE("no-op with zero step") {
    model.drift = DriftMode::RandomWalk;
    model.drift_sigma = 0.0;
    const EnsembleModel out = advance_drift(model, rng);
    CHECK(out.drift_multiplier == 1.0);
  }
  SUBCASE("random-walk variance grows linearly") {
    model.drift = DriftMode::RandomWalk;
    model.drift_sigma = 1e-3;
    const int steps = 10000;
    const int walks = 1000;
    std::vector<double> finals;
    for (int w = 0; w < walks; ++w) {
      EnsembleModel walker = model;
      for (int s = 0; s < steps; ++s) walker = advance_drift(walker, rng);
      finals.push_back(walker.drift_multiplier - 1.0);
    }
    double var = 0.0;
    for (double f : finals) var += f * f;
    var /= walks;
    const double expected = steps * model.drift_sigma * model.drift_sigma;
    CHECK(var == doctest::Approx(expected).epsilon(0.10));
  }
}

TEST_CASE("drift shifts the effective drive scale in superops") {
  EnsembleModel model = noiseless_model();
  model.drift_multiplier = 0.9;
  const GateSet gs = build_gateset(0.25e-9, 30e-9);
  // a 0.9-scaled pi pulse under-rotates; population transfer sin^2(0.9 pi/2)
  const Ptm op = gate_superop(gs.pulses[kXPi], model);
  const Vec4 out = op.m * ground_state().coords;
  const double p0 = ground_state().coords.dot(out);
  CHECK(p0 == doctest::Approx(1.0 - std::pow(std::sin(0.45 * kPi), 2)).epsilon(1e-9));
}
