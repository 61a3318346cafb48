#include "gsopt/foms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gsopt/errors.hpp"

namespace gsopt {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

double frobenius(const Mat4& m) { return m.norm(); }

double condition_number(const Mat4& m) {
  Eigen::JacobiSVD<Mat4> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(3) <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(3);
}

}  // namespace

std::string fom_kind_name(FomKind kind) {
  switch (kind) {
    case FomKind::Qpt: return "qpt";
    case FomKind::Lgst: return "lgst";
    case FomKind::GTilde: return "gtilde";
    case FomKind::Rlgst: return "rlgst";
    case FomKind::Orbit: return "orbit";
  }
  return "unknown";
}

std::optional<FomKind> fom_kind_from_name(const std::string& name) {
  if (name == "qpt") return FomKind::Qpt;
  if (name == "lgst") return FomKind::Lgst;
  if (name == "gtilde") return FomKind::GTilde;
  if (name == "rlgst") return FomKind::Rlgst;
  if (name == "orbit") return FomKind::Orbit;
  return std::nullopt;
}

SpamFrame ideal_spam_frame(const GateSet& gs) {
  const Vec4 rho = ground_state().coords;
  const Vec4 effect = ground_state().coords;
  SpamFrame frame;
  for (int i = 0; i < 4; ++i) {
    frame.a.row(i) = (effect.transpose() * gs.targets[kSpamIndices[i]].m);
    frame.b.col(i) = gs.targets[kSpamIndices[i]].m * rho;
  }
  frame.a_inv = frame.a.inverse();
  frame.b_inv = frame.b.inverse();
  return frame;
}

std::array<Mat4, kNumGates> ideal_gtilde_targets(const GateSet& gs) {
  const SpamFrame frame = ideal_spam_frame(gs);
  std::array<Mat4, kNumGates> ttilde;
  for (int k = 0; k < kNumGates; ++k) ttilde[k] = frame.a * gs.targets[k].m * frame.b;
  return ttilde;
}

double fom_qpt(const Mat4& p, const GateSet& gs, int target_gate) {
  if (target_gate < 0 || target_gate >= kNumGates)
    throw ValidationError("fom_qpt: target gate index out of range");
  const SpamFrame frame = ideal_spam_frame(gs);
  const Ptm reconstructed(frame.a_inv * p * frame.b_inv);
  const ChiMatrix chi = ptm_to_chi(reconstructed);
  const ChiMatrix chi_target = chi_from_unitary(gs.unitaries[target_gate]);
  return (chi.m - chi_target.m).norm();
}

LgstEstimates lgst_estimate(const std::array<Mat4, kNumGates>& gtilde, const GateSet& gs) {
  const Mat4& gram = gtilde[0];
  if (condition_number(gram) > 1e6)
    throw NumericalError("lgst_estimate: Gram matrix is ill-conditioned");
  const Mat4 gram_inv = gram.inverse();

  // rho-tilde and E-tilde reuse the Gram matrix data: column/row zero hold
  // <<E| F_i |rho>> measured with idle gates in the remaining slots
  const Vec4 rho_tilde = gram.col(0);
  const Eigen::RowVector4d e_tilde = gram.row(0);

  const SpamFrame frame = ideal_spam_frame(gs);
  LgstEstimates est;
  for (int k = 0; k < kNumGates; ++k)
    est.gates[k] = frame.b * (gram_inv * gtilde[k]) * frame.b_inv;
  est.rho_hat = frame.b * (gram_inv * rho_tilde);
  est.e_hat = (e_tilde * frame.b_inv).transpose();
  est.spam_outer = est.rho_hat * est.e_hat.transpose();
  return est;
}

double fom_lgst(const LgstEstimates& est, const GateSet& gs) {
  double sum = 0.0;
  for (int k = 0; k < kNumGates; ++k) {
    const Mat4 diff = est.gates[k] - gs.targets[k].m;
    sum += diff.squaredNorm();
  }
  const Vec4 rho_t = ground_state().coords;
  const Vec4 e_t = ground_state().coords;
  const Mat4 spam_target = rho_t * e_t.transpose();
  sum += (est.spam_outer - spam_target).squaredNorm();
  return std::sqrt(sum);
}

double fom_gtilde(const std::array<Mat4, kNumGates>& gtilde, const GateSet& gs) {
  const auto ttilde = ideal_gtilde_targets(gs);
  double sum = 0.0;
  for (int k = 0; k < kNumGates; ++k) sum += (gtilde[k] - ttilde[k]).squaredNorm();
  return std::sqrt(sum);
}

double fom_orbit(std::span<const double> survivals) {
  if (survivals.empty()) throw ValidationError("fom_orbit: no survival estimates");
  const double mean =
      std::accumulate(survivals.begin(), survivals.end(), 0.0) /
      static_cast<double>(survivals.size());
  return 1.0 - mean;
}

RlgstErrors rlgst_estimate(const std::vector<Circuit>& circuits, std::span<const double> p,
                           const GateSet& gs) {
  const int n = static_cast<int>(circuits.size());
  if (n == 0) throw ValidationError("rlgst_estimate: need at least one circuit");
  if (p.size() != circuits.size())
    throw ValidationError("rlgst_estimate: circuit/estimate count mismatch");

  const Vec4 rho_t = ground_state().coords;
  const Vec4 e_t = ground_state().coords;
  constexpr int kParams = kNumGates * 16 + 8;

  Eigen::MatrixXd design(n, kParams);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const Circuit& c = circuits[i];
    if (c.kind != Circuit::Kind::GateString)
      throw ValidationError("rlgst_estimate: circuits must be gate strings");
    const int len = c.length();

    // forward states s_j = T_{k_j} ... T_{k_1} |rho_T>>
    std::vector<Vec4> state_after(len + 1);
    state_after[0] = rho_t;
    for (int j = 0; j < len; ++j)
      state_after[j + 1] = gs.targets[c.indices[j]].m * state_after[j];

    // backward effects u_j = <<E_T| T_{k_L} ... T_{k_{j+1}}
    std::vector<Eigen::RowVector4d> effect_before(len + 1);
    effect_before[len] = e_t.transpose();
    for (int j = len; j >= 1; --j)
      effect_before[j - 1] = effect_before[j] * gs.targets[c.indices[j - 1]].m;

    design.row(i).setZero();
    for (int j = 0; j < len; ++j) {
      const int g = c.indices[j];
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          design(i, g * 16 + a * 4 + b) += effect_before[j + 1](a) * state_after[j + 1](b);
    }
    // SPAM terms: <<E_T| M_i v_rho and v_E^T M_i |rho_T>>
    for (int a = 0; a < 4; ++a) {
      design(i, kNumGates * 16 + a) = effect_before[0](a);
      design(i, kNumGates * 16 + 4 + a) = state_after[len](a);
    }
    rhs(i) = p[i] - effect_before[0] * rho_t;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd x = svd.solve(rhs);

  RlgstErrors errors;
  for (int g = 0; g < kNumGates; ++g)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) errors.gate_errors[g](a, b) = x(g * 16 + a * 4 + b);
  for (int a = 0; a < 4; ++a) {
    errors.rho_error(a) = x(kNumGates * 16 + a);
    errors.povm_error(a) = x(kNumGates * 16 + 4 + a);
  }
  const Eigen::VectorXd fitted = design * x;
  errors.predicted.resize(n);
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    errors.predicted[i] = p[i] - (rhs(i) - fitted(i));
    const double r = rhs(i) - fitted(i);
    ss += r * r;
  }
  errors.residual_rms = std::sqrt(ss / n);
  return errors;
}

double fom_rlgst(const RlgstErrors& errors) {
  double sum = 0.0;
  for (const auto& e : errors.gate_errors) sum += e.squaredNorm();
  sum += errors.rho_error.squaredNorm();
  sum += errors.povm_error.squaredNorm();
  return std::sqrt(sum);
}

RbFit rb_fit(std::span<const int> lengths, std::span<const double> survivals) {
  if (lengths.size() != survivals.size())
    throw ValidationError("rb_fit: length/survival count mismatch");
  std::vector<int> distinct(lengths.begin(), lengths.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3)
    throw ValidationError("rb_fit: need at least three distinct circuit lengths");

  const int n = static_cast<int>(lengths.size());
  // A is linear given q, so profile it out and minimize over q alone
  const auto amplitude_for = [&](double q) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      const double qm = std::pow(q, lengths[i]);
      num += (survivals[i] - 0.5) * qm;
      den += qm * qm;
    }
    return den > 1e-300 ? num / den : 0.0;
  };
  const auto sse_for = [&](double q) {
    const double a = amplitude_for(q);
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = survivals[i] - (a * std::pow(q, lengths[i]) + 0.5);
      sse += r * r;
    }
    return sse;
  };

  // golden-section search on [0, 1]
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = sse_for(x1), f2 = sse_for(x2);
  for (int it = 0; it < 120; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = sse_for(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = sse_for(x2);
    }
  }
  double q = 0.5 * (lo + hi);
  // snap to the boundary if the bracket collapsed onto it
  bool at_boundary = false;
  if (sse_for(0.0) <= sse_for(q)) {
    q = 0.0;
    at_boundary = true;
  } else if (sse_for(1.0) <= sse_for(q)) {
    q = 1.0;
    at_boundary = true;
  }

  RbFit fit;
  fit.decay = q;
  fit.amplitude = amplitude_for(q);
  fit.error_per_clifford = 0.5 * (1.0 - q);
  fit.converged = !at_boundary;

  // Gauss-Newton covariance at the optimum
  const double sse = sse_for(q);
  if (n > 2) {
    Eigen::MatrixXd jac(n, 2);
    for (int i = 0; i < n; ++i) {
      const int m = lengths[i];
      jac(i, 0) = std::pow(q, m);
      jac(i, 1) = m > 0 ? fit.amplitude * m * std::pow(q, m - 1) : 0.0;
    }
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    if (std::abs(jtj.determinant()) > 1e-300) {
      const Eigen::Matrix2d cov = jtj.inverse() * (sse / (n - 2));
      fit.amplitude_std = std::sqrt(std::max(cov(0, 0), 0.0));
      fit.decay_std = std::sqrt(std::max(cov(1, 1), 0.0));
    }
  }
  return fit;
}

//-------------------------------------------------------------------------
// Measurement drivers
//-------------------------------------------------------------------------

namespace {

std::vector<Circuit> spam_sandwich_circuits(int gate) {
  // time order: F_j, then the probed gate, then F_i; i-major so the
  // expectation vector unpacks row-wise into the 4x4 matrix
  std::vector<Circuit> body;
  body.reserve(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Circuit c;
      c.kind = Circuit::Kind::GateString;
      c.indices = {kSpamIndices[j], gate, kSpamIndices[i]};
      body.push_back(c);
    }
  return body;
}

Mat4 unpack_matrix(std::span<const double> values, std::size_t offset) {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = values[offset + i * 4 + j];
  return m;
}

}  // namespace

FomValue evaluate_fom(const FomSpec& spec, const GateSet& gs, const CliffordTable& table,
                      const EnsembleModel& model, double a_max, SeedSeq circuit_seed,
                      SeedSeq noise_seed) {
  std::vector<Circuit> body;
  Rng circuit_rng = circuit_seed.rng();

  switch (spec.kind) {
    case FomKind::Qpt:
      body = spam_sandwich_circuits(spec.qpt_gate);
      break;
    case FomKind::Lgst:
    case FomKind::GTilde:
      for (int k = 0; k < kNumGates; ++k) {
        auto sandwich = spam_sandwich_circuits(k);
        body.insert(body.end(), sandwich.begin(), sandwich.end());
      }
      break;
    case FomKind::Rlgst:
      if (spec.length < 1) throw ValidationError("evaluate_fom: RLGST length must be >= 1");
      body.reserve(spec.n_circuits);
      for (int i = 0; i < spec.n_circuits; ++i)
        body.push_back(sample_gate_string(spec.length, circuit_rng));
      break;
    case FomKind::Orbit:
      if (spec.length < 1) throw ValidationError("evaluate_fom: ORBIT length must be >= 1");
      body.reserve(spec.n_circuits);
      for (int i = 0; i < spec.n_circuits; ++i)
        body.push_back(sample_clifford_circuit(table, spec.length, circuit_rng));
      break;
  }

  Rng measure_rng = noise_seed.rng();
  const MeasureResult measured = measure_record(body, gs, &table, model, a_max, measure_rng);
  const auto& p = measured.expectations;

  FomValue result;
  result.n_measurements = static_cast<int>(body.size());
  result.std_estimate = kNaN;

  switch (spec.kind) {
    case FomKind::Qpt:
      result.value = fom_qpt(unpack_matrix(p, 0), gs, spec.qpt_gate);
      break;
    case FomKind::Lgst: {
      std::array<Mat4, kNumGates> gtilde;
      for (int k = 0; k < kNumGates; ++k) gtilde[k] = unpack_matrix(p, 16 * k);
      result.value = fom_lgst(lgst_estimate(gtilde, gs), gs);
      break;
    }
    case FomKind::GTilde: {
      std::array<Mat4, kNumGates> gtilde;
      for (int k = 0; k < kNumGates; ++k) gtilde[k] = unpack_matrix(p, 16 * k);
      result.value = fom_gtilde(gtilde, gs);
      break;
    }
    case FomKind::Rlgst:
      result.value = fom_rlgst(rlgst_estimate(body, p, gs));
      break;
    case FomKind::Orbit: {
      result.value = fom_orbit(p);
      if (p.size() > 1) {
        const double mean = 1.0 - result.value;
        double var = 0.0;
        for (double s : p) var += (s - mean) * (s - mean);
        var /= static_cast<double>(p.size() - 1);
        result.std_estimate = std::sqrt(var / static_cast<double>(p.size()));
      }
      break;
    }
  }
  return result;
}

std::vector<int> default_rb_lengths() { return {1, 2, 4, 6, 9, 12, 15, 18}; }

RbResult run_rb(const GateSet& gs, const CliffordTable& table, const EnsembleModel& model,
                double a_max, std::span<const int> lengths, int n_circuits, SeedSeq seed) {
  RbResult result;
  result.lengths.assign(lengths.begin(), lengths.end());
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    SeedSeq length_seed = seed.child(static_cast<std::uint64_t>(li));
    Rng circuit_rng = length_seed.child("circuits").rng();
    std::vector<Circuit> body;
    body.reserve(n_circuits);
    for (int i = 0; i < n_circuits; ++i)
      body.push_back(sample_clifford_circuit(table, lengths[li], circuit_rng));
    Rng measure_rng = length_seed.child("measure").rng();
    const MeasureResult measured =
        measure_record(body, gs, &table, model, a_max, measure_rng);

    double mean = 0.0;
    for (double v : measured.expectations) mean += v;
    mean /= static_cast<double>(measured.expectations.size());
    double var = 0.0;
    for (double v : measured.expectations) var += (v - mean) * (v - mean);
    var /= std::max<std::size_t>(measured.expectations.size() - 1, 1);
    result.survival.push_back(mean);
    result.survival_std.push_back(std::sqrt(var / measured.expectations.size()));
  }
  result.fit = rb_fit(result.lengths, result.survival);
  return result;
}

}  // namespace gsopt
