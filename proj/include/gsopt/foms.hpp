#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsopt/gateset.hpp"
#include "gsopt/hs.hpp"
#include "gsopt/plant.hpp"

namespace gsopt {

//=========================================================================
// The five gate-set figures of merit plus the randomized-benchmarking fit.
// Every FoM consumes normalized expectation values and returns a scalar to
// be minimized; zero on exact target-model data.
//=========================================================================

enum class FomKind { Qpt, Lgst, GTilde, Rlgst, Orbit };

std::string fom_kind_name(FomKind kind);
std::optional<FomKind> fom_kind_from_name(const std::string& name);

/// Which metric to evaluate and at what circuit length / count.
struct FomSpec {
  FomKind kind = FomKind::Orbit;
  int length = 10;       ///< RLGST gate count or ORBIT Clifford count
  int n_circuits = 300;  ///< random circuits per evaluation
  int qpt_gate = 2;      ///< gate reconstructed by QPT
};

/// Ideal SPAM frame: row i of `a` is <<E_T| T_{F_i}; column j of `b` is
/// T_{F_j} |rho_T>>. Both are invertible for the fixed SPAM set.
struct SpamFrame {
  Mat4 a;
  Mat4 b;
  Mat4 a_inv;
  Mat4 b_inv;
};
SpamFrame ideal_spam_frame(const GateSet& gs);

/// Ideal expectation matrices (T-tilde_k)_{ij} = <<E_T| T_{F_i} T_k T_{F_j} |rho_T>>.
std::array<Mat4, kNumGates> ideal_gtilde_targets(const GateSet& gs);

//-------------------------------------------------------------------------
// QPT
//-------------------------------------------------------------------------

/// Linear-inversion process tomography of one gate from p_ij measurements,
/// assuming ideal SPAM; returns the Frobenius distance of the reconstructed
/// chi matrix to the target gate's chi matrix.
double fom_qpt(const Mat4& p, const GateSet& gs, int target_gate);

//-------------------------------------------------------------------------
// LGST and the raw expectation-matrix distance
//-------------------------------------------------------------------------

/// Gauge-corrected linear-inversion gate-set estimates.
struct LgstEstimates {
  std::array<Mat4, kNumGates> gates;  ///< G-hat*_k
  Vec4 rho_hat;                       ///< gauge-corrected state estimate
  Vec4 e_hat;                         ///< gauge-corrected effect estimate
  Mat4 spam_outer;                    ///< |rho*>> <<E*|
};

/// gtilde[k](i,j) = p_ijk measured expectations; gtilde[0] is the Gram
/// matrix. Throws NumericalError when the Gram condition number exceeds 1e6.
LgstEstimates lgst_estimate(const std::array<Mat4, kNumGates>& gtilde, const GateSet& gs);

/// sqrt(sum_k ||G-hat*_k - T_k||_F^2) including the SPAM outer-product term.
double fom_lgst(const LgstEstimates& est, const GateSet& gs);

/// sqrt(sum_k ||gtilde_k - ttilde_k||_F^2): gauge invariant by construction
/// since it consumes only measured expectation values.
double fom_gtilde(const std::array<Mat4, kNumGates>& gtilde, const GateSet& gs);

//-------------------------------------------------------------------------
// ORBIT
//-------------------------------------------------------------------------

/// 1 - mean(survivals).
double fom_orbit(std::span<const double> survivals);

//-------------------------------------------------------------------------
// RLGST
//-------------------------------------------------------------------------

/// First-order error-matrix estimates from randomized gate strings.
struct RlgstErrors {
  std::array<Mat4, kNumGates> gate_errors;  ///< e_k
  Vec4 rho_error;                           ///< v_rho = e_rho |rho_T>>
  Vec4 povm_error;                          ///< v_E = (<<E_T| e_E)^T
  std::vector<double> predicted;            ///< fitted first-order predictions
  double residual_rms = 0.0;
};

/// Builds the N x 120 first-order design matrix (7 x 16 gate-error entries
/// plus 4 + 4 SPAM entries) over the ideal targets and solves least squares
/// with the minimum-norm pseudoinverse.
RlgstErrors rlgst_estimate(const std::vector<Circuit>& circuits, std::span<const double> p,
                           const GateSet& gs);

/// sqrt(sum_k ||e_k||_F^2 + ||v_rho||^2 + ||v_E||^2).
double fom_rlgst(const RlgstErrors& errors);

//-------------------------------------------------------------------------
// Randomized benchmarking fit
//-------------------------------------------------------------------------

/// Least-squares fit of survival(m) = A q^m + 0.5 with the offset fixed by
/// the normalization; r = (1 - q)/2 is the average error per Clifford.
struct RbFit {
  double amplitude = 0.0;       ///< A
  double offset = 0.5;          ///< B, fixed
  double decay = 1.0;           ///< q
  double error_per_clifford = 0.0;  ///< r = (1 - q)/2
  double amplitude_std = 0.0;
  double decay_std = 0.0;
  bool converged = true;        ///< false when the fit pinned q at a boundary
};

/// Requires >= 3 distinct lengths. q is constrained to [0, 1]; a boundary
/// solution is clamped and flagged.
RbFit rb_fit(std::span<const int> lengths, std::span<const double> survivals);

//-------------------------------------------------------------------------
// Measurement-driven evaluation
//-------------------------------------------------------------------------

struct FomValue {
  double value = 0.0;
  double std_estimate = 0.0;  ///< NaN when the method defines no internal std
  int n_measurements = 0;
};

/// One full FoM evaluation against the plant: build the method's circuits,
/// run the three-part measurement sequence, and reduce to a scalar.
/// Random circuits are drawn from `circuit_seed` and readout noise from
/// `noise_seed`, so a caller can re-measure a fixed circuit set (same
/// circuit_seed, fresh noise_seed) the way the closed loop does.
FomValue evaluate_fom(const FomSpec& spec, const GateSet& gs, const CliffordTable& table,
                      const EnsembleModel& model, double a_max, SeedSeq circuit_seed,
                      SeedSeq noise_seed);

/// A full RB experiment: mean survival per circuit length plus the fit.
struct RbResult {
  std::vector<int> lengths;
  std::vector<double> survival;
  std::vector<double> survival_std;
  RbFit fit;
};
RbResult run_rb(const GateSet& gs, const CliffordTable& table, const EnsembleModel& model,
                double a_max, std::span<const int> lengths, int n_circuits, SeedSeq seed);

/// Default RB length grid (capped at 18 Cliffords).
std::vector<int> default_rb_lengths();

}  // namespace gsopt
