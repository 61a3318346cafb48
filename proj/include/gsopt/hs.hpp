#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

namespace gsopt {

using Mat2c = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4d;
using Mat4c = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4d;
using complexd = std::complex<double>;

//=========================================================================
// Hilbert-Schmidt space primitives for a single qubit.
//
// States and measurement effects are real 4-vectors of coefficients in the
// normalized Pauli basis {I, X, Y, Z}/sqrt(2); channels are real 4x4 Pauli
// transfer matrices acting on those vectors. Basis ordering is fixed as
// (I, X, Y, Z) everywhere, including serialized output.
//=========================================================================

/// The normalized Pauli basis, orthonormal under <<A|B>> = tr(A^dag B).
struct PauliBasis {
  static constexpr int dim = 2;
  /// P_k = sigma_k / sqrt(2), ordered (I, X, Y, Z).
  static const std::array<Mat2c, 4>& elements();
  /// Unnormalized sigma_k, ordered (I, X, Y, Z).
  static const std::array<Mat2c, 4>& sigmas();
};

/// A state |rho>> or effect <<E| as coefficients in PauliBasis.
struct HSVector {
  Vec4 coords = Vec4::Zero();
};

/// 4x4 real Pauli transfer matrix of a channel. Row 0 is (1,0,0,0) for
/// trace-preserving maps; unitary-derived PTMs have an orthogonal 3x3 block.
struct Ptm {
  Mat4 m = Mat4::Identity();

  Ptm() = default;
  explicit Ptm(const Mat4& mat) : m(mat) {}
  /// Channel composition: (a * b) applies b first, then a.
  Ptm operator*(const Ptm& rhs) const { return Ptm(m * rhs.m); }
};

/// Process matrix over unnormalized Paulis: Lambda(rho) = sum_mn chi_mn sigma_m rho sigma_n.
struct ChiMatrix {
  Mat4c m = Mat4c::Zero();
};

/// |rho>> with coords[k] = tr(P_k rho). Requires Hermitian, unit-trace input.
HSVector vectorize(const Mat2c& rho);

/// Inverse of vectorize.
Mat2c devectorize(const HSVector& v);

/// PTM of the unitary channel rho -> U rho U^dag. Requires U^dag U = I to 1e-10.
Ptm unitary_to_ptm(const Mat2c& u);

/// <<E| G_n ... G_1 |rho>>; gates listed in time order (first gate acts first).
/// Raw value; callers clamp to [0,1] only at reporting boundaries.
double expectation(const HSVector& effect, const std::vector<Ptm>& gates,
                   const HSVector& state);

/// Convert a PTM to the chi representation by solving the fixed 16x16 system
/// R_ab = 1/2 sum_mn chi_mn tr(sigma_a sigma_m sigma_b sigma_n).
ChiMatrix ptm_to_chi(const Ptm& r);

/// chi of a unitary channel read off from the Pauli decomposition of U.
ChiMatrix chi_from_unitary(const Mat2c& u);

/// exp(-i angle (n . sigma) / 2) for the unit axis n = (nx, ny, nz).
Mat2c rotation_unitary(double angle, double nx, double ny, double nz);

/// |0><0| as a state / effect vector: (1, 0, 0, 1)/sqrt(2).
HSVector ground_state();

}  // namespace gsopt
