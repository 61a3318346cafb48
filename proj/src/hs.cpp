#include "gsopt/hs.hpp"

#include <cmath>
#include <numbers>

#include "gsopt/errors.hpp"

namespace gsopt {

namespace {

constexpr complexd kI{0.0, 1.0};
const double kSqrt2 = std::numbers::sqrt2;

std::array<Mat2c, 4> make_sigmas() {
  std::array<Mat2c, 4> s;
  s[0] << 1, 0, 0, 1;
  s[1] << 0, 1, 1, 0;
  s[2] << 0, -kI, kI, 0;
  s[3] << 1, 0, 0, -1;
  return s;
}

std::array<Mat2c, 4> make_elements() {
  auto s = make_sigmas();
  for (auto& m : s) m /= kSqrt2;
  return s;
}

// 16x16 LU factorization of the PTM -> chi map, built once.
struct ChiSolver {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;

  ChiSolver() {
    const auto& sig = PauliBasis::sigmas();
    Eigen::MatrixXcd s(16, 16);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n)
            s(a * 4 + b, m * 4 + n) =
                0.5 * (sig[a] * sig[m] * sig[b] * sig[n]).trace();
    lu.compute(s);
  }
};

const ChiSolver& chi_solver() {
  static const ChiSolver solver;
  return solver;
}

}  // namespace

const std::array<Mat2c, 4>& PauliBasis::sigmas() {
  static const auto s = make_sigmas();
  return s;
}

const std::array<Mat2c, 4>& PauliBasis::elements() {
  static const auto p = make_elements();
  return p;
}

HSVector vectorize(const Mat2c& rho) {
  constexpr double tol = 1e-10;
  if ((rho - rho.adjoint()).norm() > tol)
    throw ValidationError("vectorize: density matrix is not Hermitian");
  if (std::abs(rho.trace() - complexd{1.0, 0.0}) > tol)
    throw ValidationError("vectorize: density matrix does not have unit trace");
  HSVector v;
  const auto& p = PauliBasis::elements();
  for (int k = 0; k < 4; ++k) v.coords[k] = (p[k].adjoint() * rho).trace().real();
  return v;
}

Mat2c devectorize(const HSVector& v) {
  Mat2c rho = Mat2c::Zero();
  const auto& p = PauliBasis::elements();
  for (int k = 0; k < 4; ++k) rho += v.coords[k] * p[k];
  return rho;
}

Ptm unitary_to_ptm(const Mat2c& u) {
  if ((u.adjoint() * u - Mat2c::Identity()).norm() > 1e-10)
    throw ValidationError("unitary_to_ptm: matrix is not unitary");
  Mat4 r;
  const auto& p = PauliBasis::elements();
  for (int k = 0; k < 4; ++k) {
    const Mat2c mapped = u * p[k] * u.adjoint();
    for (int j = 0; j < 4; ++j) r(j, k) = (p[j].adjoint() * mapped).trace().real();
  }
  return Ptm(r);
}

double expectation(const HSVector& effect, const std::vector<Ptm>& gates,
                   const HSVector& state) {
  Vec4 v = state.coords;
  for (const auto& g : gates) v = g.m * v;
  return effect.coords.dot(v);
}

ChiMatrix ptm_to_chi(const Ptm& r) {
  Eigen::VectorXcd rhs(16);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) rhs(a * 4 + b) = r.m(a, b);
  const Eigen::VectorXcd x = chi_solver().lu.solve(rhs);
  ChiMatrix chi;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) chi.m(m, n) = x(m * 4 + n);
  return chi;
}

ChiMatrix chi_from_unitary(const Mat2c& u) {
  if ((u.adjoint() * u - Mat2c::Identity()).norm() > 1e-10)
    throw ValidationError("chi_from_unitary: matrix is not unitary");
  const auto& sig = PauliBasis::sigmas();
  Eigen::Vector4cd c;
  for (int m = 0; m < 4; ++m) c(m) = 0.5 * (sig[m] * u).trace();
  ChiMatrix chi;
  chi.m = c * c.adjoint();
  return chi;
}

Mat2c rotation_unitary(double angle, double nx, double ny, double nz) {
  const double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
  if (norm < 1e-300) {
    if (angle == 0.0) return Mat2c::Identity();
    throw ValidationError("rotation_unitary: zero rotation axis");
  }
  const auto& sig = PauliBasis::sigmas();
  const Mat2c n_dot_sigma = (nx * sig[1] + ny * sig[2] + nz * sig[3]) / norm;
  return std::cos(angle / 2.0) * Mat2c::Identity() -
         kI * std::sin(angle / 2.0) * n_dot_sigma;
}

HSVector ground_state() {
  HSVector v;
  v.coords << 1.0 / kSqrt2, 0.0, 0.0, 1.0 / kSqrt2;
  return v;
}

}  // namespace gsopt
