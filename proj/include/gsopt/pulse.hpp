#pragma once

#include <span>
#include <vector>

#include "gsopt/rng.hpp"

namespace gsopt {

//=========================================================================
// Drive-envelope representation and the randomized-basis expansion used by
// the closed-loop optimizer. Amplitudes are in rad/s, times in seconds, and
// samples are piecewise constant over [k*dt, (k+1)*dt) with the analytic
// basis functions evaluated at sample midpoints.
//=========================================================================

/// Sampled complex drive envelope (x and y quadratures).
struct PulseShape {
  double dt = 0.0;              ///< seconds per sample
  std::vector<double> ax;       ///< rad/s
  std::vector<double> ay;       ///< rad/s

  double duration() const { return dt * static_cast<double>(ax.size()); }
  /// max over samples of sqrt(ax^2 + ay^2)
  double max_envelope() const;
  PulseShape scaled(double factor) const;
};

/// Midpoint time of sample k.
inline double sample_time(int k, double dt) { return (k + 0.5) * dt; }

/// Randomly drawn truncated-frequency basis: per quadrature, each frequency
/// contributes a cosine and a sine function on the pulse grid.
struct DcrabBasis {
  std::vector<double> freq_x;   ///< angular frequencies, x quadrature
  std::vector<double> freq_y;   ///< angular frequencies, y quadrature

  /// Total number of expansion coefficients: 2 functions per frequency per
  /// quadrature, x block first, then y.
  int coeff_count() const {
    return 2 * static_cast<int>(freq_x.size() + freq_y.size());
  }
};

/// Constant-amplitude x-quadrature pulse. Requires duration >= dt.
PulseShape rectangular(double amplitude, double duration, double dt);

/// Draw vectors_per_pulse random frequencies per quadrature, uniform on
/// [0, 2*pi*max_oscillations / total_duration].
DcrabBasis sample_basis(Rng& rng, double total_duration, int vectors_per_pulse = 2,
                        int max_oscillations = 4);

/// base + sum_i c_i basis_i(t) on the same grid. Coefficient layout:
/// [x: cos f1, sin f1, cos f2, sin f2, ...,  y: cos f1, sin f1, ...].
PulseShape expand(const PulseShape& base, const DcrabBasis& basis,
                  std::span<const double> coeffs);

/// Radial clamp: samples over the bound are rescaled to magnitude a_max with
/// the drive phase preserved.
PulseShape clip(const PulseShape& pulse, double a_max);

/// Integrated squared envelope, rectangle rule: sum (ax^2 + ay^2) dt  [rad^2/s].
double fluence(const PulseShape& pulse);

}  // namespace gsopt
