#include "gsopt/pulse.hpp"

#include <cmath>
#include <numbers>

#include "gsopt/errors.hpp"

namespace gsopt {

double PulseShape::max_envelope() const {
  double peak = 0.0;
  for (std::size_t k = 0; k < ax.size(); ++k)
    peak = std::max(peak, std::hypot(ax[k], ay[k]));
  return peak;
}

PulseShape PulseShape::scaled(double factor) const {
  PulseShape out = *this;
  for (auto& a : out.ax) a *= factor;
  for (auto& a : out.ay) a *= factor;
  return out;
}

PulseShape rectangular(double amplitude, double duration, double dt) {
  if (dt <= 0.0) throw ValidationError("rectangular: dt must be positive");
  if (duration < dt) throw ValidationError("rectangular: duration shorter than one sample");
  const int n = static_cast<int>(std::lround(duration / dt));
  PulseShape p;
  p.dt = dt;
  p.ax.assign(n, amplitude);
  p.ay.assign(n, 0.0);
  return p;
}

DcrabBasis sample_basis(Rng& rng, double total_duration, int vectors_per_pulse,
                        int max_oscillations) {
  if (total_duration <= 0.0)
    throw ValidationError("sample_basis: total_duration must be positive");
  const double w_max = 2.0 * std::numbers::pi * max_oscillations / total_duration;
  DcrabBasis basis;
  basis.freq_x.reserve(vectors_per_pulse);
  basis.freq_y.reserve(vectors_per_pulse);
  for (int i = 0; i < vectors_per_pulse; ++i) basis.freq_x.push_back(rng.uniform(0.0, w_max));
  for (int i = 0; i < vectors_per_pulse; ++i) basis.freq_y.push_back(rng.uniform(0.0, w_max));
  return basis;
}

PulseShape expand(const PulseShape& base, const DcrabBasis& basis,
                  std::span<const double> coeffs) {
  if (static_cast<int>(coeffs.size()) != basis.coeff_count())
    throw ValidationError("expand: coefficient count does not match basis");
  PulseShape out = base;
  const int n = static_cast<int>(base.ax.size());
  std::size_t c = 0;
  for (double w : basis.freq_x) {
    const double c_cos = coeffs[c++];
    const double c_sin = coeffs[c++];
    for (int k = 0; k < n; ++k) {
      const double t = sample_time(k, base.dt);
      out.ax[k] += c_cos * std::cos(w * t) + c_sin * std::sin(w * t);
    }
  }
  for (double w : basis.freq_y) {
    const double c_cos = coeffs[c++];
    const double c_sin = coeffs[c++];
    for (int k = 0; k < n; ++k) {
      const double t = sample_time(k, base.dt);
      out.ay[k] += c_cos * std::cos(w * t) + c_sin * std::sin(w * t);
    }
  }
  return out;
}

PulseShape clip(const PulseShape& pulse, double a_max) {
  if (a_max <= 0.0) throw ValidationError("clip: a_max must be positive");
  PulseShape out = pulse;
  for (std::size_t k = 0; k < out.ax.size(); ++k) {
    // re-check after rescaling: the product can land one ulp above the bound,
    // and the output must be an exact fixed point of clip
    double mag = std::hypot(out.ax[k], out.ay[k]);
    while (mag > a_max) {
      double scale = a_max / mag;
      if (scale >= 1.0) scale = std::nextafter(1.0, 0.0);
      out.ax[k] *= scale;
      out.ay[k] *= scale;
      mag = std::hypot(out.ax[k], out.ay[k]);
    }
  }
  return out;
}

double fluence(const PulseShape& pulse) {
  double sum = 0.0;
  for (std::size_t k = 0; k < pulse.ax.size(); ++k)
    sum += pulse.ax[k] * pulse.ax[k] + pulse.ay[k] * pulse.ay[k];
  return sum * pulse.dt;
}

}  // namespace gsopt
