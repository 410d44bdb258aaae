#pragma once

#include <cmath>

namespace regloss {

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 1.0 / (1.0 + std::exp(1.0 / t - 1.0 / (1.0 - t)));
}

inline double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = smooth_step(t);
  return s * (1.0 - s) * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
}

// Standard mollifier profile in terms of r^2/R^2, normalized to 1 at the center.
inline double bump_profile(double rho2) {
  if (rho2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - rho2));
}

// Radial cutoff: 1 for r <= inner, 0 for r >= outer.
inline double radial_cutoff(double r, double inner, double outer) {
  return 1.0 - smooth_step((r - inner) / (outer - inner));
}

inline double radial_cutoff_derivative(double r, double inner, double outer) {
  return -smooth_step_derivative((r - inner) / (outer - inner)) / (outer - inner);
}

}  // namespace regloss
