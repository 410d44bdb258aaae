#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "regloss/field.hpp"
#include "regloss/shear.hpp"
#include "regloss/sobolev.hpp"

namespace regloss {

struct ProtocolOptions {
  int d = 2;
  ShearProfile profile = ShearProfile::sine;
  double seam = 0.1;
  bool confined = false;
  // When > 0, every `refine_every` steps the wavenumber doubles and the
  // amplitude halves: Lipschitz bound fixed, higher norms grow exponentially.
  int refine_every = 0;
};

// Protocol used by the mixing experiments: sawtooth shears with displacement
// 0.7 per step, step duration 0.05.
struct MixingDefaults {
  static constexpr std::uint64_t seed = 1;
  static constexpr double step_duration = 0.05;
  static constexpr double amplitude = 14.0;
  static constexpr int steps = 20;
  static constexpr double seam = 0.1;
  static constexpr double datum_radius = 0.125;
};
ProtocolOptions mixing_protocol_options(int d = 2);

FlowMap build_mixing_protocol(std::uint64_t seed, double total_time, double step_duration,
                              double amplitude, const ProtocolOptions& opts = {});

// rho(t, x) = rho0(X(t)^{-1} x), sampled through a quintic spline of rho0.
// rho0 must live on the unit torus.
ScalarField exact_solution_at(const ScalarField& rho0, const FlowMap& flow, double t);

// Backward RK4 characteristics plus quintic spline interpolation, starting at t0.
ScalarField advect_semi_lagrangian(const ScalarField& rho0, const VelocityPath& path, double dt,
                                   int steps, double t0 = 0.0);

// Velocity of the active step at time t sampled on a unit-torus grid. Confined
// flows are built as the spectral perpendicular gradient of the sampled
// stream function, so the sampled field is discretely divergence free.
VectorField sample_velocity(const FlowMap& flow, double t, const Grid& grid);

std::vector<NormValue> velocity_norm_series(const FlowMap& flow, double r, double p,
                                            const std::vector<double>& sample_times,
                                            const Grid& grid);

struct RateEstimate {
  double rate = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 1.0;
  double t_min = 0.0;
  double t_max = 0.0;
};

RateEstimate fit_exponential_rate(const std::vector<double>& times,
                                  const std::vector<double>& values);

double gronwall_lower_bound(double l2, double neg_norm);

struct NormSample {
  double t;
  double s;
  double value;
};

// Multiplier norms of rho(t) for each order; negative orders are taken of the
// grid-mean-free state (the exact pullback has zero mean).
std::vector<NormSample> mixing_norm_series(const FlowMap& flow, const ScalarField& datum,
                                           const std::vector<double>& times,
                                           const std::vector<double>& orders);

struct MixerConstants {
  double b = 0.0;
  double c = 0.0;
  double C0_hat = 0.0;
  std::map<double, double> B_r;
  std::map<double, double> C_hat_s;
  std::map<double, double> C_s;
  RateEstimate mixing_fit;    // fit of the negative-order norm used for c
  RateEstimate velocity_fit;  // fit of the r-norm used for b (refinement mode)
  bool b_fitted = false;
  double window_min = 0.0;
  double window_max = 0.0;
  std::uint64_t seed = 0;

  double C_s_at(double s) const;
};

struct ConstantsRequest {
  std::vector<double> times;          // sample times (step boundaries)
  std::size_t skip = 2;               // samples dropped before the fitted window
  double fit_order = 1.0;             // c from the H^{-fit_order} decay
  std::vector<double> s_orders{0.5};  // orders for C_hat_s, C_s
  std::vector<double> r_orders{1.0, 2.0};
  double p = 2.0;
  int velocity_M = 128;
};

MixerConstants estimate_mixer_constants(const FlowMap& flow, const ScalarField& datum,
                                        const ConstantsRequest& req);

}  // namespace regloss
