#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regloss/grid.hpp"

namespace regloss {

enum class ShearProfile { sine, sawtooth };
const char* to_string(ShearProfile p);
ShearProfile shear_profile_from_string(const std::string& s);

// Steady shear u = a g(m x_t + phase) e_axis on the unit torus. The sawtooth
// profile has unit slope, a smoothed jump of width `seam`, and range [-1/2, 1/2].
struct ShearStep {
  int axis = 0;
  int transverse = 1;
  double amplitude = 0.0;
  double phase = 0.0;
  double duration = 1.0;
  ShearProfile profile = ShearProfile::sine;
  int wavenumber = 1;
  double seam = 0.1;

  double profile_value(double xt) const;  // a * g
  double stream_value(double xt) const;   // psi with d psi / d x_t = a * g
  double profile_max() const;             // sup |g|
};

class VelocityPath {
 public:
  virtual ~VelocityPath() = default;
  virtual int dimension() const = 0;
  virtual Point velocity(double t, const Point& x) const = 0;
  virtual double speed_bound() const = 0;
};

enum class FlowDirection { forward, inverse };

// Piecewise-steady shear protocol. Step j is active on [t_j, t_j + duration_j).
// In confined mode each step is the divergence-free field curl(chi psi) with a
// fixed cutoff chi that equals 1 on the central cube of side 1/2 and vanishes
// outside [0.05, 0.95]^d; otherwise it is the plain periodic shear.
class FlowMap : public VelocityPath {
 public:
  FlowMap(int d, std::vector<ShearStep> steps, bool confined, std::uint64_t seed = 0,
          FlowDirection direction = FlowDirection::forward);

  int dimension() const override { return d_; }
  const std::vector<ShearStep>& steps() const { return steps_; }
  bool confined() const { return confined_; }
  std::uint64_t seed() const { return seed_; }
  FlowDirection direction() const { return direction_; }
  double total_time() const { return start_.empty() ? 0.0 : start_.back(); }

  FlowMap inverse() const;
  // Index of the step active at time t (the last step at t = total).
  std::size_t active_step(double t) const;

  Point velocity(double t, const Point& x) const override;
  double speed_bound() const override;

  // Position after running `step` for signed time tau from x.
  Point advance(const ShearStep& step, const Point& x, double tau) const;
  // X(t, .)(x) and its inverse.
  Point push_forward(const Point& x, double t) const;
  Point pull_back(const Point& x, double t) const;

  // Stream function and cutoff of one step (exposed for velocity sampling).
  double cutoff(const Point& x) const;
  Point step_velocity(const ShearStep& step, const Point& x) const;
  double step_stream(const ShearStep& step, const Point& x) const;

  // Box outside which every step is the identity (none for a zero flow).
  std::optional<Box> moving_region() const;

 private:

  int d_;
  std::vector<ShearStep> steps_;
  bool confined_;
  std::uint64_t seed_;
  FlowDirection direction_;
  std::vector<double> start_;  // start_[j] = t_j, start_.back() = total
};

}  // namespace regloss
