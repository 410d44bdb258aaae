#include "regloss/shear.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "regloss/smooth.hpp"

namespace regloss {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCoreHalf = 0.25;
constexpr double kCutHalf = 0.45;

// J(u) = int_0^u S(v) dv for the smooth step S.
double step_integral(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 0.5 + (u - 1.0);
  return boost::math::quadrature::gauss<double, 30>::integrate(
      [](double v) { return smooth_step(v); }, 0.0, u);
}

// Centered periodic coordinate in [-1/2, 1/2).
double centered(double y) { return y - std::floor(y + 0.5); }

double sawtooth(double y, double seam) {
  const double c = centered(y);
  return c + 0.5 - smooth_step((c + 0.5 * seam) / seam);
}

// Even antiderivative of the sawtooth, zero at the jump.
double sawtooth_antiderivative_raw(double y, double seam) {
  const double c = std::abs(centered(y));
  return 0.5 * c * c + 0.5 * c - seam * (step_integral((c + 0.5 * seam) / seam) - step_integral(0.5));
}

// Period mean of the raw antiderivative, cached per seam width.
double sawtooth_antiderivative_mean(double seam) {
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(seam);
  if (it != cache.end()) return it->second;
  const double m = 2.0 * boost::math::quadrature::gauss<double, 30>::integrate(
                             [&](double y) { return sawtooth_antiderivative_raw(y, seam); }, 0.0,
                             0.5 * seam) +
                   2.0 * boost::math::quadrature::gauss<double, 30>::integrate(
                             [&](double y) { return sawtooth_antiderivative_raw(y, seam); },
                             0.5 * seam, 0.5);
  cache.emplace(seam, m);
  return m;
}

double eta(double y) { return radial_cutoff(std::abs(y), kCoreHalf, kCutHalf); }

double eta_prime(double y) {
  const double r = std::abs(y);
  const double dv = radial_cutoff_derivative(r, kCoreHalf, kCutHalf);
  return y < 0 ? -dv : dv;
}

bool in_core(double y) { return std::abs(y - 0.5) <= kCoreHalf; }

using State = std::array<double, kMaxDim>;

}  // namespace

const char* to_string(ShearProfile p) { return p == ShearProfile::sine ? "sine" : "sawtooth"; }

ShearProfile shear_profile_from_string(const std::string& s) {
  if (s == "sine") return ShearProfile::sine;
  if (s == "sawtooth") return ShearProfile::sawtooth;
  throw Error(ErrorKind::schema, "unknown shear profile '" + s + "'");
}

double ShearStep::profile_value(double xt) const {
  if (amplitude == 0.0) return 0.0;
  if (profile == ShearProfile::sine)
    return amplitude * std::sin(kTwoPi * wavenumber * xt + phase);
  return amplitude * sawtooth(wavenumber * xt + phase / kTwoPi, seam);
}

double ShearStep::stream_value(double xt) const {
  if (amplitude == 0.0) return 0.0;
  if (profile == ShearProfile::sine)
    return -amplitude * std::cos(kTwoPi * wavenumber * xt + phase) / (kTwoPi * wavenumber);
  const double y = wavenumber * xt + phase / kTwoPi;
  return amplitude / wavenumber *
         (sawtooth_antiderivative_raw(y, seam) - sawtooth_antiderivative_mean(seam));
}

double ShearStep::profile_max() const { return profile == ShearProfile::sine ? 1.0 : 0.5; }

FlowMap::FlowMap(int d, std::vector<ShearStep> steps, bool confined, std::uint64_t seed,
                 FlowDirection direction)
    : d_(d), steps_(std::move(steps)), confined_(confined), seed_(seed), direction_(direction) {
  require(d >= 2 && d <= kMaxDim, ErrorKind::dimension, "shear flows need 2 <= d <= 6");
  start_.reserve(steps_.size() + 1);
  start_.push_back(0.0);
  for (const auto& s : steps_) {
    require(s.axis >= 0 && s.axis < d && s.transverse >= 0 && s.transverse < d &&
                s.axis != s.transverse,
            ErrorKind::invalid_parameter, "shear axes must be distinct and inside [0, d)");
    require(s.duration > 0.0, ErrorKind::invalid_parameter, "step duration must be positive");
    require(s.wavenumber >= 1, ErrorKind::invalid_parameter, "wavenumber must be >= 1");
    require(s.seam > 0.0 && s.seam < 0.5, ErrorKind::invalid_parameter,
            "sawtooth seam width must lie in (0, 1/2)");
    start_.push_back(start_.back() + s.duration);
  }
}

FlowMap FlowMap::inverse() const {
  std::vector<ShearStep> rev(steps_.rbegin(), steps_.rend());
  for (auto& s : rev) s.amplitude = -s.amplitude;
  const auto dir =
      direction_ == FlowDirection::forward ? FlowDirection::inverse : FlowDirection::forward;
  return FlowMap(d_, std::move(rev), confined_, seed_, dir);
}

std::size_t FlowMap::active_step(double t) const {
  require(!steps_.empty(), ErrorKind::out_of_range, "flow has no steps");
  auto it = std::upper_bound(start_.begin(), start_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - start_.begin());
  k = k == 0 ? 0 : k - 1;
  return std::min(k, steps_.size() - 1);
}

double FlowMap::cutoff(const Point& x) const {
  if (!confined_) return 1.0;
  double c = 1.0;
  for (int i = 0; i < d_; ++i) c *= eta(x[i] - 0.5);
  return c;
}

double FlowMap::step_stream(const ShearStep& step, const Point& x) const {
  return cutoff(x) * step.stream_value(x[step.transverse]);
}

Point FlowMap::step_velocity(const ShearStep& step, const Point& x) const {
  Point u{};
  if (step.amplitude == 0.0) return u;
  const double g = step.profile_value(x[step.transverse]);
  if (!confined_) {
    u[step.axis] = g;
    return u;
  }
  double e[kMaxDim];
  double chi = 1.0;
  for (int i = 0; i < d_; ++i) {
    e[i] = eta(x[i] - 0.5);
    chi *= e[i];
  }
  for (int i = 0; i < d_; ++i)
    if (std::abs(x[i] - 0.5) >= kCutHalf) return u;
  auto dchi = [&](int j) {
    double c = eta_prime(x[j] - 0.5);
    for (int i = 0; i < d_; ++i)
      if (i != j) c *= e[i];
    return c;
  };
  const double psi = step.stream_value(x[step.transverse]);
  u[step.axis] = chi * g + psi * dchi(step.transverse);
  u[step.transverse] = -psi * dchi(step.axis);
  return u;
}

Point FlowMap::advance(const ShearStep& step, const Point& x, double tau) const {
  if (tau == 0.0 || step.amplitude == 0.0) return x;
  Point y = x;
  if (!confined_) {
    y[step.axis] = wrap(x[step.axis] + tau * step.profile_value(x[step.transverse]), 1.0);
    return y;
  }
  for (int i = 0; i < d_; ++i)
    if (std::abs(x[i] - 0.5) >= kCutHalf) return y;  // chi and its gradient vanish
  bool core = true;
  for (int i = 0; i < d_ && core; ++i)
    if (i != step.axis) core = in_core(x[i]);
  if (core) {
    const double end = x[step.axis] + tau * step.profile_value(x[step.transverse]);
    if (in_core(x[step.axis]) && in_core(end)) {
      y[step.axis] = end;
      return y;
    }
  }
  namespace odeint = boost::numeric::odeint;
  const double sign = tau > 0 ? 1.0 : -1.0;
  auto rhs = [&](const State& s, State& ds, double) {
    const Point u = step_velocity(step, s);
    for (int i = 0; i < kMaxDim; ++i) ds[i] = sign * u[i];
  };
  State s = x;
  auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, rhs, s, 0.0, std::abs(tau), std::abs(tau) / 16.0);
  return s;
}

Point FlowMap::push_forward(const Point& x, double t) const {
  require(t >= 0.0 && t <= total_time() * (1 + 1e-12), ErrorKind::out_of_range,
          "time outside the protocol span");
  if (t == 0.0 || steps_.empty()) return x;
  const std::size_t k = active_step(t);
  Point y = x;
  for (std::size_t j = 0; j < k; ++j) y = advance(steps_[j], y, steps_[j].duration);
  return advance(steps_[k], y, std::min(t, total_time()) - start_[k]);
}

Point FlowMap::pull_back(const Point& x, double t) const {
  require(t >= 0.0 && t <= total_time() * (1 + 1e-12), ErrorKind::out_of_range,
          "time outside the protocol span");
  if (t == 0.0 || steps_.empty()) return x;
  const std::size_t k = active_step(t);
  Point y = advance(steps_[k], x, -(std::min(t, total_time()) - start_[k]));
  for (std::size_t j = k; j-- > 0;) y = advance(steps_[j], y, -steps_[j].duration);
  return y;
}

Point FlowMap::velocity(double t, const Point& x) const {
  if (steps_.empty()) return Point{};
  return step_velocity(steps_[active_step(t)], x);
}

double FlowMap::speed_bound() const {
  double m = 0.0;
  for (const auto& s : steps_) {
    const double a = std::abs(s.amplitude);
    double v = a * s.profile_max();
    if (confined_) {
      const double psi = s.profile == ShearProfile::sine ? a / (kTwoPi * s.wavenumber)
                                                         : a / (4.0 * s.wavenumber);
      v += 2.0 * psi * 2.0 / (kCutHalf - kCoreHalf);
    }
    m = std::max(m, v);
  }
  return m;
}

std::optional<Box> FlowMap::moving_region() const {
  bool moving = false;
  for (const auto& s : steps_) moving |= s.amplitude != 0.0;
  if (!moving) return std::nullopt;
  Box b;
  b.d = d_;
  for (int i = 0; i < d_; ++i) {
    b.lo[i] = confined_ ? 0.5 - kCutHalf : 0.0;
    b.hi[i] = confined_ ? 0.5 + kCutHalf : 1.0;
  }
  return b;
}

}  // namespace regloss
