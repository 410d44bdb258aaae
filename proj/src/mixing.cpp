#include "regloss/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "regloss/fft.hpp"
#include "regloss/parallel.hpp"
#include "regloss/spline.hpp"

namespace regloss {
namespace {

void require_unit_torus(const Grid& g) {
  bool ok = g.L() == 1.0;
  for (int i = 0; i < g.d(); ++i) ok = ok && g.origin()[i] == 0.0;
  require(ok, ErrorKind::invalid_geometry, "transport expects data on the unit torus");
}

ScalarField remove_mean(const ScalarField& f) {
  std::vector<double> v(f.values());
  const double m = f.mean();
  for (double& x : v) x -= m;
  return ScalarField(f.grid(), std::move(v));
}

}  // namespace

ProtocolOptions mixing_protocol_options(int d) {
  ProtocolOptions o;
  o.d = d;
  o.profile = ShearProfile::sawtooth;
  o.seam = MixingDefaults::seam;
  return o;
}

FlowMap build_mixing_protocol(std::uint64_t seed, double total_time, double step_duration,
                              double amplitude, const ProtocolOptions& opts) {
  require(step_duration > 0.0 && std::isfinite(step_duration), ErrorKind::invalid_parameter,
          "step duration must be positive");
  require(total_time > 0.0 && std::isfinite(total_time), ErrorKind::invalid_parameter,
          "total time must be positive");
  require(opts.refine_every >= 0, ErrorKind::invalid_parameter, "refine_every must be >= 0");
  const auto count = static_cast<std::size_t>(std::ceil(total_time / step_duration - 1e-9));
  std::mt19937_64 rng(seed);
  std::vector<ShearStep> steps;
  steps.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    ShearStep s;
    s.axis = static_cast<int>(j % opts.d);
    s.transverse = (s.axis + 1) % opts.d;
    // 53 random bits mapped to [0, 1) by hand: bit-identical across platforms.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    s.phase = 2.0 * std::numbers::pi * u;
    s.duration = j + 1 < count ? step_duration : total_time - step_duration * (count - 1);
    s.profile = opts.profile;
    s.seam = opts.seam;
    s.amplitude = amplitude;
    if (opts.refine_every > 0) {
      const int level = static_cast<int>(j / opts.refine_every);
      s.wavenumber = 1 << level;
      s.amplitude = amplitude / s.wavenumber;
    }
    steps.push_back(s);
  }
  return FlowMap(opts.d, std::move(steps), opts.confined, seed);
}

ScalarField exact_solution_at(const ScalarField& rho0, const FlowMap& flow, double t) {
  require_unit_torus(rho0.grid());
  require(rho0.grid().d() == flow.dimension(), ErrorKind::dimension,
          "datum and flow dimensions differ");
  require(t >= 0.0 && t <= flow.total_time() * (1 + 1e-12), ErrorKind::out_of_range,
          "time outside the protocol span");
  if (t == 0.0) return rho0;
  const Grid& g = rho0.grid();
  const PeriodicSpline spline(rho0);
  std::vector<double> out(g.size());
  parallel_for(g.size(), [&](std::size_t n) {
    const Point x = g.node(n);
    const Point y = flow.pull_back(x, t);
    out[n] = (y == x) ? rho0[n] : spline(y);
  });
  const auto moving = flow.moving_region();
  Box sup = rho0.support();
  if (moving) sup = moving->is_whole(g) ? Box::whole(g) : sup.hull(*moving);
  if (!moving || !sup.is_whole(g)) {
    // Foot points outside the datum support evaluate to exact zeros; tiny
    // spline ringing inside the hull is left untouched.
    return ScalarField(g, std::move(out), sup);
  }
  return ScalarField(g, std::move(out));
}

ScalarField advect_semi_lagrangian(const ScalarField& rho0, const VelocityPath& path, double dt,
                                   int steps, double t0) {
  require(dt > 0.0 && steps >= 0, ErrorKind::invalid_parameter,
          "time step must be positive and step count nonnegative");
  require(rho0.grid().d() == path.dimension(), ErrorKind::dimension,
          "datum and velocity dimensions differ");
  const Grid& g = rho0.grid();
  const double cfl = path.speed_bound() * dt / g.h();
  require(cfl <= 1.0, ErrorKind::configuration,
          "CFL number " + std::to_string(cfl) + " exceeds 1");
  const int d = g.d();
  // Stage times are nudged inside the substep so piecewise-steady paths resolve
  // to the step that is active on the whole substep.
  constexpr double eps = 1e-9;
  ScalarField cur = rho0;
  for (int k = 0; k < steps; ++k) {
    const double ta = t0 + k * dt;
    const double t_hi = ta + dt * (1 - eps), t_mid = ta + 0.5 * dt, t_lo = ta + dt * eps;
    const PeriodicSpline spline(cur);
    std::vector<double> next(g.size());
    parallel_for(g.size(), [&](std::size_t n) {
      const Point x = g.node(n);
      auto shift = [&](const Point& base, const Point& v, double c) {
        Point y = base;
        for (int i = 0; i < d; ++i) y[i] -= c * v[i];
        return y;
      };
      const Point k1 = path.velocity(t_hi, x);
      const Point k2 = path.velocity(t_mid, shift(x, k1, 0.5 * dt));
      const Point k3 = path.velocity(t_mid, shift(x, k2, 0.5 * dt));
      const Point k4 = path.velocity(t_lo, shift(x, k3, dt));
      Point y = x;
      for (int i = 0; i < d; ++i) y[i] -= dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      next[n] = (y == x) ? cur[n] : spline(y);
    });
    cur = ScalarField(g, std::move(next));
  }
  return cur;
}

VectorField sample_velocity(const FlowMap& flow, double t, const Grid& grid) {
  require_unit_torus(grid);
  require(grid.d() == flow.dimension(), ErrorKind::dimension, "grid and flow dimensions differ");
  const int d = grid.d();
  std::vector<std::vector<double>> comp(d, std::vector<double>(grid.size(), 0.0));
  if (flow.steps().empty()) return VectorField(grid, std::move(comp), true);
  const ShearStep& s = flow.steps()[flow.active_step(t)];
  if (!flow.confined()) {
    for (std::size_t n = 0; n < grid.size(); ++n)
      comp[s.axis][n] = s.profile_value(grid.node(n)[s.transverse]);
    return VectorField(grid, std::move(comp), true);
  }
  std::vector<double> psi(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) psi[n] = flow.step_stream(s, grid.node(n));
  comp[s.axis] = spectral::derivative(grid, psi, s.transverse);
  auto ut = spectral::derivative(grid, psi, s.axis);
  for (double& v : ut) v = -v;
  comp[s.transverse] = std::move(ut);
  return VectorField(grid, std::move(comp), true);
}

std::vector<NormValue> velocity_norm_series(const FlowMap& flow, double r, double p,
                                            const std::vector<double>& sample_times,
                                            const Grid& grid) {
  std::vector<NormValue> out;
  out.reserve(sample_times.size());
  for (double t : sample_times) out.push_back(wsp_norm(sample_velocity(flow, t, grid), r, p));
  return out;
}

RateEstimate fit_exponential_rate(const std::vector<double>& times,
                                  const std::vector<double>& values) {
  require(times.size() == values.size(), ErrorKind::invalid_parameter,
          "times and values differ in length");
  require(times.size() >= 3, ErrorKind::insufficient_data, "rate fit needs at least 3 samples");
  const std::size_t n = times.size();
  long double mt = 0, my = 0;
  std::vector<long double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(values[i] > 0.0 && std::isfinite(values[i]), ErrorKind::domain,
            "rate fit needs positive finite values");
    y[i] = std::log(static_cast<long double>(values[i]));
    mt += times[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  long double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double dt = times[i] - mt, dy = y[i] - my;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  require(stt > 0, ErrorKind::insufficient_data, "rate fit needs distinct sample times");
  RateEstimate r;
  const long double slope = sty / stt;
  r.rate = static_cast<double>(slope);
  r.log_prefactor = static_cast<double>(my - slope * mt);
  // Logs of equal values can differ in the last bit; treat rounding-level
  // spread as a flat series.
  const long double flat = n * std::pow(64 * std::numeric_limits<double>::epsilon() *
                                            (std::abs(my) + 1.0L), 2);
  if (syy <= flat) {
    r.r_squared = 1.0;
  } else {
    long double res = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long double e = y[i] - (my + slope * (times[i] - mt));
      res += e * e;
    }
    r.r_squared = static_cast<double>(std::clamp<long double>(1.0L - res / syy, 0.0L, 1.0L));
  }
  r.t_min = *std::min_element(times.begin(), times.end());
  r.t_max = *std::max_element(times.begin(), times.end());
  return r;
}

double gronwall_lower_bound(double l2, double neg_norm) {
  require(neg_norm > 0.0, ErrorKind::domain, "negative-order norm must be positive");
  return l2 * l2 / neg_norm;
}

std::vector<NormSample> mixing_norm_series(const FlowMap& flow, const ScalarField& datum,
                                           const std::vector<double>& times,
                                           const std::vector<double>& orders) {
  std::vector<NormSample> out;
  for (double t : times) {
    const ScalarField rho = exact_solution_at(datum, flow, t);
    const ScalarField centered = remove_mean(rho);
    for (double s : orders) {
      const double v = s < 0.0 ? hs_norm(centered, s).value : hs_norm(rho, s).value;
      out.push_back({t, s, v});
    }
  }
  return out;
}

double MixerConstants::C_s_at(double s) const {
  auto it = C_s.find(s);
  require(it != C_s.end(), ErrorKind::invalid_parameter,
          "no measured prefactor for order " + std::to_string(s));
  return it->second;
}

MixerConstants estimate_mixer_constants(const FlowMap& flow, const ScalarField& datum,
                                        const ConstantsRequest& req) {
  require(req.times.size() >= req.skip + 3, ErrorKind::insufficient_data,
          "constant estimation needs at least 3 samples in the fitted window");
  MixerConstants k;
  k.seed = flow.seed();
  k.C0_hat = datum.l2_norm();
  std::vector<double> orders{-req.fit_order};
  for (double s : req.s_orders)
    if (s != req.fit_order) orders.push_back(-s);
  const auto series = mixing_norm_series(flow, datum, req.times, orders);
  auto norm_at = [&](std::size_t i, double s) {
    for (const auto& r : series)
      if (r.t == req.times[i] && r.s == s) return r.value;
    throw Error(ErrorKind::invalid_parameter, "missing norm sample");
  };
  std::vector<double> wt, wv;
  for (std::size_t i = req.skip; i < req.times.size(); ++i) {
    wt.push_back(req.times[i]);
    wv.push_back(norm_at(i, -req.fit_order));
  }
  k.mixing_fit = fit_exponential_rate(wt, wv);
  k.c = -k.mixing_fit.rate / req.fit_order + 0.0;  // no -0
  k.window_min = wt.front();
  k.window_max = wt.back();
  for (double s : req.s_orders) {
    double chat = 0.0;
    for (std::size_t i = req.skip; i < req.times.size(); ++i)
      chat = std::max(chat, norm_at(i, -s) * std::exp(s * k.c * req.times[i]));
    k.C_hat_s[s] = chat;
    k.C_s[s] = k.C0_hat * k.C0_hat / chat;
  }

  const Grid vg(flow.dimension(), req.velocity_M);
  std::vector<double> vt;
  for (std::size_t i = 0; i + 1 < req.times.size(); ++i) vt.push_back(req.times[i]);
  std::map<double, std::vector<NormValue>> vel;
  for (double r : req.r_orders) vel[r] = velocity_norm_series(flow, r, req.p, vt, vg);
  // b: growth of the highest requested order when it is clearly exponential,
  // else b = c (fixed-amplitude protocols keep every norm bounded).
  const double rmax = req.r_orders.empty() ? 1.0 : *std::max_element(req.r_orders.begin(),
                                                                     req.r_orders.end());
  k.b = k.c;
  if (rmax > 1.0 && vt.size() >= 3) {
    std::vector<double> v;
    for (const auto& n : vel[rmax]) v.push_back(n.value);
    bool positive = std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
    if (positive) {
      k.velocity_fit = fit_exponential_rate(vt, v);
      if (k.velocity_fit.rate > 0.0 && k.velocity_fit.r_squared >= 0.9) {
        k.b = k.velocity_fit.rate / (rmax - 1.0);
        k.b_fitted = true;
      }
    }
  }
  for (double r : req.r_orders) {
    double br = 0.0;
    for (std::size_t i = 0; i < vt.size(); ++i)
      br = std::max(br, vel[r][i].value * std::exp(-(r - 1.0) * k.b * vt[i]));
    k.B_r[r] = br;
  }
  return k;
}

}  // namespace regloss
