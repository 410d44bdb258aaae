#pragma once

// Hand-rolled generators for property tests. Each generator draws from a
// seeded mt19937_64 so failures reproduce from the printed case index.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "regloss/field.hpp"
#include "regloss/series.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng_); }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Bump with center and radius drawn so the support stays inside the cell.
inline regloss::ScalarField bump(Rng& r, const regloss::Grid& g, double rmin = 0.08,
                                 double rmax = 0.2) {
  const double R = r.uniform(rmin, rmax);
  regloss::Point c{};
  for (int i = 0; i < g.d(); ++i) c[i] = r.uniform(R + 0.02, 1.0 - R - 0.02);
  return regloss::make_bump(g, c, R, r.uniform(0.5, 2.0));
}

// Mean-free bump combination: two bumps with opposite masses.
inline regloss::ScalarField zero_mean_pair(Rng& r, const regloss::Grid& g) {
  const regloss::ScalarField a = bump(r, g), b = bump(r, g);
  const double ma = a.mean(), mb = b.mean();
  return a - (ma / mb) * b;
}

// Small trigonometric polynomial with a few random modes.
inline regloss::ScalarField trig(Rng& r, const regloss::Grid& g, int modes = 3, int kmax = 6) {
  std::vector<double> v(g.size(), 0.0);
  for (int m = 0; m < modes; ++m) {
    regloss::Index k{};
    for (int i = 0; i < g.d(); ++i) k[i] = r.integer(-kmax, kmax);
    bool nonzero = false;
    for (int i = 0; i < g.d(); ++i) nonzero |= k[i] != 0;
    if (!nonzero) k[0] = 1;
    const auto f = regloss::make_mode(g, k, r.uniform(0.0, 6.283185307179586));
    const double a = r.uniform(-1.0, 1.0);
    for (std::size_t n = 0; n < g.size(); ++n) v[n] += a * f[n];
  }
  return regloss::ScalarField(g, std::move(v));
}

// ExpPolySeries with degree 1-3, coefficients in [-3, 3] and a leading
// coefficient bounded away from 0 so the numeric oracle can see its sign.
inline regloss::ExpPolySeries series(Rng& r) {
  regloss::ExpPolySeries s;
  s.c = r.uniform(0.1, 3.0);
  s.k = r.uniform(-3.0, 3.0);
  const int deg = r.integer(1, 3);
  s.q.resize(deg);
  for (auto& q : s.q) q = r.uniform(-3.0, 3.0);
  double& lead = s.q.back();
  if (std::abs(lead) < 0.05) lead = lead < 0 ? -0.05 : 0.05;
  return s;
}

}  // namespace gen
