#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "generators.hpp"
#include "regloss/error.hpp"
#include "regloss/field.hpp"
#include "regloss/sobolev.hpp"

using namespace regloss;

namespace {

constexpr double kPi = std::numbers::pi;

Point pt(double a, double b) {
  Point p{};
  p[0] = a;
  p[1] = b;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Naive separable 2-d DFT, independent of the FFT backend.
using cvec = std::vector<std::complex<double>>;

cvec dft2(const cvec& in, int M, int sign) {
  cvec tw(M);
  for (int k = 0; k < M; ++k) tw[k] = std::polar(1.0, sign * 2.0 * kPi * k / M);
  cvec a(in.size()), b(in.size());
  for (int i = 0; i < M; ++i)
    for (int k = 0; k < M; ++k) {
      std::complex<double> acc = 0.0;
      for (int j = 0; j < M; ++j) acc += in[i * M + j] * tw[(j * k) % M];
      a[i * M + k] = acc;
    }
  for (int j = 0; j < M; ++j)
    for (int k = 0; k < M; ++k) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < M; ++i) acc += a[i * M + j] * tw[(i * k) % M];
      b[k * M + j] = acc;
    }
  return b;
}

int wn(int j, int M) { return j < M / 2 ? j : j - M; }

// ||grad g||_2 with -Lap g = f, by a naive DFT on the unit torus.
double poisson_gradient_norm(const ScalarField& f) {
  const int M = f.grid().M();
  cvec in(f.values().begin(), f.values().end());
  const cvec fh = dft2(in, M, -1);
  cvec gx(fh.size()), gy(fh.size());
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const double kx = 2 * kPi * wn(i, M), ky = 2 * kPi * wn(j, M);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const auto gh = fh[i * M + j] / k2;
      gx[i * M + j] = std::complex<double>(0, kx) * gh;
      gy[i * M + j] = std::complex<double>(0, ky) * gh;
    }
  const cvec ax = dft2(gx, M, +1), ay = dft2(gy, M, +1);
  const double norm = 1.0 / (double(M) * M);
  double acc = 0.0;
  for (std::size_t n = 0; n < ax.size(); ++n) acc += std::norm(ax[n] * norm) + std::norm(ay[n] * norm);
  return std::sqrt(acc / (double(M) * M));
}

ScalarField translate(const ScalarField& f, int di, int dj) {
  const Grid& g = f.grid();
  std::vector<double> v(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    Index idx = g.index(n);
    idx[0] -= di;
    idx[1] -= dj;
    v[n] = f[g.flat(idx)];
  }
  return ScalarField(g, std::move(v));
}

ScalarField remove_mean(const ScalarField& f) {
  std::vector<double> v = f.values();
  for (double& x : v) x -= f.mean();
  return ScalarField(f.grid(), std::move(v));
}

ScalarField normalized(const ScalarField& f) { return (1.0 / f.l2_norm()) * f; }

}  // namespace

TEST_CASE("hs_norm on a single mode") {
  const Grid g(2, 256);
  const auto f = make_mode(g, Index{1, 0});
  for (double s : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
    CAPTURE(s);
    CHECK(rel(hs_norm(f, s).value, std::pow(2 * kPi, s) / std::sqrt(2.0)) < 1e-10);
  }
  CHECK(hs_norm(f, 1.0).value == doctest::Approx(4.442883).epsilon(1e-6));
  // Oblique mode in 3-d: |xi| = 2 pi sqrt(1 + 4 + 9).
  const Grid g3(3, 16);
  const auto f3 = make_mode(g3, Index{1, -2, 3}, 0.4);
  CHECK(rel(hs_norm(f3, 0.5).value, std::pow(2 * kPi * std::sqrt(14.0), 0.5) / std::sqrt(2.0)) <
        1e-10);
}

TEST_CASE("hs_norm: zero field, mean handling") {
  const Grid g(2, 32);
  for (double s : {-1.0, -0.5, 0.0, 0.7, 3.0}) CHECK(hs_norm(ScalarField::zero(g), s).value == 0.0);
  const auto b = make_bump(g, pt(0.5, 0.5), 0.2, 1.0);
  CHECK(hs_norm(b, -0.5).infinite());
  CHECK(hs_norm(b, -1.0).infinite());
  CHECK_FALSE(hs_norm(b, 0.5).infinite());
  CHECK_FALSE(hs_norm(remove_mean(b), -1.0).infinite());
}

TEST_CASE("hs_norm at s = -1 matches a Poisson solve") {
  for (int M : {32, 64}) {
    CAPTURE(M);
    const Grid g(2, M);
    const auto f = remove_mean(make_bump(g, pt(0.4, 0.55), 0.3, 1.0));
    CHECK(rel(hs_norm(f, -1.0).value, poisson_gradient_norm(f)) < 1e-10);
  }
}

TEST_CASE("property: hs_norm at s = 0 is the L2 norm") {
  gen::Rng r(21);
  const Grid g(2, 64);
  for (int c = 0; c < 20; ++c) {
    CAPTURE(c);
    const auto f = c % 2 ? gen::bump(r, g) : gen::trig(r, g);
    CHECK(rel(hs_norm(f, 0.0).value, f.l2_norm()) < 1e-12);
  }
}

TEST_CASE("wsp_norm") {
  const Grid g(2, 128);
  const auto f = make_mode(g, Index{1, 0});
  CHECK(rel(wsp_norm(f, 1.0, 2.0).value, 2 * kPi / std::sqrt(2.0)) < 1e-10);
  CHECK(rel(wsp_norm(f, 2.0, 2.0).value, 4 * kPi * kPi / std::sqrt(2.0)) < 1e-10);
  for (double p : {1.0, 0.5, std::numeric_limits<double>::infinity()}) {
    try {
      wsp_norm(f, 1.0, p);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::unsupported_index);
    }
  }
  SUBCASE("p = 2 agrees with hs_norm") {
    gen::Rng r(8);
    for (int c = 0; c < 10; ++c) {
      const auto h = remove_mean(gen::bump(r, Grid(2, 64)));
      for (double s : {-1.0, -0.3, 0.5, 1.0, 1.7})
        CHECK(rel(wsp_norm(h, s, 2.0).value, hs_norm(h, s).value) < 1e-10);
    }
  }
  SUBCASE("bump at s = 1, p = 4 is grid converged") {
    const auto a = make_bump(Grid(2, 128), pt(0.5, 0.5), 0.25, 1.0);
    const auto b = make_bump(Grid(2, 256), pt(0.5, 0.5), 0.25, 1.0);
    CHECK(rel(wsp_norm(a, 1.0, 4.0).value, wsp_norm(b, 1.0, 4.0).value) < 1e-4);
  }
  SUBCASE("vector fields combine components in l2") {
    const Grid gv(2, 32);
    const auto u = make_mode(gv, Index{0, 1}), v = make_mode(gv, Index{1, 0});
    // (sin 2 pi x2, sin 2 pi x1) is divergence free.
    const VectorField w(gv, {u.values(), v.values()}, true);
    CHECK(rel(wsp_norm(w, 1.0, 3.0).value,
              std::hypot(wsp_norm(u, 1.0, 3.0).value, wsp_norm(v, 1.0, 3.0).value)) < 1e-14);
  }
}

TEST_CASE("gagliardo_seminorm") {
  const Grid g(2, 32);
  CHECK(gagliardo_seminorm(ScalarField::zero(g), 0.5).value == 0.0);
  for (double s : {0.0, 1.0, -0.5, 1.5}) {
    try {
      gagliardo_seminorm(ScalarField::zero(g), s);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::unsupported_index);
    }
  }
  SUBCASE("translation invariance") {
    const auto f = make_bump(g, pt(0.4, 0.45), 0.2, 1.0);
    const double base = gagliardo_seminorm(f, 0.5).value;
    for (auto [i, j] : {std::pair{1, 0}, {3, -2}, {7, 11}})
      CHECK(rel(gagliardo_seminorm(translate(f, i, j), 0.5).value, base) < 1e-12);
  }
  SUBCASE("constant ratio to the multiplier norm across bumps") {
    const Grid h(2, 64);
    const struct {
      double x, y, R;
    } bumps[] = {{0.5, 0.5, 0.25}, {0.3, 0.6, 0.2}, {0.65, 0.35, 0.3}, {0.45, 0.5, 0.35}, {0.55, 0.4, 0.22}};
    std::vector<double> ratios;
    for (const auto& b : bumps) {
      const auto f = make_bump(h, pt(b.x, b.y), b.R, 1.0);
      ratios.push_back(gagliardo_seminorm(f, 0.5).value / hs_norm(f, 0.5).value);
    }
    for (double q : ratios) CHECK(rel(q, ratios[0]) < 0.02);
  }
}

TEST_CASE("property: gagliardo and multiplier norms are equivalent on a corpus") {
  gen::Rng r(44);
  const Grid g(2, 32);
  for (double s : {0.25, 0.5, 0.75}) {
    double lo = 1e300, hi = 0.0;
    for (int c = 0; c < 8; ++c) {
      const auto f = c == 0 ? ScalarField::zero(g) : gen::bump(r, g, 0.2, 0.35);
      const double a = gagliardo_seminorm(f, s).value, b = hs_norm(f, s).value;
      CHECK((a == 0.0) == (b == 0.0));
      if (b == 0.0) continue;
      lo = std::min(lo, a / b);
      hi = std::max(hi, a / b);
    }
    CAPTURE(s);
    CHECK(hi / lo < 1.05);
    // The ratio approaches the whole-space equivalence constant.
    CHECK(rel(0.5 * (lo + hi), std::sqrt(gagliardo_multiplier_ratio_sq(2, s))) < 0.05);
  }
}

TEST_CASE("rescaled_norm") {
  const NormValue base{3.0, {0.5, 2.0}, NormMethod::multiplier};
  CHECK(rescaled_norm(base, 1.0, 2).value == 3.0);
  const NormValue crit{2.5, {1.5, 2.0}, NormMethod::multiplier};
  for (double lam : {1e-3, 0.5, 7.0}) CHECK(rescaled_norm(crit, lam, 3).value == 2.5);
  const NormValue crit_p{2.5, {0.5, 4.0}, NormMethod::multiplier};
  CHECK(rescaled_norm(crit_p, 0.125, 2).value == 2.5);
  CHECK(rescaled_norm(base, 0.25, 2).value == doctest::Approx(3.0 * 0.5).epsilon(1e-15));
  for (double lam : {0.0, -1.0, std::numeric_limits<double>::infinity()}) {
    try {
      rescaled_norm(base, lam, 2);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_parameter);
    }
  }
}

TEST_CASE("property: rescaled_norm is a group action") {
  gen::Rng r(9);
  for (int c = 0; c < 200; ++c) {
    CAPTURE(c);
    // Dyadic factors with integer exponents compose exactly.
    const NormValue b{r.uniform(0.1, 10.0), {double(r.integer(-3, 3)), 2.0}, NormMethod::multiplier};
    const int d = 2 * r.integer(1, 3);
    const double l1 = std::ldexp(1.0, r.integer(-6, 6)), l2 = std::ldexp(1.0, r.integer(-6, 6));
    CHECK(rescaled_norm(rescaled_norm(b, l1, d), l2, d).value == rescaled_norm(b, l1 * l2, d).value);
    // Arbitrary factors compose to rounding.
    const NormValue a{r.uniform(0.1, 10.0), {r.uniform(-2, 2), r.uniform(1.2, 6)}, NormMethod::multiplier};
    const double m1 = r.uniform(0.01, 10), m2 = r.uniform(0.01, 10);
    CHECK(rel(rescaled_norm(rescaled_norm(a, m1, 3), m2, 3).value, rescaled_norm(a, m1 * m2, 3).value) <
          1e-13);
  }
}

TEST_CASE("physical rescale of a dipole follows the scaling law") {
  for (double s : {0.25, 0.5, 0.75}) {
    CAPTURE(s);
    const Grid g(2, 256);
    const auto f = make_dipole(g, pt(0.5, 0.5), 0.125, 1.0);
    const auto fl = make_dipole(g, pt(0.5, 0.5), 0.0625, 1.0);
    const double predicted = rescaled_norm(hs_norm(f, s), 0.5, 2).value;
    CHECK(rel(hs_norm(fl, s).value, predicted) < 1e-3);
  }
}

TEST_CASE("interpolation_bound") {
  const Grid g(2, 64);
  const auto m = make_mode(g, Index{2, 1}, 0.3);
  SUBCASE("single mode is the equality case") {
    for (double s : {-0.5, 0.25, 0.9}) {
      const double b = interpolation_bound(hs_norm(m, -1.0), hs_norm(m, 1.5), s);
      CHECK(rel(b, hs_norm(m, s).value) < 1e-12);
    }
  }
  SUBCASE("two modes: strict") {
    const auto two = make_mode(g, Index{1, 0}) + make_mode(g, Index{4, 0});
    const double b = interpolation_bound(hs_norm(two, 0.0), hs_norm(two, 1.0), 0.5);
    CHECK(b - hs_norm(two, 0.5).value > 1e-3);
  }
  SUBCASE("L2 below the geometric mean of opposite orders") {
    const auto f = remove_mean(make_bump(g, pt(0.5, 0.5), 0.2, 1.0));
    for (double s : {0.25, 0.5, 1.0}) {
      const double b = interpolation_bound(hs_norm(f, -s), hs_norm(f, s), 0.0);
      CHECK(f.l2_norm() <= b * (1 + 1e-10));
    }
  }
  for (double s : {-1.0, 1.5, 2.0}) {
    try {
      interpolation_bound(hs_norm(m, -1.0), hs_norm(m, 1.5), s);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_parameter);
    }
  }
}

TEST_CASE("property: interpolation is never violated") {
  gen::Rng r(77);
  const Grid g(2, 64);
  int checked = 0;
  for (int c = 0; c < 20; ++c) {
    const auto f = c % 2 ? remove_mean(gen::bump(r, g)) : gen::trig(r, g, 4, 10);
    for (int t = 0; t < 10; ++t) {
      const double s1 = r.uniform(-1.5, 1.0), s2 = s1 + r.uniform(0.1, 1.5);
      const double s = r.uniform(s1, s2);
      if (s <= s1 || s >= s2) continue;
      CAPTURE(c);
      CAPTURE(s1);
      CAPTURE(s2);
      const double direct = hs_norm(f, s).value;
      CHECK(direct <= interpolation_bound(hs_norm(f, s1), hs_norm(f, s2), s) * (1 + 1e-10));
      ++checked;
    }
  }
  CHECK(checked >= 190);
}

TEST_CASE("property: monotone embedding at frequencies >= 2 pi") {
  gen::Rng r(31);
  const Grid g(2, 64);
  for (int c = 0; c < 20; ++c) {
    CAPTURE(c);
    const auto f = normalized(gen::trig(r, g, 5, 12));
    double prev = 0.0;
    for (double s = -2.0; s <= 2.0; s += 0.25) {
      const double v = hs_norm(f, s).value;
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("sphere_area") {
  CHECK(sphere_area(1) == doctest::Approx(2.0));
  CHECK(sphere_area(2) == doctest::Approx(2 * kPi));
  CHECK(sphere_area(3) == doctest::Approx(4 * kPi));
  CHECK_THROWS_AS(sphere_area(0), Error);
}

TEST_CASE("orthogonality_lower_bound") {
  CHECK(orthogonality_lower_bound({}, 0.5, 2) == 0.0);
  const OrthogonalPiece one[] = {{2.0, 0.5, 0.25}};
  CHECK(orthogonality_lower_bound(one, 0.5, 2) ==
        doctest::Approx(2.0 - 2 * kPi / 0.5 * std::pow(0.25, -1.0) * 0.5));
  const OrthogonalPiece bad[] = {{2.0, 0.5, 0.0}};
  CHECK_THROWS_AS(orthogonality_lower_bound(bad, 0.5, 2), Error);
  CHECK_THROWS_AS(orthogonality_lower_bound(one, 1.0, 2), Error);
}

TEST_CASE("almost orthogonality on disjoint bumps, M = 64") {
  const Grid g(2, 64);
  const double R = 0.1;
  const auto f1 = make_bump(g, pt(0.25, 0.25), R, 1.0);
  const auto f2 = make_bump(g, pt(0.75, 0.75), R, -0.7);
  // Private cubes of side 1/2 around each center; support cubes of side 2R.
  const double lam = cube_distance_to_complement(Cube(2, pt(0.25, 0.25), 2 * R),
                                                 Cube(2, pt(0.25, 0.25), 0.5));
  CHECK(lam == doctest::Approx(0.15));
  for (double s : {0.25, 0.5, 0.75}) {
    CAPTURE(s);
    const double n1 = gagliardo_seminorm(f1, s).value, n2 = gagliardo_seminorm(f2, s).value;
    const OrthogonalPiece pieces[] = {{n1 * n1, std::pow(f1.l2_norm(), 2), lam},
                                      {n2 * n2, std::pow(f2.l2_norm(), 2), lam}};
    const double sum = gagliardo_seminorm(f1 + f2, s).value;
    CHECK(sum * sum >= orthogonality_lower_bound(pieces, s, 2));
    // Single-piece localization: the double integral restricted to the private
    // cube loses at most (C_d / s) lam^{-2s} ||f||^2.
    const Box Q = Cube(2, pt(0.25, 0.25), 0.5).box();
    const double loc = gagliardo_seminorm_restricted(f1, s, Q).value;
    const OrthogonalPiece single[] = {pieces[0]};
    CHECK(loc * loc >= orthogonality_lower_bound(single, s, 2));
  }
}
