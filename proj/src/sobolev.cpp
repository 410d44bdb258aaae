#include "regloss/sobolev.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "regloss/fft.hpp"
#include "regloss/smooth.hpp"

namespace regloss {

const char* to_string(NormMethod m) {
  return m == NormMethod::multiplier ? "multiplier" : "gagliardo";
}

bool NormValue::infinite() const { return std::isinf(value); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |xi|^s per mode; the zero mode maps to 1 at s = 0 and to 0 otherwise.
std::vector<double> power_multiplier(const Grid& g, double s) {
  auto xi2 = spectral::frequency_squared(g);
  for (double& v : xi2) v = (v == 0.0) ? (s == 0.0 ? 1.0 : 0.0) : std::pow(v, 0.5 * s);
  return xi2;
}

bool zero_mode_ok(const ScalarField& f, double tol) {
  long double sq = 0.0L;
  for (double v : f.values()) sq += static_cast<long double>(v) * v;
  const double rms = std::sqrt(static_cast<double>(sq / f.values().size()));
  return std::abs(f.mean()) <= tol * rms;
}

double grid_lp(const Grid& g, const std::vector<double>& v, double p) {
  long double acc = 0.0L;
  if (p == 2.0) {
    for (double x : v) acc += static_cast<long double>(x) * x;
  } else {
    for (double x : v) acc += std::pow(static_cast<long double>(std::abs(x)), p);
  }
  return std::pow(static_cast<double>(acc) * g.cell_volume(), 1.0 / p);
}

void check_p(double p) {
  require(p > 1.0 && std::isfinite(p), ErrorKind::unsupported_index,
          "integrability index must satisfy 1 < p < inf");
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-14);
}

// Lattice sum of |u + n|^{-d-2s} with a smooth cutoff between r = 3 and r = 7,
// plus the radial tail integral of the remainder. Unit period.
struct PeriodicKernel {
  int d;
  double s;
  double tail;
  static constexpr double R1 = 3.0, R2 = 7.0;
  static constexpr int P = 8;

  PeriodicKernel(int d_, double s_) : d(d_), s(s_) {
    const double mid = integrate(
        [&](double r) { return (1.0 - radial_cutoff(r, R1, R2)) * std::pow(r, -1.0 - 2.0 * s); },
        R1, R2);
    tail = sphere_area(d) * (mid + std::pow(R2, -2.0 * s) / (2.0 * s));
  }

  double operator()(const Point& u) const {
    int ctr[kMaxDim];
    for (int i = 0; i < d; ++i) ctr[i] = -P;
    double acc = 0.0;
    while (true) {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) {
        const double v = u[i] + ctr[i];
        r2 += v * v;
      }
      if (r2 > 0.0 && r2 < R2 * R2) {
        const double r = std::sqrt(r2);
        acc += radial_cutoff(r, R1, R2) * std::pow(r, -d - 2.0 * s);
      }
      int i = d - 1;
      while (i >= 0 && ++ctr[i] > P) ctr[i--] = -P;
      if (i < 0) break;
    }
    return acc + tail;
  }
};

// c_{d,s} = int phi(|u|) |u|^{2-d-2s} du - sum_{n != 0} phi(|n|) |n|^{2-d-2s},
// with phi a cutoff between 8 and 16 grid cells: the part of the near-diagonal
// integral that the lattice sum misses for a locally quadratic increment.
double diagonal_constant(int d, double s) {
  constexpr double R1 = 8.0, R2 = 16.0;
  const double e = 1.0 - 2.0 * s;
  const double radial =
      std::pow(R1, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) +
      integrate([&](double r) { return radial_cutoff(r, R1, R2) * std::pow(r, e); }, R1, R2);
  const double integral = sphere_area(d) * radial;
  const int P = static_cast<int>(R2);
  int ctr[kMaxDim];
  for (int i = 0; i < d; ++i) ctr[i] = -P;
  double lattice = 0.0;
  while (true) {
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += static_cast<double>(ctr[i]) * ctr[i];
    if (r2 > 0.0 && r2 < R2 * R2) {
      const double r = std::sqrt(r2);
      lattice += radial_cutoff(r, R1, R2) * std::pow(r, 2.0 - d - 2.0 * s);
    }
    int i = d - 1;
    while (i >= 0 && ++ctr[i] > P) ctr[i--] = -P;
    if (i < 0) break;
  }
  return integral - lattice;
}

// Kernel on grid offsets, physical units.
std::vector<double> kernel_table(const Grid& g, double s) {
  const PeriodicKernel K(g.d(), s);
  const double scale = std::pow(g.L(), -g.d() - 2.0 * s);
  std::vector<double> tab(g.size(), 0.0);
  for (std::size_t z = 1; z < g.size(); ++z) {
    const Index idx = g.index(z);
    Point u{};
    for (int i = 0; i < g.d(); ++i)
      u[i] = static_cast<double>(spectral::wavenumber(idx[i], g.M())) / g.M();
    tab[z] = scale * K(u);
  }
  return tab;
}

// |grad f|^2 at each node by fourth-order central differences.
std::vector<double> gradient_sq(const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<double> out(g.size(), 0.0);
  const double inv = 1.0 / (12.0 * g.h());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Index idx = g.index(n);
    double acc = 0.0;
    for (int i = 0; i < g.d(); ++i) {
      Index a = idx;
      auto at = [&](int off) {
        a[i] = idx[i] + off;
        return f[g.flat(a)];
      };
      const double df = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) * inv;
      acc += df * df;
    }
    out[n] = acc;
  }
  return out;
}

void check_gagliardo_s(double s) {
  require(s > 0.0 && s < 1.0, ErrorKind::unsupported_index,
          "Gagliardo seminorm needs 0 < s < 1");
}

}  // namespace

NormValue hs_norm(const ScalarField& f, double s, double zero_mode_tol) {
  NormValue out{0.0, {s, 2.0}, NormMethod::multiplier};
  if (s < 0.0 && !zero_mode_ok(f, zero_mode_tol)) {
    out.value = kInf;
    return out;
  }
  const Grid& g = f.grid();
  const auto c = spectral::coefficients(g, f.values());
  const auto xi2 = spectral::frequency_squared(g);
  long double acc = 0.0L;
  for (std::size_t n = 0; n < c.size(); ++n) {
    if (xi2[n] == 0.0) {
      if (s == 0.0) acc += std::norm(c[n]);
      continue;
    }
    const double w = (s == 0.0) ? 1.0 : std::pow(xi2[n], s);
    acc += static_cast<long double>(w) * std::norm(c[n]);
  }
  out.value = std::sqrt(static_cast<double>(acc));
  return out;
}

NormValue wsp_norm(const ScalarField& f, double s, double p) {
  check_p(p);
  NormValue out{0.0, {s, p}, NormMethod::multiplier};
  if (s < 0.0 && !zero_mode_ok(f, kZeroModeTolerance)) {
    out.value = kInf;
    return out;
  }
  const Grid& g = f.grid();
  if (s == 0.0) {
    out.value = grid_lp(g, f.values(), p);
    return out;
  }
  const auto v = spectral::apply_real_multiplier(g, f.values(), power_multiplier(g, s));
  out.value = grid_lp(g, v, p);
  return out;
}

NormValue wsp_norm(const VectorField& u, double s, double p) {
  check_p(p);
  NormValue out{0.0, {s, p}, NormMethod::multiplier};
  double acc = 0.0;
  for (const auto& comp : u.components()) {
    const double v = wsp_norm(ScalarField(u.grid(), comp), s, p).value;
    acc += v * v;
  }
  out.value = std::sqrt(acc);
  return out;
}

NormValue gagliardo_seminorm(const ScalarField& f, double s) {
  check_gagliardo_s(s);
  const Grid& g = f.grid();
  const auto K = kernel_table(g, s);
  const auto& v = f.values();
  const std::size_t N = g.size();
  long double pairs = 0.0L;
  for (std::size_t z = 1; z < N; ++z) {
    const Index dz = g.index(z);
    long double dsum = 0.0L;
    for (std::size_t x = 0; x < N; ++x) {
      Index y = g.index(x);
      for (int i = 0; i < g.d(); ++i) y[i] += dz[i];
      const double diff = v[x] - v[g.flat(y)];
      dsum += static_cast<long double>(diff) * diff;
    }
    pairs += K[z] * dsum;
  }
  const double hd = g.cell_volume();
  double value = static_cast<double>(pairs) * hd * hd;
  long double grad = 0.0L;
  for (double x : gradient_sq(f)) grad += x;
  value += static_cast<double>(grad) * hd / g.d() * std::pow(g.h(), 2.0 - 2.0 * s) *
           diagonal_constant(g.d(), s);
  return {std::sqrt(std::max(value, 0.0)), {s, 2.0}, NormMethod::gagliardo};
}

NormValue gagliardo_seminorm_restricted(const ScalarField& f, double s, const Box& region) {
  check_gagliardo_s(s);
  const Grid& g = f.grid();
  require(region.d == g.d(), ErrorKind::dimension, "region dimension mismatch");
  const auto K = kernel_table(g, s);
  std::vector<std::size_t> inside;
  for (std::size_t n = 0; n < g.size(); ++n)
    if (region.contains_periodic(g.node(n), g.L(), 1e-12 * g.L())) inside.push_back(n);
  const auto& v = f.values();
  long double pairs = 0.0L;
  for (std::size_t a : inside) {
    const Index ia = g.index(a);
    for (std::size_t b : inside) {
      if (a == b) continue;
      Index dz = g.index(b);
      for (int i = 0; i < g.d(); ++i) dz[i] -= ia[i];
      const double diff = v[a] - v[b];
      pairs += K[g.flat(dz)] * static_cast<long double>(diff) * diff;
    }
  }
  const double hd = g.cell_volume();
  double value = static_cast<double>(pairs) * hd * hd;
  const auto gsq = gradient_sq(f);
  long double grad = 0.0L;
  for (std::size_t a : inside) grad += gsq[a];
  value += static_cast<double>(grad) * hd / g.d() * std::pow(g.h(), 2.0 - 2.0 * s) *
           diagonal_constant(g.d(), s);
  return {std::sqrt(std::max(value, 0.0)), {s, 2.0}, NormMethod::gagliardo};
}

double gagliardo_multiplier_ratio_sq(int d, double s) {
  check_gagliardo_s(s);
  const double C = s * std::pow(4.0, s) * std::tgamma(0.5 * d + s) /
                   (std::pow(std::numbers::pi, 0.5 * d) * std::tgamma(1.0 - s));
  return 2.0 / C;
}

NormValue rescaled_norm(const NormValue& base, double lam, int d) {
  require(lam > 0.0 && std::isfinite(lam), ErrorKind::invalid_parameter,
          "rescaling factor must be positive");
  NormValue out = base;
  const double e = d / base.index.p - base.index.s;
  if (e != 0.0) out.value = base.value * std::pow(lam, e);
  return out;
}

double interpolation_bound(const NormValue& n1, const NormValue& n2, double s) {
  const double s1 = n1.index.s, s2 = n2.index.s;
  require(s1 < s && s < s2, ErrorKind::invalid_parameter,
          "interpolation order must lie strictly between the endpoint orders");
  const double theta = (s2 - s) / (s2 - s1);
  if (n1.value == 0.0 || n2.value == 0.0) return 0.0;
  return std::pow(n1.value, theta) * std::pow(n2.value, 1.0 - theta);
}

double sphere_area(int d) {
  require(d >= 1, ErrorKind::dimension, "sphere dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double orthogonality_lower_bound(std::span<const OrthogonalPiece> pieces, double s, int d) {
  require(s > 0.0 && s < 1.0, ErrorKind::unsupported_index, "orthogonality bound needs 0 < s < 1");
  const double Cd = sphere_area(d);
  double acc = 0.0;
  for (const auto& p : pieces) {
    require(p.lam > 0.0, ErrorKind::invalid_parameter, "piece separation must be positive");
    acc += p.hs_sq - Cd / s * std::pow(p.lam, -2.0 * s) * p.l2_sq;
  }
  return acc;
}

}  // namespace regloss
