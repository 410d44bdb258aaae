#include "regloss/field.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

#include "regloss/fft.hpp"
#include "regloss/smooth.hpp"

namespace regloss {

static_assert(std::endian::native == std::endian::little,
              "binary field container assumes a little-endian host");

namespace {

double grid_mean(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : static_cast<double>(s / v.size());
}

}  // namespace

ScalarField::ScalarField(Grid grid, std::vector<double> values, Box support)
    : grid_(std::move(grid)), values_(std::move(values)), support_(support) {
  require(values_.size() == grid_.size(), ErrorKind::invalid_parameter,
          "value array does not match grid size");
  require(support_.d == grid_.d(), ErrorKind::dimension, "support box dimension mismatch");
  const double tol = 1e-9 * grid_.h();
  if (!support_.is_whole(grid_)) {
    for (std::size_t n = 0; n < values_.size(); ++n) {
      if (std::abs(values_[n]) < kSupportTol) continue;
      require(support_.contains_periodic(grid_.node(n), grid_.L(), tol),
              ErrorKind::invalid_geometry, "field value outside declared support box");
    }
  }
  mean_ = grid_mean(values_);
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : ScalarField(grid, std::move(values), Box::whole(grid)) {}

double ScalarField::l2_norm() const {
  long double s = 0.0L;
  for (double x : values_) s += static_cast<long double>(x) * x;
  return std::sqrt(static_cast<double>(s) * grid_.cell_volume());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

ScalarField ScalarField::zero(const Grid& g) {
  return ScalarField(g, std::vector<double>(g.size(), 0.0));
}

ScalarField ScalarField::sample(const Grid& g, const std::function<double(const Point&)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) v[n] = f(g.node(n));
  return ScalarField(g, std::move(v));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require(a.grid() == b.grid(), ErrorKind::invalid_geometry, "grids differ");
  std::vector<double> v(a.values());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] += b[n];
  const Box sup = (a.support().is_whole(a.grid()) || b.support().is_whole(b.grid()))
                      ? Box::whole(a.grid())
                      : a.support().hull(b.support());
  return ScalarField(a.grid(), std::move(v), sup);
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) { return a + (-1.0) * b; }

ScalarField operator*(double s, const ScalarField& a) {
  std::vector<double> v(a.values());
  for (double& x : v) x *= s;
  return ScalarField(a.grid(), std::move(v), a.support());
}

VectorField::VectorField(Grid grid, std::vector<std::vector<double>> components,
                         bool divergence_free)
    : grid_(std::move(grid)), components_(std::move(components)),
      divergence_free_(divergence_free) {
  require(static_cast<int>(components_.size()) == grid_.d(), ErrorKind::dimension,
          "vector field needs one component per axis");
  for (const auto& c : components_)
    require(c.size() == grid_.size(), ErrorKind::invalid_parameter,
            "component array does not match grid size");
  if (divergence_free_) {
    const double rel = relative_divergence();
    require(rel < 1e-10, ErrorKind::invalid_parameter,
            "field flagged divergence-free has relative divergence " + std::to_string(rel));
  }
}

double VectorField::max_speed() const {
  double m = 0.0;
  for (std::size_t n = 0; n < grid_.size(); ++n) {
    double s = 0.0;
    for (const auto& c : components_) s += c[n] * c[n];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double VectorField::relative_divergence() const {
  const int d = grid_.d();
  std::vector<spectral::cplx> div(grid_.size(), 0.0);
  double grad_sq = 0.0;
  for (int i = 0; i < d; ++i) {
    const auto c = spectral::forward(grid_, components_[i]);
    for (std::size_t n = 0; n < c.size(); ++n) {
      const Point xi = spectral::frequency(grid_, n);
      double x2 = 0.0;
      for (int j = 0; j < d; ++j) x2 += xi[j] * xi[j];
      grad_sq += x2 * std::norm(c[n]);
      const bool nyquist = grid_.index(n)[i] == grid_.M() / 2;
      if (!nyquist) div[n] += spectral::cplx(0.0, xi[i]) * c[n];
    }
  }
  double div_sq = 0.0;
  for (const auto& v : div) div_sq += std::norm(v);
  if (grad_sq == 0.0) return 0.0;
  return std::sqrt(div_sq / grad_sq);
}

ScalarField make_bump(const Grid& grid, const Point& center, double radius, double amplitude) {
  require(radius > 0 && radius < 0.5 * grid.L(), ErrorKind::invalid_geometry,
          "bump radius must lie in (0, L/2)");
  std::vector<double> v(grid.size(), 0.0);
  const double r2inv = 1.0 / (radius * radius);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Point x = grid.node(n);
    double rho2 = 0.0;
    for (int i = 0; i < grid.d(); ++i) {
      const double dx = min_image(x[i] - center[i], grid.L());
      rho2 += dx * dx;
    }
    rho2 *= r2inv;
    if (rho2 < 1.0) v[n] = amplitude * bump_profile(rho2);
  }
  Box sup;
  sup.d = grid.d();
  for (int i = 0; i < grid.d(); ++i) {
    sup.lo[i] = center[i] - radius;
    sup.hi[i] = center[i] + radius;
  }
  return ScalarField(grid, std::move(v), sup);
}

ScalarField make_dipole(const Grid& grid, const Point& center, double radius, double amplitude) {
  Point a = center, b = center;
  a[0] -= radius;
  b[0] += radius;
  return make_bump(grid, a, radius, amplitude) - make_bump(grid, b, radius, amplitude);
}

ScalarField make_unit_dipole(const Grid& grid, const Point& center, double radius) {
  const ScalarField f = make_dipole(grid, center, radius, 1.0);
  return (1.0 / f.l2_norm()) * f;
}

ScalarField make_mode(const Grid& grid, const Index& k, double phase) {
  const double f = 2.0 * std::numbers::pi / grid.L();
  return ScalarField::sample(grid, [&](const Point& x) {
    double arg = phase;
    for (int i = 0; i < grid.d(); ++i) arg += f * k[i] * (x[i] - grid.origin()[i]);
    return std::sin(arg);
  });
}

ScalarField extend_to_dimension(const ScalarField& field2d, double cutoff_inner,
                                double cutoff_outer, int d, const Point& cutoff_center) {
  require(d >= 3, ErrorKind::dimension, "extension target dimension must be >= 3");
  require(d <= kMaxDim, ErrorKind::dimension, "extension target dimension too large");
  require(field2d.grid().d() == 2, ErrorKind::dimension, "extension expects a planar field");
  require(0 < cutoff_inner && cutoff_inner < cutoff_outer && cutoff_outer <= 0.5,
          ErrorKind::invalid_parameter, "cutoff radii must satisfy 0 < inner < outer <= 1/2");
  const Grid& g2 = field2d.grid();
  Point origin = g2.origin();
  for (int i = 2; i < d; ++i) origin[i] = 0.0;
  const Grid g(d, g2.M(), g2.L(), origin);
  const double L = g.L();
  const double inner = cutoff_inner * L, outer = cutoff_outer * L;

  // The cutoff depends only on the trailing coordinates; tabulate it once.
  const std::size_t plane = g2.size();
  const std::size_t rest = g.size() / plane;
  std::vector<double> eta(rest);
  for (std::size_t m = 0; m < rest; ++m) {
    double r2 = 0.0;
    const Index idx = g.index(m);  // leading two indices are zero for m < rest
    for (int i = 2; i < d; ++i) {
      const double xi = origin[i] + idx[i] * g.h();
      const double dx = min_image(xi - cutoff_center[i], L);
      r2 += dx * dx;
    }
    eta[m] = radial_cutoff(std::sqrt(r2), inner, outer);
  }
  std::vector<double> v(g.size());
  for (std::size_t p = 0; p < plane; ++p)
    for (std::size_t m = 0; m < rest; ++m) v[p * rest + m] = field2d[p] * eta[m];

  Box sup;
  sup.d = d;
  const Box& s2 = field2d.support();
  for (int i = 0; i < 2; ++i) {
    sup.lo[i] = s2.lo[i];
    sup.hi[i] = s2.hi[i];
  }
  for (int i = 2; i < d; ++i) {
    sup.lo[i] = cutoff_center[i] - outer;
    sup.hi[i] = cutoff_center[i] + outer;
  }
  return ScalarField(g, std::move(v), sup);
}

namespace {

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is, const std::string& path) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<bool>(is), ErrorKind::io, "truncated field file " + path);
  return v;
}

}  // namespace

void write_field(const ScalarField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::io, "cannot open " + path + " for writing");
  const Grid& g = f.grid();
  put<std::int64_t>(os, g.d());
  put<std::int64_t>(os, g.M());
  put<double>(os, g.L());
  for (int i = 0; i < g.d(); ++i) put<double>(os, f.support().lo[i]);
  for (int i = 0; i < g.d(); ++i) put<double>(os, f.support().hi[i]);
  for (int i = 0; i < g.d(); ++i) put<double>(os, g.origin()[i]);
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  require(static_cast<bool>(os), ErrorKind::io, "write failed for " + path);
}

ScalarField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open " + path);
  const auto d = get<std::int64_t>(is, path);
  const auto M = get<std::int64_t>(is, path);
  const double L = get<double>(is, path);
  require(d >= 1 && d <= kMaxDim && M >= 4 && M <= (1 << 20), ErrorKind::io,
          "corrupt field header in " + path);
  Box sup;
  sup.d = static_cast<int>(d);
  Point origin{};
  for (int i = 0; i < d; ++i) sup.lo[i] = get<double>(is, path);
  for (int i = 0; i < d; ++i) sup.hi[i] = get<double>(is, path);
  for (int i = 0; i < d; ++i) origin[i] = get<double>(is, path);
  const Grid g(static_cast<int>(d), static_cast<int>(M), L, origin);
  std::vector<double> v(g.size());
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  require(static_cast<bool>(is), ErrorKind::io, "truncated field data in " + path);
  return ScalarField(g, std::move(v), sup);
}

void write_field_csv(const ScalarField& f, std::ostream& os) {
  const Grid& g = f.grid();
  for (int i = 0; i < g.d(); ++i) os << 'i' << i << ',';
  os << "value\n";
  char buf[32];
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Index idx = g.index(n);
    for (int i = 0; i < g.d(); ++i) os << idx[i] << ',';
    std::snprintf(buf, sizeof buf, "%.17g", f[n]);
    os << buf << '\n';
  }
}

}  // namespace regloss
