#include "regloss/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace regloss {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_geometry: return "invalid-geometry";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::unsupported_index: return "unsupported-index";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::domain: return "domain";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::index: return "index";
    case ErrorKind::infeasible_placement: return "infeasible-placement";
    case ErrorKind::unsupported_schedule: return "unsupported-schedule";
    case ErrorKind::lipschitz_embedding: return "lipschitz-embedding";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::schema: return "schema";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Grid::Grid(int d, int M, double L, Point origin) : d_(d), M_(M), L_(L), origin_(origin) {
  require(d >= 1 && d <= kMaxDim, ErrorKind::dimension,
          "grid dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  require(M >= 4 && (M & (M - 1)) == 0, ErrorKind::invalid_parameter,
          "points per side must be a power of two >= 4, got " + std::to_string(M));
  require(L > 0 && std::isfinite(L), ErrorKind::invalid_parameter, "side length must be positive");
  for (int i = d; i < kMaxDim; ++i) origin_[i] = 0.0;
  size_ = 1;
  for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(M);
}

double Grid::cell_volume() const { return std::pow(h(), d_); }

Index Grid::index(std::size_t flat) const {
  Index idx{};
  for (int i = d_ - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % M_);
    flat /= M_;
  }
  return idx;
}

std::size_t Grid::flat(const Index& idx) const {
  std::size_t f = 0;
  for (int i = 0; i < d_; ++i) {
    int j = idx[i] % M_;
    if (j < 0) j += M_;
    f = f * M_ + static_cast<std::size_t>(j);
  }
  return f;
}

Point Grid::node(std::size_t flat) const { return node(index(flat)); }

Point Grid::node(const Index& idx) const {
  Point x{};
  const double hh = h();
  for (int i = 0; i < d_; ++i) x[i] = origin_[i] + idx[i] * hh;
  return x;
}

bool Grid::same_shape(const Grid& o) const { return d_ == o.d_ && M_ == o.M_; }

bool Grid::operator==(const Grid& o) const {
  return d_ == o.d_ && M_ == o.M_ && L_ == o.L_ && origin_ == o.origin_;
}

double wrap(double x, double L) {
  double y = std::fmod(x, L);
  if (y < 0) y += L;
  if (y >= L) y -= L;
  return y;
}

double min_image(double dx, double L) {
  double y = wrap(dx, L);
  if (y > 0.5 * L) y -= L;
  return y;
}

Box Box::whole(const Grid& g) {
  Box b;
  b.d = g.d();
  for (int i = 0; i < g.d(); ++i) {
    b.lo[i] = g.origin()[i];
    b.hi[i] = g.origin()[i] + g.L();
  }
  return b;
}

bool Box::is_whole(const Grid& g) const {
  for (int i = 0; i < d; ++i)
    if (hi[i] - lo[i] < g.L()) return false;
  return true;
}

bool Box::contains_periodic(const Point& x, double L, double tol) const {
  for (int i = 0; i < d; ++i) {
    const double ext = hi[i] - lo[i];
    if (ext >= L) continue;
    double off = wrap(x[i] - lo[i] + tol, L);
    if (off > ext + 2 * tol) return false;
  }
  return true;
}

bool Box::contains(const Point& x, double tol) const {
  for (int i = 0; i < d; ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

Box Box::hull(const Box& o) const {
  Box b = *this;
  for (int i = 0; i < d; ++i) {
    b.lo[i] = std::min(lo[i], o.lo[i]);
    b.hi[i] = std::max(hi[i], o.hi[i]);
  }
  return b;
}

Cube::Cube(int d_, const Point& c, double s) : d(d_), center(c), side(s) {
  require(d_ >= 1 && d_ <= kMaxDim, ErrorKind::dimension, "cube dimension out of range");
  require(s > 0 && std::isfinite(s), ErrorKind::invalid_geometry, "cube side must be positive");
}

Box Cube::box() const {
  Box b;
  b.d = d;
  for (int i = 0; i < d; ++i) {
    b.lo[i] = center[i] - 0.5 * side;
    b.hi[i] = center[i] + 0.5 * side;
  }
  return b;
}

bool Cube::contains(const Point& x, double tol) const { return box().contains(x, tol); }

double cube_distance_to_complement(const Cube& support, const Cube& container) {
  require(support.d == container.d, ErrorKind::dimension, "cube dimensions differ");
  const Box s = support.box(), c = container.box();
  double dist = INFINITY;
  const double tol = 1e-12 * std::max(1.0, container.side);
  for (int i = 0; i < s.d; ++i) {
    const double gap = std::min(s.lo[i] - c.lo[i], c.hi[i] - s.hi[i]);
    require(gap >= -tol, ErrorKind::invalid_geometry, "support cube is not inside its container");
    dist = std::min(dist, std::max(gap, 0.0));
  }
  return dist;
}

double cube_gap(const Cube& a, const Cube& b) {
  require(a.d == b.d, ErrorKind::dimension, "cube dimensions differ");
  double sq = 0.0;
  for (int i = 0; i < a.d; ++i) {
    const double g = std::abs(a.center[i] - b.center[i]) - 0.5 * (a.side + b.side);
    if (g > 0) sq += g * g;
  }
  return std::sqrt(sq);
}

Grid grid_covering(const Cube& window, int M) {
  Point origin{};
  for (int i = 0; i < window.d; ++i) origin[i] = window.center[i] - 0.5 * window.side;
  return Grid(window.d, M, window.side, origin);
}

}  // namespace regloss
