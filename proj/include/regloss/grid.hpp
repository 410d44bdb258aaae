#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "regloss/error.hpp"

namespace regloss {

inline constexpr int kMaxDim = 6;

using Point = std::array<double, kMaxDim>;
using Index = std::array<int, kMaxDim>;

// Uniform periodic grid on [origin, origin + L)^d, M points per side.
class Grid {
 public:
  Grid() : Grid(2, 256) {}
  Grid(int d, int M, double L = 1.0, Point origin = {});

  int d() const { return d_; }
  int M() const { return M_; }
  double L() const { return L_; }
  double h() const { return L_ / M_; }
  const Point& origin() const { return origin_; }
  std::size_t size() const { return size_; }
  double cell_volume() const;

  // Row-major, axis 0 slowest.
  Index index(std::size_t flat) const;
  std::size_t flat(const Index& idx) const;  // indices are wrapped mod M
  Point node(std::size_t flat) const;
  Point node(const Index& idx) const;

  bool same_shape(const Grid& other) const;
  bool operator==(const Grid& other) const;

 private:
  int d_;
  int M_;
  double L_;
  Point origin_;
  std::size_t size_;
};

// Periodic wrap of x into [0, L).
double wrap(double x, double L);
// Minimum-image displacement in (-L/2, L/2].
double min_image(double dx, double L);

// Axis-aligned box [lo, hi] in the first d coordinates. Extents >= L on a
// periodic grid cover the whole axis.
struct Box {
  int d = 0;
  Point lo{};
  Point hi{};

  static Box whole(const Grid& g);
  bool is_whole(const Grid& g) const;
  // Membership on the periodic grid (lo is taken mod L).
  bool contains_periodic(const Point& x, double L, double tol = 0.0) const;
  bool contains(const Point& x, double tol = 0.0) const;
  Box hull(const Box& other) const;
  bool operator==(const Box& other) const = default;
};

struct Cube {
  int d = 0;
  Point center{};
  double side = 1.0;

  Cube() = default;
  Cube(int d, const Point& center, double side);
  Box box() const;
  bool contains(const Point& x, double tol = 0.0) const;
};

// Distance from a support cube to the complement of a container cube.
double cube_distance_to_complement(const Cube& support, const Cube& container);

// Smallest distance between two closed cubes (0 when they intersect).
double cube_gap(const Cube& a, const Cube& b);

// Grid whose fundamental cell is exactly the given cube.
Grid grid_covering(const Cube& window, int M);

}  // namespace regloss
