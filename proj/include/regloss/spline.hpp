#pragma once

#include <vector>

#include "regloss/field.hpp"

namespace regloss {

// Periodic tensor-product B-spline interpolant of grid samples (degree 3 or 5).
// Points outside the field's support box evaluate to exactly zero.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(const ScalarField& f, int degree = 5);

  double operator()(const Point& x) const;
  const Grid& grid() const { return grid_; }
  int degree() const { return degree_; }

 private:
  Grid grid_;
  int degree_;
  Box support_;
  bool whole_;
  std::vector<double> coef_;
};

// Centered cardinal B-spline of degree 3 or 5.
double bspline(int degree, double x);

}  // namespace regloss
