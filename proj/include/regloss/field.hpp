#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "regloss/grid.hpp"

namespace regloss {

inline constexpr double kSupportTol = 1e-12;

class ScalarField {
 public:
  // Validates that values vanish outside the support box.
  ScalarField(Grid grid, std::vector<double> values, Box support);
  ScalarField(Grid grid, std::vector<double> values);  // whole-domain support

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const Box& support() const { return support_; }
  double mean() const { return mean_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double l2_norm() const;
  double max_abs() const;

  static ScalarField zero(const Grid& g);
  static ScalarField sample(const Grid& g, const std::function<double(const Point&)>& f);

 private:
  Grid grid_;
  std::vector<double> values_;
  Box support_;
  double mean_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);

class VectorField {
 public:
  // When divergence_free is set the spectral divergence is checked.
  VectorField(Grid grid, std::vector<std::vector<double>> components, bool divergence_free);

  const Grid& grid() const { return grid_; }
  const std::vector<std::vector<double>>& components() const { return components_; }
  bool divergence_free() const { return divergence_free_; }
  double max_speed() const;

  // ||div u||_2 / ||grad u||_2 computed spectrally (0 for a constant field).
  double relative_divergence() const;

 private:
  Grid grid_;
  std::vector<std::vector<double>> components_;
  bool divergence_free_;
};

ScalarField make_bump(const Grid& grid, const Point& center, double radius, double amplitude);

// Two opposite bumps displaced along axis 0: zero mean, odd symmetry.
ScalarField make_dipole(const Grid& grid, const Point& center, double radius, double amplitude);

// Same dipole rescaled to unit grid L2 norm.
ScalarField make_unit_dipole(const Grid& grid, const Point& center, double radius);

ScalarField make_mode(const Grid& grid, const Index& wavevector, double phase = 0.0);

ScalarField extend_to_dimension(const ScalarField& field2d, double cutoff_inner,
                                double cutoff_outer, int d, const Point& cutoff_center = {});

// Little-endian binary container: int64 d, int64 M, f64 L, f64 lo[d], f64 hi[d],
// f64 origin[d], then row-major values.
void write_field(const ScalarField& f, const std::string& path);
ScalarField read_field(const std::string& path);
void write_field_csv(const ScalarField& f, std::ostream& os);

}  // namespace regloss
