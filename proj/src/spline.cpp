#include "regloss/spline.hpp"

#include <cmath>
#include <numbers>

#include "regloss/fft.hpp"

namespace regloss {
namespace {

double pos5(double x) { return x > 0 ? x * x * x * x * x : 0.0; }
double pos3(double x) { return x > 0 ? x * x * x : 0.0; }

double symbol(int degree, double omega) {
  if (degree == 5) return (66.0 + 52.0 * std::cos(omega) + 2.0 * std::cos(2.0 * omega)) / 120.0;
  return (4.0 + 2.0 * std::cos(omega)) / 6.0;
}

}  // namespace

double bspline(int degree, double x) {
  const double a = std::abs(x);
  if (degree == 5) return (pos5(3.0 - a) - 6.0 * pos5(2.0 - a) + 15.0 * pos5(1.0 - a)) / 120.0;
  return (pos3(2.0 - a) - 4.0 * pos3(1.0 - a)) / 6.0;
}

PeriodicSpline::PeriodicSpline(const ScalarField& f, int degree)
    : grid_(f.grid()), degree_(degree), support_(f.support()),
      whole_(f.support().is_whole(f.grid())) {
  require(degree == 3 || degree == 5, ErrorKind::invalid_parameter,
          "spline degree must be 3 or 5");
  const int M = grid_.M();
  std::vector<double> axis(M);
  for (int j = 0; j < M; ++j) axis[j] = symbol(degree, 2.0 * std::numbers::pi * j / M);
  std::vector<double> inv(grid_.size());
  for (std::size_t n = 0; n < grid_.size(); ++n) {
    const Index idx = grid_.index(n);
    double s = 1.0;
    for (int i = 0; i < grid_.d(); ++i) s *= axis[idx[i]];
    inv[n] = 1.0 / s;
  }
  coef_ = spectral::apply_real_multiplier(grid_, f.values(), inv);
}

double PeriodicSpline::operator()(const Point& x) const {
  if (!whole_ && !support_.contains_periodic(x, grid_.L(), 1e-12 * grid_.L())) return 0.0;
  const int d = grid_.d(), M = grid_.M();
  const int taps = degree_ + 1;
  const int back = degree_ == 5 ? 2 : 1;
  const double hinv = 1.0 / grid_.h();
  double w[kMaxDim][6];
  int id[kMaxDim][6];
  for (int i = 0; i < d; ++i) {
    const double u = (x[i] - grid_.origin()[i]) * hinv;
    const double fl = std::floor(u);
    const long base = static_cast<long>(fl) - back;
    for (int t = 0; t < taps; ++t) {
      w[i][t] = bspline(degree_, u - static_cast<double>(base + t));
      long j = (base + t) % M;
      if (j < 0) j += M;
      id[i][t] = static_cast<int>(j);
    }
  }
  if (d == 2) {
    double acc = 0.0;
    for (int a = 0; a < taps; ++a) {
      const double* row = coef_.data() + static_cast<std::size_t>(id[0][a]) * M;
      double r = 0.0;
      for (int b = 0; b < taps; ++b) r += w[1][b] * row[id[1][b]];
      acc += w[0][a] * r;
    }
    return acc;
  }
  int ctr[kMaxDim] = {0};
  double acc = 0.0;
  while (true) {
    std::size_t flat = 0;
    double wt = 1.0;
    for (int i = 0; i < d; ++i) {
      flat = flat * M + static_cast<std::size_t>(id[i][ctr[i]]);
      wt *= w[i][ctr[i]];
    }
    acc += wt * coef_[flat];
    int i = d - 1;
    while (i >= 0 && ++ctr[i] == taps) ctr[i--] = 0;
    if (i < 0) break;
  }
  return acc;
}

}  // namespace regloss
