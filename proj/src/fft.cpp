#include "regloss/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace regloss::spectral {
namespace {

// The FFTW planner is not thread safe; execution with fftw_execute_dft on
// other arrays is. Plans are created once per shape and kept for the process.
class PlanCache {
 public:
  fftw_plan get(int d, int M, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto key = std::make_tuple(d, M, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    int n[kMaxDim];
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) {
      n[i] = M;
      total *= static_cast<std::size_t>(M);
    }
    std::vector<cplx> tmp(total);
    auto* ptr = reinterpret_cast<fftw_complex*>(tmp.data());
    fftw_plan plan =
        fftw_plan_dft(d, n, ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(const Grid& g, std::vector<cplx>& data, int sign) {
  fftw_plan plan = cache().get(g.d(), g.M(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

std::vector<cplx> forward(const Grid& g, const std::vector<double>& values) {
  std::vector<cplx> data(values.begin(), values.end());
  execute(g, data, FFTW_FORWARD);
  return data;
}

std::vector<cplx> forward(const Grid& g, std::vector<cplx> values) {
  execute(g, values, FFTW_FORWARD);
  return values;
}

std::vector<cplx> backward(const Grid& g, std::vector<cplx> values) {
  execute(g, values, FFTW_BACKWARD);
  return values;
}

Point frequency(const Grid& g, std::size_t flat) {
  const Index idx = g.index(flat);
  Point xi{};
  const double f = 2.0 * std::numbers::pi / g.L();
  for (int i = 0; i < g.d(); ++i) xi[i] = f * wavenumber(idx[i], g.M());
  return xi;
}

std::vector<double> frequency_squared(const Grid& g) {
  std::vector<double> axis(g.M());
  const double f = 2.0 * std::numbers::pi / g.L();
  for (int j = 0; j < g.M(); ++j) {
    const double x = f * wavenumber(j, g.M());
    axis[j] = x * x;
  }
  std::vector<double> out(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Index idx = g.index(n);
    double s = 0.0;
    for (int i = 0; i < g.d(); ++i) s += axis[idx[i]];
    out[n] = s;
  }
  return out;
}

std::vector<cplx> coefficients(const Grid& g, const std::vector<double>& values) {
  auto c = forward(g, values);
  const double scale = std::pow(g.L(), 0.5 * g.d()) / static_cast<double>(g.size());
  for (auto& v : c) v *= scale;
  return c;
}

std::vector<double> apply_real_multiplier(const Grid& g, const std::vector<double>& values,
                                          const std::vector<double>& multiplier) {
  auto c = forward(g, values);
  for (std::size_t n = 0; n < c.size(); ++n) c[n] *= multiplier[n];
  c = backward(g, std::move(c));
  std::vector<double> out(c.size());
  const double inv = 1.0 / static_cast<double>(g.size());
  for (std::size_t n = 0; n < c.size(); ++n) out[n] = c[n].real() * inv;
  return out;
}

std::vector<double> derivative(const Grid& g, const std::vector<double>& values, int axis) {
  auto c = forward(g, values);
  const double f = 2.0 * std::numbers::pi / g.L();
  for (std::size_t n = 0; n < c.size(); ++n) {
    const int j = g.index(n)[axis];
    const int k = wavenumber(j, g.M());
    c[n] *= (k == -g.M() / 2) ? cplx(0.0) : cplx(0.0, f * k);
  }
  c = backward(g, std::move(c));
  std::vector<double> out(c.size());
  const double inv = 1.0 / static_cast<double>(g.size());
  for (std::size_t n = 0; n < c.size(); ++n) out[n] = c[n].real() * inv;
  return out;
}

}  // namespace regloss::spectral
