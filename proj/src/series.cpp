#include "regloss/series.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>

#include "regloss/error.hpp"

namespace regloss {
namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Largest log value whose exponential is still finite in long double.
const long double kLogMax = std::log(LDBL_MAX);

}  // namespace

long double ExpPolySeries::log_abs_term(long n) const {
  const long double nn = static_cast<long double>(n);
  long double poly = 0.0L;
  for (std::size_t j = q.size(); j-- > 0;) poly = (poly + q[j]) * nn;
  return std::log(std::abs(static_cast<long double>(c))) + static_cast<long double>(k) * std::log(nn) +
         poly;
}

long double ExpPolySeries::term(long n) const {
  if (c == 0.0) return 0.0L;
  const long double l = log_abs_term(n);
  const long double mag = l > kLogMax ? HUGE_VALL : std::exp(l);
  return c > 0 ? mag : -mag;
}

int ExpPolySeries::degree() const {
  for (std::size_t j = q.size(); j-- > 0;)
    if (q[j] != 0.0) return static_cast<int>(j + 1);
  return 0;
}

ExpPolySeries exp_monomial(double coef, int degree, long n0) {
  require(degree >= 1, ErrorKind::invalid_parameter, "exponent degree must be >= 1");
  ExpPolySeries s;
  s.n0 = n0;
  s.q.assign(degree, 0.0);
  s.q[degree - 1] = coef;
  return s;
}

const char* to_string(Verdict v) { return v == Verdict::convergent ? "convergent" : "divergent"; }

Classification classify(const ExpPolySeries& s) {
  if (s.c == 0.0) return {Verdict::convergent, "c = 0: every term vanishes"};
  const int m = s.degree();
  if (m > 0) {
    const double a = s.q[m - 1];
    const std::string lead = "leading exponent coefficient q_" + std::to_string(m) + " = " + fmt(a);
    if (a > 0) return {Verdict::divergent, lead + " > 0: terms grow without bound"};
    return {Verdict::convergent, lead + " < 0: terms decay faster than any power"};
  }
  if (s.k < -1.0) return {Verdict::convergent, "q = 0, power k = " + fmt(s.k) + " < -1"};
  return {Verdict::divergent, "q = 0, power k = " + fmt(s.k) + " >= -1"};
}

Classification classify_sequence(const ExpPolySeries& s) {
  if (s.c == 0.0) return {Verdict::convergent, "c = 0: identically zero sequence"};
  const int m = s.degree();
  if (m > 0) {
    const double a = s.q[m - 1];
    const std::string lead = "leading exponent coefficient q_" + std::to_string(m) + " = " + fmt(a);
    if (a > 0) return {Verdict::divergent, lead + " > 0: unbounded"};
    return {Verdict::convergent, lead + " < 0: tends to 0"};
  }
  if (s.k <= 0.0) return {Verdict::convergent, "q = 0, power k = " + fmt(s.k) + " <= 0: bounded"};
  return {Verdict::divergent, "q = 0, power k = " + fmt(s.k) + " > 0: unbounded"};
}

PartialSum partial_sum(const ExpPolySeries& s, long N) {
  require(N >= s.n0, ErrorKind::invalid_parameter, "partial sum needs N >= n0");
  PartialSum out;
  if (s.c == 0.0) return out;
  // Kahan-compensated long double summation.
  long double sum = 0.0L, comp = 0.0L;
  for (long n = s.n0; n <= N; ++n) {
    const long double t = s.term(n);
    if (std::isinf(t)) {
      out.value = t;
      out.saturated = true;
      return out;
    }
    const long double y = t - comp;
    const long double z = sum + y;
    comp = (z - sum) - y;
    sum = z;
    if (std::isinf(sum)) {
      out.value = sum;
      out.saturated = true;
      return out;
    }
  }
  out.value = sum;
  return out;
}

ExpPolySeries product_and_power(std::span<const ExpPolySeries> series,
                                std::span<const double> exponents) {
  require(series.size() == exponents.size(), ErrorKind::invalid_parameter,
          "one exponent per series is required");
  ExpPolySeries out;
  out.c = 1.0;
  out.k = 0.0;
  if (series.empty()) return out;
  out.n0 = series.front().n0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const double e = exponents[i];
    require(s.n0 == out.n0, ErrorKind::alignment, "series start indices differ");
    if (e == 0.0) continue;
    if (s.c < 0.0)
      require(e == std::floor(e), ErrorKind::domain,
              "negative coefficient raised to a non-integer power");
    out.c *= (e == 1.0) ? s.c : std::pow(s.c, e);
    out.k += e * s.k;
    if (out.q.size() < s.q.size()) out.q.resize(s.q.size(), 0.0);
    for (std::size_t j = 0; j < s.q.size(); ++j) out.q[j] += e * s.q[j];
  }
  while (!out.q.empty() && out.q.back() == 0.0) out.q.pop_back();
  return out;
}

}  // namespace regloss
