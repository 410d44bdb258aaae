#include "regloss/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "regloss/error.hpp"

namespace regloss {
namespace {

// Past this index the terms of a convergent series are strictly decreasing:
// n d/dn log term = k + sum_j j q_j n^j, whose real roots lie below the
// Cauchy bound of that polynomial.
long decreasing_from(const ExpPolySeries& s) {
  const int m = s.degree();
  if (m == 0) return 1;
  const double lead = m * s.q[m - 1];
  double bound = std::abs(s.k / lead);
  for (int j = 1; j < m; ++j) bound = std::max(bound, std::abs(j * s.q[j - 1] / lead));
  return static_cast<long>(std::ceil(1.0 + bound)) + 1;
}

double offset(const ExpPolySeries& lam, long n) {
  const long H = std::max(decreasing_from(lam), lam.n0) + 1;
  double acc = 0.0;
  if (n + 1 < H) {
    // g_m = sup_{j >= m} l_j over the non-monotone prefix, via a suffix max.
    std::vector<double> l(H - n);
    for (long m = n + 1; m <= H; ++m) l[m - n - 1] = 3.0 * static_cast<double>(lam.term(m));
    double g = l.back();
    for (long m = H - 1; m > n; --m) {
      const double lm = l[m - n - 1];
      g = std::max(g, lm);
      acc += lm + g;
    }
    return acc + 6.0 * tail_sum(lam, H - 1);
  }
  return 6.0 * tail_sum(lam, n);
}

}  // namespace

double Schedule::lambda_at(long n) const { return static_cast<double>(lambda.term(n)); }
double Schedule::tau_at(long n) const { return static_cast<double>(tau.term(n)); }
double Schedule::gamma_at(long n) const { return static_cast<double>(gamma.term(n)); }

Schedule theorem1_schedule(int d) {
  require(d >= 2 && d <= kMaxDim, ErrorKind::dimension, "schedules need 2 <= d <= 6");
  Schedule s;
  s.name = "theorem1";
  s.d = d;
  s.tau = ExpPolySeries{1.0, -3.0, {}, 1};
  s.lambda = exp_monomial(-1.0, 1);
  s.gamma = exp_monomial(-1.0, 2);
  return s;
}

ConstructionParams construction_params(int d, double r, double p, double sigma, double T,
                                       double b, double c, double alpha) {
  require(d >= 2 && d <= kMaxDim, ErrorKind::dimension, "schedules need 2 <= d <= 6");
  require(r > 1.0, ErrorKind::invalid_parameter, "the construction needs r > 1");
  require(p > 1.0 && std::isfinite(p), ErrorKind::unsupported_index, "p must lie in (1, inf)");
  require(sigma >= 0.0 && T > 0.0, ErrorKind::invalid_parameter,
          "need sigma >= 0 and T > 0");
  require(b > 0.0 && c > 0.0, ErrorKind::invalid_parameter, "rates b and c must be positive");
  require(p < d / (r - 1.0), ErrorKind::lipschitz_embedding,
          "p >= d/(r-1): W^{r,p} embeds in the Lipschitz class");
  ConstructionParams k;
  k.d = d;
  k.r = r;
  k.p = p;
  k.sigma = sigma;
  k.T = T;
  k.b = b;
  k.c = c;
  k.beta = 1.0 - r + d / p;
  const double lower = (r - 1.0) * b / k.beta;
  k.alpha = alpha > 0.0 ? alpha : 2.0 * lower;
  require(k.alpha > lower, ErrorKind::invalid_parameter,
          "alpha must exceed (r-1) b / beta");
  // 1 - c beta / (c beta + (r-1) b) written as q / (1 + q).
  const double q = (r - 1.0) * b / (c * k.beta);
  k.mu_bar = q / (1.0 + q);
  return k;
}

Schedule theorem2_schedule(const ConstructionParams& params, double b, double c) {
  const ConstructionParams k =
      construction_params(params.d, params.r, params.p, params.sigma, params.T, b, c,
                          params.alpha);
  Schedule s;
  s.name = "theorem2";
  s.d = k.d;
  s.tau = ExpPolySeries{1.0, -1.0, {}, 1};
  s.lambda = exp_monomial(-k.alpha * k.T, 1);
  s.gamma = ExpPolySeries{1.0, -2.0, {k.alpha * (k.d / 2.0 - k.sigma) * k.T}, 1};
  s.params = k;
  return s;
}

double divergence_threshold(double alpha, double c) { return alpha / (alpha + c); }

std::optional<double> admissible_alpha_for_blowup(const ConstructionParams& k, double s) {
  require(s > 0.0, ErrorKind::domain, "s must be positive");
  const double lower = (k.r - 1.0) * k.b / k.beta;
  if (s >= k.sigma) return 2.0 * lower;
  // (D) at t = T diverges iff alpha (s - sigma) + s c > 0.
  const double upper = s * k.c / (k.sigma - s);
  if (!(upper > lower)) return std::nullopt;
  const double a = 0.5 * (lower + upper);
  if (!(a > lower && a < upper)) return std::nullopt;
  return a;
}

Cube PieceSpec::cube() const { return Cube(d, center, 3.0 * lambda); }
Cube PieceSpec::cell() const { return Cube(d, center, lambda); }

double tail_sum(const ExpPolySeries& s, long n) {
  require(classify(s).verdict == Verdict::convergent, ErrorKind::infeasible_placement,
          "tail of a divergent series");
  if (s.c == 0.0) return 0.0;
  const long H = std::max(decreasing_from(s), n + 1);
  long double sum = 0.0L;
  if (s.degree() == 0) {
    const long cut = H + 100000;
    for (long m = n + 1; m <= cut; ++m) sum += s.term(m);
    // sum_{m > cut} c m^k <= c cut^{k+1} / (-k-1)
    sum += s.c * std::pow(static_cast<long double>(cut), s.k + 1.0) / (-s.k - 1.0);
    return static_cast<double>(sum);
  }
  constexpr long kMaxTerms = 50000000;
  for (long m = n + 1; m <= n + kMaxTerms; ++m) {
    const long double t = s.term(m);
    sum += t;
    if (m > H && t <= 1e-20L * sum) return static_cast<double>(sum);
  }
  throw Error(ErrorKind::infeasible_placement, "tail sum did not settle");
}

PieceSpec make_piece(const Schedule& sch, long n) {
  require(n >= 1, ErrorKind::index, "piece index must be >= 1");
  PieceSpec p;
  p.n = n;
  p.d = sch.d;
  p.lambda = sch.lambda_at(n);
  p.tau = sch.tau_at(n);
  p.gamma = sch.gamma_at(n);
  require(p.lambda > 0.0 && p.tau > 0.0 && p.gamma > 0.0, ErrorKind::invalid_parameter,
          "schedule values must be positive");
  require(classify(sch.lambda).verdict == Verdict::convergent, ErrorKind::infeasible_placement,
          "sum of lambda_n diverges: cubes cannot accumulate in a compact set");
  p.center = sch.accumulation;
  p.center[0] += offset(sch.lambda, n) + 1.5 * p.lambda;
  return p;
}

std::vector<Cube> place_cubes(const Schedule& sch, long N) {
  require(N >= 1, ErrorKind::index, "need at least one cube");
  require(classify(sch.lambda).verdict == Verdict::convergent, ErrorKind::infeasible_placement,
          "sum of lambda_n diverges: cubes cannot accumulate in a compact set");
  std::vector<Cube> out;
  out.reserve(N);
  for (long n = 1; n <= N; ++n) out.push_back(make_piece(sch, n).cube());
  return out;
}

}  // namespace regloss
