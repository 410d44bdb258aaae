#include "regloss/patchwork.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regloss/error.hpp"
#include "regloss/parallel.hpp"
#include "regloss/sobolev.hpp"
#include "regloss/spline.hpp"

namespace regloss {
namespace {

struct ConditionName {
  ConditionId id;
  const char* name;
};

constexpr ConditionName kNames[] = {
    {ConditionId::A, "A"},         {ConditionId::B, "B"},
    {ConditionId::B_tilde, "B-tilde"}, {ConditionId::B_hat, "B-hat"},
    {ConditionId::C, "C"},         {ConditionId::C_tilde, "C-tilde"},
    {ConditionId::C_hat, "C-hat"}, {ConditionId::D, "D"},
};

// exp(K / tau_n) as a series factor; needs tau = c n^-m with integer m >= 1.
ExpPolySeries exp_over_tau(const ExpPolySeries& tau, double K) {
  ExpPolySeries one{1.0, 0.0, {}, tau.n0};
  if (K == 0.0) return one;
  const double m = -tau.k;
  require(tau.degree() == 0 && tau.c > 0.0 && m >= 1.0 && m == std::floor(m) && m <= 8,
          ErrorKind::unsupported_schedule,
          "exp(K/tau_n) is exp-polynomial only for tau_n = c n^-m with integer m >= 1");
  return exp_monomial(K / tau.c, static_cast<int>(m), tau.n0);
}

ExpPolySeries combine(std::initializer_list<std::pair<const ExpPolySeries*, double>> parts) {
  std::vector<ExpPolySeries> s;
  std::vector<double> e;
  for (const auto& [ser, ex] : parts) {
    s.push_back(*ser);
    e.push_back(ex);
  }
  return product_and_power(s, e);
}

// Sums of very large/small terms computed from logs, saturating at +inf.
long double exp_saturating(long double l) {
  if (l > std::log(std::numeric_limits<long double>::max())) return HUGE_VALL;
  return std::exp(l);
}

}  // namespace

const char* to_string(ConditionId id) {
  for (const auto& n : kNames)
    if (n.id == id) return n.name;
  return "?";
}

ConditionId condition_from_string(const std::string& s) {
  for (const auto& n : kNames)
    if (s == n.name) return n.id;
  throw Error(ErrorKind::schema, "unknown condition '" + s + "'");
}

bool is_sequence_condition(ConditionId id) {
  return id == ConditionId::B_tilde || id == ConditionId::C_tilde;
}

std::string ConditionCertificate::verdict_label() const {
  if (is_sequence_condition(id)) return verdict == Verdict::convergent ? "bounded" : "unbounded";
  return to_string(verdict);
}

ConditionCertificate evaluate_condition(const Schedule& sch, ConditionId id,
                                        const ConditionParams& k) {
  require(k.d >= 1 && k.d <= kMaxDim, ErrorKind::dimension, "dimension out of range");
  const double d = k.d;
  ConditionCertificate cert;
  cert.id = id;
  cert.params = k;
  switch (id) {
    case ConditionId::A:
      cert.series = sch.lambda;
      break;
    case ConditionId::B: {
      require(k.p > 1.0 && std::isfinite(k.p), ErrorKind::unsupported_index,
              "p must lie in (1, inf)");
      require(k.r >= 1.0, ErrorKind::invalid_parameter, "r must be >= 1");
      const ExpPolySeries e = exp_over_tau(sch.tau, (k.r - 1.0) * k.b * k.t);
      cert.series = combine({{&sch.lambda, 1.0 - k.r + d / k.p}, {&sch.tau, -1.0}, {&e, 1.0}});
      break;
    }
    case ConditionId::B_tilde:
      cert.series = combine({{&sch.lambda, 1.0}, {&sch.tau, -1.0}});
      break;
    case ConditionId::B_hat:
      require(k.p > 1.0 && std::isfinite(k.p), ErrorKind::unsupported_index,
              "p must lie in (1, inf)");
      cert.series = combine({{&sch.lambda, d / k.p}, {&sch.tau, -1.0}});
      break;
    case ConditionId::C:
      cert.series = combine({{&sch.gamma, 1.0}, {&sch.lambda, d / 2.0 - k.sigma}});
      break;
    case ConditionId::C_tilde:
      cert.series = sch.gamma;
      break;
    case ConditionId::C_hat:
      cert.series = combine({{&sch.gamma, 1.0}, {&sch.lambda, d / 2.0}});
      break;
    case ConditionId::D: {
      require(k.s > 0.0, ErrorKind::domain, "s must be positive");
      require(k.t >= 0.0, ErrorKind::domain, "t must be nonnegative");
      const ExpPolySeries e = exp_over_tau(sch.tau, 2.0 * k.s * k.c * k.t);
      cert.series = combine({{&sch.gamma, 2.0}, {&sch.lambda, d - 2.0 * k.s}, {&e, 1.0}});
      break;
    }
  }
  const Classification cl =
      is_sequence_condition(id) ? classify_sequence(cert.series) : classify(cert.series);
  cert.verdict = cl.verdict;
  cert.reason = cl.reason;
  return cert;
}

nlohmann::json to_json(const ExpPolySeries& s) {
  return {{"c", s.c}, {"k", s.k}, {"q", s.q}, {"n0", s.n0}};
}

ExpPolySeries series_from_json(const nlohmann::json& j) {
  try {
    ExpPolySeries s;
    s.c = j.at("c").get<double>();
    s.k = j.at("k").get<double>();
    s.q = j.at("q").get<std::vector<double>>();
    s.n0 = j.at("n0").get<long>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema, std::string("series: ") + e.what());
  }
}

nlohmann::json to_json(const ConditionCertificate& c) {
  const auto& k = c.params;
  return {{"condition", to_string(c.id)},
          {"verdict", c.verdict_label()},
          {"series", to_json(c.series)},
          {"params",
           {{"d", k.d},
            {"s", k.s},
            {"t", k.t},
            {"r", k.r},
            {"p", k.p},
            {"sigma", k.sigma},
            {"b", k.b},
            {"c", k.c}}},
          {"reason", c.reason}};
}

ConditionCertificate certificate_from_json(const nlohmann::json& j) {
  try {
    ConditionCertificate c;
    c.id = condition_from_string(j.at("condition").get<std::string>());
    const auto v = j.at("verdict").get<std::string>();
    require(v == "convergent" || v == "divergent" || v == "bounded" || v == "unbounded",
            ErrorKind::schema, "unknown verdict '" + v + "'");
    c.verdict = (v == "convergent" || v == "bounded") ? Verdict::convergent : Verdict::divergent;
    c.series = series_from_json(j.at("series"));
    const auto& p = j.at("params");
    c.params.d = p.at("d").get<int>();
    c.params.s = p.at("s").get<double>();
    c.params.t = p.at("t").get<double>();
    c.params.r = p.at("r").get<double>();
    c.params.p = p.at("p").get<double>();
    c.params.sigma = p.at("sigma").get<double>();
    c.params.b = p.at("b").get<double>();
    c.params.c = p.at("c").get<double>();
    c.reason = j.at("reason").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema, std::string("certificate: ") + e.what());
  }
}

bool revalidate(const ConditionCertificate& c, const Schedule& schedule) {
  const ConditionCertificate fresh = evaluate_condition(schedule, c.id, c.params);
  return fresh.series == c.series && fresh.verdict == c.verdict;
}

double blowup_time(double s, double sigma, double alpha, double c, double T) {
  require(s > 0.0, ErrorKind::domain, "s must be positive");
  require(c > 0.0, ErrorKind::domain, "c must be positive");
  if (s > sigma) return 0.0;
  return (sigma - s) * alpha * T / (s * c);
}

std::vector<long double> hs_lower_bound_partial_sums(const Schedule& sch, double s, double t,
                                                     long N_max, const MixerConstants& k,
                                                     int d) {
  require(s > 0.0 && s < 1.0, ErrorKind::unsupported_index, "s must lie in (0, 1)");
  require(t >= 0.0, ErrorKind::domain, "t must be nonnegative");
  require(N_max >= 1, ErrorKind::index, "N must be >= 1");
  const long double Cs = k.C_s_at(s);
  const long double loss = sphere_area(d) * k.C0_hat * k.C0_hat / s;
  std::vector<long double> out;
  out.reserve(N_max);
  long double sum = 0.0L;
  for (long n = 1; n <= N_max; ++n) {
    // log(gamma^2 lambda^{d-2s})
    const long double base =
        2.0L * sch.gamma.log_abs_term(n) + (d - 2.0L * s) * sch.lambda.log_abs_term(n);
    const long double grow = 2.0L * s * k.c * t / static_cast<long double>(sch.tau.term(n));
    const long double gain = exp_saturating(base + grow + 2.0L * std::log(Cs));
    const long double cost = exp_saturating(base + std::log(loss));
    sum += gain - cost;
    out.push_back(sum);
  }
  return out;
}

double hs_lower_bound_series(const Schedule& sch, double s, double t, long N,
                             const MixerConstants& k, int d) {
  return static_cast<double>(hs_lower_bound_partial_sums(sch, s, t, N, k, d).back());
}

ScalarField evaluate_piece(const PieceSpec& piece, const FlowMap& base_flow,
                           const ScalarField& base_datum, double t, const Grid& grid) {
  const int d = grid.d();
  require(piece.d == d && base_flow.dimension() == d && base_datum.grid().d() == d,
          ErrorKind::dimension, "piece, flow, datum and grid dimensions differ");
  require(t >= 0.0, ErrorKind::domain, "t must be nonnegative");
  const double ts = t / piece.tau;
  require(ts <= base_flow.total_time() * (1 + 1e-12), ErrorKind::out_of_range,
          "rescaled time t/tau_n exceeds the base flow span");
  if (const auto mv = base_flow.moving_region()) {
    bool inside = true;
    for (int i = 0; i < d; ++i) inside = inside && mv->lo[i] > 0.0 && mv->hi[i] < 1.0;
    require(inside, ErrorKind::invalid_geometry,
            "base flow must be confined to the open unit cube");
  }
  const Cube cell = piece.cell();
  const Box box = cell.box();
  const PeriodicSpline spline(base_datum);
  std::vector<double> out(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t n) {
    const Point x = grid.node(n);
    if (!box.contains(x)) return;
    Point y{};
    for (int i = 0; i < d; ++i) y[i] = (x[i] - piece.center[i]) / piece.lambda + 0.5;
    const Point foot = ts == 0.0 ? y : base_flow.pull_back(y, ts);
    out[n] = piece.gamma * spline(foot);
  });
  return ScalarField(grid, std::move(out), box);
}

ScalarField evaluate_truncated_solution(const Schedule& sch, const FlowMap& base_flow,
                                        const ScalarField& base_datum, long N, double t,
                                        const Cube& window, const Grid& grid) {
  require(N >= 1, ErrorKind::index, "N must be >= 1");
  require(window.d == grid.d() && sch.d == grid.d(), ErrorKind::dimension,
          "window, schedule and grid dimensions differ");
  require(!window.contains(sch.accumulation), ErrorKind::resolution,
          "window contains the accumulation point and meets infinitely many cubes");
  const Box wbox = window.box();
  std::vector<PieceSpec> pieces;
  for (long n = 1; n <= N; ++n) {
    const PieceSpec p = make_piece(sch, n);
    require(p.lambda >= 4.0 * grid.h(), ErrorKind::resolution,
            "piece " + std::to_string(n) + " spans fewer than 4 grid cells");
    const Box cb = p.cell().box();
    for (int i = 0; i < grid.d(); ++i)
      require(cb.lo[i] >= wbox.lo[i] && cb.hi[i] <= wbox.hi[i], ErrorKind::invalid_geometry,
              "piece " + std::to_string(n) + " is not inside the window");
    for (const auto& q : pieces)
      require(cube_gap(p.cube(), q.cube()) > 0.0, ErrorKind::invalid_geometry,
              "piece cubes overlap");
    pieces.push_back(p);
  }
  std::vector<double> sum(grid.size(), 0.0);
  Box support = pieces.front().cell().box();
  for (const auto& p : pieces) {
    const ScalarField f = evaluate_piece(p, base_flow, base_datum, t, grid);
    for (std::size_t n = 0; n < grid.size(); ++n) {
      if (f[n] == 0.0) continue;
      require(sum[n] == 0.0, ErrorKind::invalid_geometry, "piece supports overlap");
      sum[n] = f[n];
    }
    support = support.hull(p.cell().box());
  }
  return ScalarField(grid, std::move(sum), support);
}

}  // namespace regloss
