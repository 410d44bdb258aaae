#include "regloss/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "regloss/error.hpp"
#include "regloss/field.hpp"
#include "regloss/mixing.hpp"
#include "regloss/numfmt.hpp"
#include "regloss/parallel.hpp"
#include "regloss/patchwork.hpp"
#include "regloss/schedule.hpp"
#include "regloss/sobolev.hpp"

namespace regloss {

using nlohmann::json;

namespace {

constexpr std::pair<Mode, const char*> kModes[] = {
    {Mode::mix, "mix"},
    {Mode::norms, "norms"},
    {Mode::certify_thm1, "certify-thm1"},
    {Mode::certify_thm2, "certify-thm2"},
    {Mode::lower_bound_sweep, "lower-bound-sweep"},
    {Mode::truncated_solution, "truncated-solution"},
};

// Reads one JSON object, tracking consumed keys so leftovers are reported.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    read(j_.at(key), field(key), out);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(field(it.key()), "unknown field");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw Error(ErrorKind::schema, path + ": " + msg);
  }

 private:
  static void read(const json& v, const std::string& p, double& out) {
    if (!v.is_number()) fail(p, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(p, "expected a finite number");
  }
  static void read(const json& v, const std::string& p, int& out) {
    if (!v.is_number_integer()) fail(p, "expected an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      fail(p, "integer out of range");
    out = static_cast<int>(x);
  }
  static void read(const json& v, const std::string& p, long& out) {
    if (!v.is_number_integer()) fail(p, "expected an integer");
    out = v.get<long>();
  }
  static void read(const json& v, const std::string& p, std::uint64_t& out) {
    if (!v.is_number_unsigned()) fail(p, "expected a nonnegative integer");
    out = v.get<std::uint64_t>();
  }
  static void read(const json& v, const std::string& p, bool& out) {
    if (!v.is_boolean()) fail(p, "expected a boolean");
    out = v.get<bool>();
  }
  static void read(const json& v, const std::string& p, std::string& out) {
    if (!v.is_string()) fail(p, "expected a string");
    out = v.get<std::string>();
  }
  static void read(const json& v, const std::string& p, std::optional<double>& out) {
    if (v.is_null()) {
      out.reset();
      return;
    }
    double x = 0.0;
    read(v, p, x);
    out = x;
  }
  template <class T>
  static void read(const json& v, const std::string& p, std::vector<T>& out) {
    if (!v.is_array()) fail(p, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T x{};
      read(v[i], p + "[" + std::to_string(i) + "]", x);
      out.push_back(x);
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) Reader::fail(path, msg);
}

bool power_of_two(int M) { return M >= 4 && (M & (M - 1)) == 0; }

void validate(const ExperimentConfig& c) {
  check(c.d >= 2 && c.d <= kMaxDim, "d", "must lie in [2, 6]");
  check(power_of_two(c.M), "M", "must be a power of two >= 4");
  check(c.threads >= 1, "threads", "must be >= 1");
  const auto& m = c.mixer;
  check(m.step_duration > 0.0, "mixer.step_duration", "must be positive");
  check(m.steps >= 1, "mixer.steps", "must be >= 1");
  check(m.seam > 0.0 && m.seam < 0.5, "mixer.seam", "must lie in (0, 1/2)");
  check(m.datum_radius > 0.0 && m.datum_radius < 0.25, "mixer.datum_radius",
        "must lie in (0, 1/4)");
  check(m.refine_every >= 0, "mixer.refine_every", "must be >= 0");
  check(m.skip >= 0 && m.skip + 3 <= m.steps + 1, "mixer.skip",
        "must leave at least 3 samples in the fit window");
  for (std::size_t i = 0; i < c.norms.gagliardo_orders.size(); ++i) {
    const double s = c.norms.gagliardo_orders[i];
    check(s > 0.0 && s < 1.0, "norms.gagliardo_orders[" + std::to_string(i) + "]",
          "must lie in (0, 1)");
  }
  const auto& s = c.schedule;
  check(s.d >= 2 && s.d <= kMaxDim, "schedule.d", "must lie in [2, 6]");
  check(s.r >= 1.0, "schedule.r", "must be >= 1");
  check(s.p > 1.0, "schedule.p", "must be > 1");
  check(s.sigma >= 0.0, "schedule.sigma", "must be >= 0");
  check(s.T > 0.0, "schedule.T", "must be positive");
  check(s.alpha >= 0.0, "schedule.alpha", "must be >= 0 (0 selects the default)");
  check(!s.b || *s.b > 0.0, "schedule.b", "must be positive");
  check(!s.c || *s.c > 0.0, "schedule.c", "must be positive");
  check(s.N >= 1, "schedule.N", "must be >= 1");
  check(s.s_samples >= 1, "schedule.s_samples", "must be >= 1");
  for (std::size_t i = 0; i < s.s_grid.size(); ++i)
    check(s.s_grid[i] > 0.0 && s.s_grid[i] < 1.0, "schedule.s_grid[" + std::to_string(i) + "]",
          "must lie in (0, 1)");
  for (std::size_t i = 0; i < s.t_grid.size(); ++i)
    check(s.t_grid[i] >= 0.0, "schedule.t_grid[" + std::to_string(i) + "]", "must be >= 0");
  for (std::size_t i = 0; i < s.p_grid.size(); ++i)
    check(s.p_grid[i] > 1.0, "schedule.p_grid[" + std::to_string(i) + "]", "must be > 1");
  for (std::size_t i = 0; i < s.d_grid.size(); ++i)
    check(s.d_grid[i] >= 2 && s.d_grid[i] <= kMaxDim,
          "schedule.d_grid[" + std::to_string(i) + "]", "must lie in [2, 6]");
  const auto& t = c.truncated;
  check(t.N >= 1, "truncated.N", "must be >= 1");
  check(power_of_two(t.M), "truncated.M", "must be a power of two >= 4");
  check(power_of_two(t.base_M), "truncated.base_M", "must be a power of two >= 4");
  check(t.window_side > 0.0, "truncated.window_side", "must be positive");
  check(t.s > 0.0 && t.s < 1.0, "truncated.s", "must lie in (0, 1)");
  for (std::size_t i = 0; i < t.times.size(); ++i)
    check(t.times[i] >= 0.0, "truncated.times[" + std::to_string(i) + "]", "must be >= 0");
}

std::string real(double x) { return format_real(x); }

// ---------------------------------------------------------------- mixing

struct MixSetup {
  FlowMap flow;
  ScalarField datum;
  std::vector<double> times;
};

MixSetup mixing_setup(const ExperimentConfig& cfg) {
  const auto& m = cfg.mixer;
  ProtocolOptions opts;
  opts.d = cfg.d;
  opts.profile = m.profile;
  opts.seam = m.seam;
  opts.confined = m.confined;
  opts.refine_every = m.refine_every;
  const double total = m.steps * m.step_duration;
  FlowMap flow = build_mixing_protocol(m.seed, total, m.step_duration, m.amplitude, opts);
  Point c{};
  for (int i = 0; i < cfg.d; ++i) c[i] = 0.5;
  ScalarField datum = make_unit_dipole(Grid(cfg.d, cfg.M), c, m.datum_radius);
  std::vector<double> times;
  for (int j = 0; j <= m.steps; ++j) times.push_back(j * m.step_duration);
  return {std::move(flow), std::move(datum), std::move(times)};
}

ConstantsRequest constants_request(const ExperimentConfig& cfg, const std::vector<double>& times) {
  ConstantsRequest req;
  req.times = times;
  req.skip = static_cast<std::size_t>(cfg.mixer.skip);
  req.fit_order = 1.0;
  req.s_orders = {0.5};
  req.r_orders = {1.0, 2.0};
  req.p = 2.0;
  req.velocity_M = std::min(cfg.M, cfg.d == 2 ? 128 : 32);
  return req;
}

json fit_json(const RateEstimate& r) {
  return {{"rate", r.rate},
          {"log_prefactor", r.log_prefactor},
          {"r_squared", r.r_squared},
          {"t_min", r.t_min},
          {"t_max", r.t_max}};
}

json by_order(const std::map<double, double>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[format_real(k)] = v;
  return j;
}

json constants_json(const MixerConstants& k) {
  return {{"b", k.b},
          {"c", k.c},
          {"C0_hat", k.C0_hat},
          {"B_r", by_order(k.B_r)},
          {"C_hat_s", by_order(k.C_hat_s)},
          {"C_s", by_order(k.C_s)},
          {"mixing_fit", fit_json(k.mixing_fit)},
          {"velocity_fit", fit_json(k.velocity_fit)},
          {"b_fitted", k.b_fitted},
          {"window", {k.window_min, k.window_max}},
          {"seed", k.seed}};
}

json protocol_json(const FlowMap& f) {
  json steps = json::array();
  for (const auto& s : f.steps())
    steps.push_back({{"axis", s.axis},
                     {"transverse", s.transverse},
                     {"amplitude", s.amplitude},
                     {"phase", s.phase},
                     {"duration", s.duration},
                     {"profile", to_string(s.profile)},
                     {"wavenumber", s.wavenumber},
                     {"seam", s.seam}});
  return {{"seed", f.seed()}, {"confined", f.confined()}, {"steps", steps}};
}

MixerConstants measure_constants(const ExperimentConfig& cfg) {
  const MixSetup m = mixing_setup(cfg);
  return estimate_mixer_constants(m.flow, m.datum, constants_request(cfg, m.times));
}

void run_mix(const ExperimentConfig& cfg, ReportBundle& out) {
  const MixSetup m = mixing_setup(cfg);
  const auto req = constants_request(cfg, m.times);
  const MixerConstants k = estimate_mixer_constants(m.flow, m.datum, req);
  const std::vector<double> orders{-1.0, -0.5, 0.0, 0.5, 1.0};
  const auto series = mixing_norm_series(m.flow, m.datum, m.times, orders);
  for (const auto& r : series) out.norms.push_back({r.t, r.s, "multiplier", r.value});

  const double l20 = m.datum.l2_norm();
  double drift = 0.0;
  bool gronwall = true;
  double min_gap = HUGE_VAL;
  for (std::size_t i = 0; i < m.times.size(); ++i) {
    double l2 = 0, hm = 0, hp = 0;
    for (const auto& r : series) {
      if (r.t != m.times[i]) continue;
      if (r.s == 0.0) l2 = r.value;
      if (r.s == -1.0) hm = r.value;
      if (r.s == 1.0) hp = r.value;
    }
    drift = std::max(drift, std::abs(l2 - l20) / l20);
    if (hm > 0.0) {
      const double bound = gronwall_lower_bound(l2, hm);
      gronwall = gronwall && hp >= bound * (1 - 1e-9);
      min_gap = std::min(min_gap, (hp - bound) / bound);
    }
  }
  const bool flat = m.flow.moving_region() == std::nullopt;
  out.certificates["mixer"] = constants_json(k);
  out.certificates["protocol"] = protocol_json(m.flow);
  out.summary.push_back({"seed", std::to_string(cfg.mixer.seed)});
  out.summary.push_back({"c_fit", real(k.c)});
  out.summary.push_back({"b", real(k.b)});
  out.summary.push_back({"b_fitted", k.b_fitted ? "true" : "false"});
  out.summary.push_back({"rate_H-1", real(k.mixing_fit.rate)});
  out.summary.push_back({"r_squared", real(k.mixing_fit.r_squared)});
  out.summary.push_back({"C_s(0.5)", real(k.C_s_at(0.5))});
  out.summary.push_back({"l2_drift", real(drift)});
  if (std::isfinite(min_gap)) out.summary.push_back({"gronwall_min_rel_gap", real(min_gap)});
  if (flat) {
    out.checks.push_back({"flat_series", k.mixing_fit.rate == 0.0, "identity flow"});
  } else {
    out.checks.push_back({"mixing_rate_negative", k.mixing_fit.rate < 0.0, real(k.mixing_fit.rate)});
    out.checks.push_back({"fit_r2>=0.98", k.mixing_fit.r_squared >= 0.98,
                          real(k.mixing_fit.r_squared)});
  }
  out.checks.push_back({"gronwall_bound", gronwall, "H^1 >= ||rho||^2 / H^-1, rel tol 1e-9"});
}

void run_norms(const ExperimentConfig& cfg, ReportBundle& out) {
  const MixSetup m = mixing_setup(cfg);
  const bool gag = cfg.M <= cfg.norms.gagliardo_max_M;
  auto orders = cfg.norms.orders;
  std::sort(orders.begin(), orders.end());
  bool interp = true;
  for (double t : m.times) {
    const ScalarField rho = exact_solution_at(m.datum, m.flow, t);
    std::vector<double> mf(rho.values());
    for (double& v : mf) v -= rho.mean();
    const ScalarField centered(rho.grid(), std::move(mf));
    std::vector<NormValue> vals;
    for (double s : orders) {
      vals.push_back(hs_norm(s < 0.0 ? centered : rho, s));
      out.norms.push_back({t, s, "multiplier", vals.back().value});
    }
    if (gag)
      for (double s : cfg.norms.gagliardo_orders)
        out.norms.push_back({t, s, "gagliardo", gagliardo_seminorm(rho, s).value});
    for (std::size_t a = 0; a < vals.size(); ++a)
      for (std::size_t b = a + 1; b < vals.size(); ++b)
        for (std::size_t c = b + 1; c < vals.size(); ++c) {
          if (vals[a].infinite() || vals[c].infinite()) continue;
          const double bound = interpolation_bound(vals[a], vals[c], orders[b]);
          interp = interp && vals[b].value <= bound * (1 + 1e-10);
        }
  }
  out.summary.push_back({"samples", std::to_string(m.times.size())});
  out.summary.push_back({"gagliardo", gag ? "evaluated" : "skipped (M above gagliardo_max_M)"});
  out.checks.push_back({"interpolation_bound", interp, "all ordered triples, rel slack 1e-10"});
}

// --------------------------------------------------------- certificates

void add_cert(ReportBundle& out, const ConditionCertificate& c, Verdict expected, bool& ok) {
  out.certificates["certificates"].push_back(to_json(c));
  ok = ok && c.verdict == expected;
}

void run_certify_thm1(const ExperimentConfig& cfg, ReportBundle& out) {
  const auto& sc = cfg.schedule;
  double c = 0.0;
  if (sc.c) {
    c = *sc.c;
    out.summary.push_back({"c_source", "config"});
  } else {
    const MixerConstants k = measure_constants(cfg);
    c = k.c;
    out.certificates["mixer"] = constants_json(k);
    out.summary.push_back({"c_source", "measured, seed " + std::to_string(cfg.mixer.seed)});
  }
  require(c > 0.0, ErrorKind::invalid_parameter, "condition (D) needs a positive mixing rate c");
  out.summary.push_back({"c", real(c)});
  out.certificates["certificates"] = json::array();
  bool conv = true, div = true;
  for (int d : sc.d_grid) {
    const Schedule sch = theorem1_schedule(d);
    ConditionParams k;
    k.d = d;
    k.c = c;
    add_cert(out, evaluate_condition(sch, ConditionId::A, k), Verdict::convergent, conv);
    for (double p : sc.p_grid) {
      k.p = p;
      add_cert(out, evaluate_condition(sch, ConditionId::B_hat, k), Verdict::convergent, conv);
    }
    k.p = 2.0;
    add_cert(out, evaluate_condition(sch, ConditionId::B_tilde, k), Verdict::convergent, conv);
    for (double sigma : sc.sigma_grid) {
      k.sigma = sigma;
      add_cert(out, evaluate_condition(sch, ConditionId::C, k), Verdict::convergent, conv);
    }
    k.sigma = 1.0;
    add_cert(out, evaluate_condition(sch, ConditionId::C_tilde, k), Verdict::convergent, conv);
    for (double s : sc.s_grid)
      for (double t : sc.t_grid) {
        k.s = s;
        k.t = t;
        add_cert(out, evaluate_condition(sch, ConditionId::D, k),
                 t > 0.0 ? Verdict::divergent : Verdict::convergent, div);
      }
  }
  out.summary.push_back(
      {"certificates", std::to_string(out.certificates["certificates"].size())});
  out.checks.push_back({"A_Bhat_Btilde_C_Ctilde_convergent", conv, "exact classifier"});
  out.checks.push_back({"D_divergent_for_t>0", div, "exact classifier"});
}

void run_certify_thm2(const ExperimentConfig& cfg, ReportBundle& out) {
  const auto& sc = cfg.schedule;
  double b = 0.0, c = 0.0;
  if (sc.b && sc.c) {
    b = *sc.b;
    c = *sc.c;
    out.summary.push_back({"rates_source", "config"});
  } else {
    const MixerConstants k = measure_constants(cfg);
    b = sc.b.value_or(k.b);
    c = sc.c.value_or(k.c);
    out.certificates["mixer"] = constants_json(k);
    out.summary.push_back({"rates_source", "measured, seed " + std::to_string(cfg.mixer.seed)});
  }
  ConstructionParams in;
  in.d = sc.d;
  in.r = sc.r;
  in.p = sc.p;
  in.sigma = sc.sigma;
  in.T = sc.T;
  in.alpha = sc.alpha;
  const Schedule sch = theorem2_schedule(in, b, c);
  const ConstructionParams& k = *sch.params;
  out.certificates["params"] = {{"d", k.d},     {"r", k.r},       {"p", k.p},
                                {"sigma", k.sigma}, {"T", k.T},   {"alpha", k.alpha},
                                {"beta", k.beta}, {"mu_bar", k.mu_bar}, {"b", k.b},
                                {"c", k.c}};
  out.certificates["certificates"] = json::array();
  ConditionParams cp;
  cp.d = k.d;
  cp.r = k.r;
  cp.p = k.p;
  cp.sigma = k.sigma;
  cp.b = b;
  cp.c = c;
  cp.t = k.T;
  bool conv = true;
  add_cert(out, evaluate_condition(sch, ConditionId::A, cp), Verdict::convergent, conv);
  add_cert(out, evaluate_condition(sch, ConditionId::B, cp), Verdict::convergent, conv);
  add_cert(out, evaluate_condition(sch, ConditionId::B_tilde, cp), Verdict::convergent, conv);
  add_cert(out, evaluate_condition(sch, ConditionId::C, cp), Verdict::convergent, conv);
  add_cert(out, evaluate_condition(sch, ConditionId::C_hat, cp), Verdict::convergent, conv);

  const double thr = divergence_threshold(k.alpha, c);
  int agree_bt = 0, agree_mu = 0;
  std::vector<std::string> rows;
  for (int i = 0; i < sc.s_samples; ++i) {
    const double s = k.sigma * (i + 0.5) / sc.s_samples;
    cp.s = s;
    const auto dcert = evaluate_condition(sch, ConditionId::D, cp);
    out.certificates["certificates"].push_back(to_json(dcert));
    const bool diverges = dcert.verdict == Verdict::divergent;
    const bool early = blowup_time(s, k.sigma, k.alpha, c, k.T) < k.T;
    const bool above_thr = s / k.sigma > thr;
    agree_bt += (diverges == early && early == above_thr);
    // Best admissible alpha: blow-up by T is reachable iff s / sigma > mu_bar.
    const auto a = admissible_alpha_for_blowup(k, s);
    bool witnessed = false;
    if (a) {
      const ConstructionParams ka =
          construction_params(k.d, k.r, k.p, k.sigma, k.T, b, c, *a);
      const Schedule sa = theorem2_schedule(ka, b, c);
      witnessed = evaluate_condition(sa, ConditionId::D, cp).verdict == Verdict::divergent &&
                  evaluate_condition(sa, ConditionId::B, cp).verdict == Verdict::convergent &&
                  blowup_time(s, k.sigma, *a, c, k.T) < k.T;
    }
    agree_mu += (witnessed == (s / k.sigma > k.mu_bar));
    rows.push_back(real(s) + "," + real(k.T) + "," + dcert.verdict_label() + "," +
                   (early ? "1" : "0") + "," + (witnessed ? "1" : "0"));
  }
  out.tables.push_back({"sweep.csv", {"s,t,verdict,blowup_before_T,admissible_alpha", rows}});
  out.summary.push_back({"beta", real(k.beta)});
  out.summary.push_back({"alpha", real(k.alpha)});
  out.summary.push_back({"mu_bar", real(k.mu_bar)});
  out.summary.push_back({"threshold_at_alpha", real(thr)});
  out.checks.push_back({"A_B_Btilde_C_Chat_convergent", conv, "exact classifier"});
  out.checks.push_back({"D_vs_blowup_time", agree_bt == sc.s_samples,
                        std::to_string(agree_bt) + "/" + std::to_string(sc.s_samples)});
  out.checks.push_back({"D_vs_mu_bar", agree_mu == sc.s_samples,
                        std::to_string(agree_mu) + "/" + std::to_string(sc.s_samples)});
}

// ------------------------------------------------------ lower-bound sweep

void run_sweep(const ExperimentConfig& cfg, ReportBundle& out) {
  const auto& sc = cfg.schedule;
  const MixerConstants k = measure_constants(cfg);
  out.certificates["mixer"] = constants_json(k);
  const int d = cfg.d;
  const Schedule sch = theorem1_schedule(d);
  std::vector<std::string> rows;
  for (double t : sc.t_grid) {
    const double s = 0.5;
    const long n_max = t > 0.0 ? sc.N : std::max(sc.N, 100L);
    const auto sums = hs_lower_bound_partial_sums(sch, s, t, n_max, k, d);
    long first = -1;
    bool mono = true;
    for (long n = 1; n <= n_max; ++n) {
      const long double v = sums[n - 1];
      rows.push_back(real(s) + "," + real(t) + "," + std::to_string(n) + "," +
                     real(static_cast<double>(v)));
      if (n > 1 && v < sums[n - 2]) mono = false;
      if (first < 0 && v > sc.target) first = n;
    }
    const std::string tag = "t=" + real(t);
    if (t > 0.0) {
      out.summary.push_back({"first_N_above_target(" + tag + ")",
                             first < 0 ? "none" : std::to_string(first)});
      out.checks.push_back({"monotone(" + tag + ")", mono, ""});
      out.checks.push_back({"exceeds_target(" + tag + ")", first > 0 && first <= sc.N,
                            first < 0 ? "none" : std::to_string(first)});
    } else {
      const long double a = sums[49], b = sums[99];
      const double rel = static_cast<double>(std::abs(b - a) / std::max(std::abs(b), 1e-300L));
      out.summary.push_back({"converged_rel_change(" + tag + ")", real(rel)});
      out.checks.push_back({"bounded(" + tag + ")", rel <= 1e-12, real(rel)});
    }
  }
  out.tables.push_back({"sweep.csv", {"s,t,N,partial_sum", rows}});
  out.summary.push_back({"c", real(k.c)});
  out.summary.push_back({"C_s(0.5)", real(k.C_s_at(0.5))});
  out.summary.push_back({"C0_hat", real(k.C0_hat)});
}

// ---------------------------------------------------- truncated solution

void run_truncated(const ExperimentConfig& cfg, ReportBundle& out) {
  const auto& tc = cfg.truncated;
  const int d = 2;
  const Schedule sch = theorem1_schedule(d);
  double tmax = 0.0;
  for (double t : tc.times) tmax = std::max(tmax, t);
  const double span = std::max(tmax / sch.tau_at(tc.N), cfg.mixer.step_duration);
  ProtocolOptions opts;
  opts.d = d;
  opts.profile = cfg.mixer.profile;
  opts.seam = cfg.mixer.seam;
  opts.confined = true;
  const FlowMap flow = build_mixing_protocol(cfg.mixer.seed, span, cfg.mixer.step_duration,
                                             cfg.mixer.amplitude, opts);
  Point c{};
  c[0] = c[1] = 0.5;
  const ScalarField datum = make_unit_dipole(Grid(d, tc.base_M), c, cfg.mixer.datum_radius);
  Point wc{};
  wc[0] = tc.window_start + 0.5 * tc.window_side;
  const Cube window(d, wc, tc.window_side);
  const Grid grid = grid_covering(window, tc.M);
  bool ortho = true, disjoint = true;
  for (double t : tc.times) {
    const ScalarField theta = evaluate_truncated_solution(sch, flow, datum, tc.N, t, window, grid);
    const double measured = hs_norm(theta, tc.s).value;
    std::vector<OrthogonalPiece> pieces;
    std::vector<ScalarField> fields;
    for (long n = 1; n <= tc.N; ++n) {
      const PieceSpec p = make_piece(sch, n);
      fields.push_back(evaluate_piece(p, flow, datum, t, grid));
      const double hs = hs_norm(fields.back(), tc.s).value;
      const double l2 = fields.back().l2_norm();
      pieces.push_back({hs * hs, l2 * l2, p.lambda});
    }
    for (std::size_t a = 0; a < fields.size(); ++a)
      for (std::size_t b = a + 1; b < fields.size(); ++b)
        for (std::size_t n = 0; n < grid.size(); ++n)
          disjoint = disjoint && fields[a][n] * fields[b][n] == 0.0;
    const double bound = orthogonality_lower_bound(pieces, tc.s, d);
    ortho = ortho && measured * measured >= bound;
    out.norms.push_back({t, tc.s, "multiplier", measured});
    out.certificates["truncated"].push_back(
        {{"t", t}, {"hs_sq", measured * measured}, {"orthogonality_bound", bound}});
  }
  out.summary.push_back({"N", std::to_string(tc.N)});
  out.summary.push_back({"M", std::to_string(tc.M)});
  out.summary.push_back({"window", "[" + real(window.box().lo[0]) + ", " +
                                       real(window.box().hi[0]) + "] x [" +
                                       real(window.box().lo[1]) + ", " +
                                       real(window.box().hi[1]) + "]"});
  out.checks.push_back({"orthogonality_bound", ortho, "||theta_N||^2 >= assembled bound"});
  out.checks.push_back({"disjoint_pieces", disjoint, "pointwise products vanish"});
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot open " + p.string() + " for writing");
  os << content;
  if (!os) throw Error(ErrorKind::io, "write failed for " + p.string());
}

}  // namespace

const char* to_string(Mode m) {
  for (const auto& [k, v] : kModes)
    if (k == m) return v;
  return "?";
}

Mode mode_from_string(const std::string& s) {
  for (const auto& [k, v] : kModes)
    if (s == v) return k;
  throw Error(ErrorKind::schema, "mode: unknown mode '" + s + "'");
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Reader r(j, "");
  std::string mode = to_string(c.mode);
  r.get("mode", mode);
  try {
    c.mode = mode_from_string(mode);
  } catch (const Error&) {
    Reader::fail("mode", "unknown mode '" + mode + "'");
  }
  r.get("d", c.d);
  r.get("M", c.M);
  r.get("threads", c.threads);
  r.get("out_dir", c.out_dir);
  if (c.d == 3 && !j.contains("M")) c.M = 64;
  if (const json* m = r.child("mixer")) {
    Reader q(*m, "mixer");
    q.get("seed", c.mixer.seed);
    q.get("amplitude", c.mixer.amplitude);
    q.get("step_duration", c.mixer.step_duration);
    q.get("steps", c.mixer.steps);
    std::string prof = to_string(c.mixer.profile);
    q.get("profile", prof);
    try {
      c.mixer.profile = shear_profile_from_string(prof);
    } catch (const Error&) {
      Reader::fail("mixer.profile", "unknown profile '" + prof + "'");
    }
    q.get("seam", c.mixer.seam);
    q.get("confined", c.mixer.confined);
    q.get("datum_radius", c.mixer.datum_radius);
    q.get("refine_every", c.mixer.refine_every);
    q.get("skip", c.mixer.skip);
    q.done();
  }
  if (const json* m = r.child("norms")) {
    Reader q(*m, "norms");
    q.get("orders", c.norms.orders);
    q.get("gagliardo_orders", c.norms.gagliardo_orders);
    q.get("gagliardo_max_M", c.norms.gagliardo_max_M);
    q.done();
  }
  if (const json* m = r.child("schedule")) {
    Reader q(*m, "schedule");
    auto& s = c.schedule;
    q.get("d", s.d);
    q.get("r", s.r);
    q.get("p", s.p);
    q.get("sigma", s.sigma);
    q.get("T", s.T);
    q.get("alpha", s.alpha);
    q.get("b", s.b);
    q.get("c", s.c);
    q.get("s_grid", s.s_grid);
    q.get("t_grid", s.t_grid);
    q.get("p_grid", s.p_grid);
    q.get("sigma_grid", s.sigma_grid);
    q.get("d_grid", s.d_grid);
    q.get("s_samples", s.s_samples);
    q.get("N", s.N);
    q.get("target", s.target);
    q.done();
  }
  if (const json* m = r.child("truncated")) {
    Reader q(*m, "truncated");
    auto& t = c.truncated;
    q.get("N", t.N);
    q.get("M", t.M);
    q.get("base_M", t.base_M);
    q.get("window_side", t.window_side);
    q.get("window_start", t.window_start);
    q.get("times", t.times);
    q.get("s", t.s);
    q.done();
  }
  r.done();
  // The sweep targets the bounded t = 0 case and growth at t = 0.1.
  const json* sched = j.contains("schedule") ? &j.at("schedule") : nullptr;
  if (c.mode == Mode::lower_bound_sweep && !(sched && sched->contains("t_grid")))
    c.schedule.t_grid = {0.0, 0.1};
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json s = {{"d", c.schedule.d},
            {"r", c.schedule.r},
            {"p", c.schedule.p},
            {"sigma", c.schedule.sigma},
            {"T", c.schedule.T},
            {"alpha", c.schedule.alpha},
            {"b", c.schedule.b ? json(*c.schedule.b) : json(nullptr)},
            {"c", c.schedule.c ? json(*c.schedule.c) : json(nullptr)},
            {"s_grid", c.schedule.s_grid},
            {"t_grid", c.schedule.t_grid},
            {"p_grid", c.schedule.p_grid},
            {"sigma_grid", c.schedule.sigma_grid},
            {"d_grid", c.schedule.d_grid},
            {"s_samples", c.schedule.s_samples},
            {"N", c.schedule.N},
            {"target", c.schedule.target}};
  return {{"mode", to_string(c.mode)},
          {"d", c.d},
          {"M", c.M},
          {"threads", c.threads},
          {"out_dir", c.out_dir},
          {"mixer",
           {{"seed", c.mixer.seed},
            {"amplitude", c.mixer.amplitude},
            {"step_duration", c.mixer.step_duration},
            {"steps", c.mixer.steps},
            {"profile", to_string(c.mixer.profile)},
            {"seam", c.mixer.seam},
            {"confined", c.mixer.confined},
            {"datum_radius", c.mixer.datum_radius},
            {"refine_every", c.mixer.refine_every},
            {"skip", c.mixer.skip}}},
          {"norms",
           {{"orders", c.norms.orders},
            {"gagliardo_orders", c.norms.gagliardo_orders},
            {"gagliardo_max_M", c.norms.gagliardo_max_M}}},
          {"schedule", s},
          {"truncated",
           {{"N", c.truncated.N},
            {"M", c.truncated.M},
            {"base_M", c.truncated.base_M},
            {"window_side", c.truncated.window_side},
            {"window_start", c.truncated.window_start},
            {"times", c.truncated.times},
            {"s", c.truncated.s}}}};
}

bool ReportBundle::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

ReportBundle run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  set_thread_count(cfg.threads);
  ReportBundle out;
  out.mode = to_string(cfg.mode);
  out.certificates["certificates"] = json::array();
  switch (cfg.mode) {
    case Mode::mix:
      run_mix(cfg, out);
      break;
    case Mode::norms:
      run_norms(cfg, out);
      break;
    case Mode::certify_thm1:
      run_certify_thm1(cfg, out);
      break;
    case Mode::certify_thm2:
      run_certify_thm2(cfg, out);
      break;
    case Mode::lower_bound_sweep:
      run_sweep(cfg, out);
      break;
    case Mode::truncated_solution:
      run_truncated(cfg, out);
      break;
  }
  return out;
}

std::string render_norms_csv(const ReportBundle& b) {
  std::ostringstream os;
  os << "t,order,method,value\n";
  for (const auto& r : b.norms)
    os << real(r.t) << ',' << real(r.order) << ',' << r.method << ',' << real(r.value) << '\n';
  return os.str();
}

std::string render_certificates(const ReportBundle& b) {
  json j = b.certificates;
  if (!j.contains("certificates")) j["certificates"] = json::array();
  return dump_json(j);
}

std::string render_summary(const ReportBundle& b) {
  std::ostringstream os;
  os << "mode: " << (b.mode.empty() ? "none" : b.mode) << '\n';
  for (const auto& [k, v] : b.summary) os << k << ": " << v << '\n';
  for (const auto& c : b.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) os << " (" << c.detail << ')';
    os << '\n';
  }
  os << "overall: " << (b.all_pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::vector<std::string> emit_report(const ReportBundle& b, ReportFormat format,
                                     const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create directory " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    const fs::path p = fs::path(dir) / name;
    write_file(p, content);
    written.push_back(p.string());
  };
  switch (format) {
    case ReportFormat::csv:
      put("norms.csv", render_norms_csv(b));
      for (const auto& [name, table] : b.tables) {
        std::string s = table.first + "\n";
        for (const auto& row : table.second) s += row + "\n";
        put(name, s);
      }
      break;
    case ReportFormat::json:
      put("certificates.json", render_certificates(b));
      break;
    case ReportFormat::summary_text:
      put("summary.txt", render_summary(b));
      break;
  }
  return written;
}

}  // namespace regloss
