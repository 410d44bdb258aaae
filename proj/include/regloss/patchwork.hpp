#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "regloss/field.hpp"
#include "regloss/mixing.hpp"
#include "regloss/schedule.hpp"
#include "regloss/series.hpp"

namespace regloss {

enum class ConditionId { A, B, B_tilde, B_hat, C, C_tilde, C_hat, D };
const char* to_string(ConditionId id);
ConditionId condition_from_string(const std::string& s);
// B-tilde and C-tilde bound a sequence; the others sum a series.
bool is_sequence_condition(ConditionId id);

struct ConditionParams {
  int d = 2;
  double s = 0.5;
  double t = 0.0;
  double r = 1.0;
  double p = 2.0;
  double sigma = 1.0;
  double b = 0.0;
  double c = 0.0;
  bool operator==(const ConditionParams&) const = default;
};

struct ConditionCertificate {
  ConditionId id = ConditionId::A;
  Verdict verdict = Verdict::convergent;
  ExpPolySeries series;
  ConditionParams params;
  std::string reason;

  // "convergent"/"divergent", or "bounded"/"unbounded" for sequence conditions.
  std::string verdict_label() const;
};

// Terms:
//   A        lambda
//   B        lambda^{1-r+d/p} / tau * exp((r-1) b t / tau)
//   B-tilde  lambda / tau                       (sequence)
//   B-hat    lambda^{d/p} / tau
//   C        gamma lambda^{d/2-sigma}
//   C-tilde  gamma                              (sequence)
//   C-hat    gamma lambda^{d/2}
//   D        gamma^2 lambda^{d-2s} exp(2 s c t / tau)
// exp(K / tau) with K != 0 needs tau = c n^-m, else unsupported-schedule.
ConditionCertificate evaluate_condition(const Schedule& schedule, ConditionId id,
                                        const ConditionParams& params);

nlohmann::json to_json(const ExpPolySeries& s);
ExpPolySeries series_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ConditionCertificate& c);
ConditionCertificate certificate_from_json(const nlohmann::json& j);
// Recomputes the certificate from its params; true when series and verdict match.
bool revalidate(const ConditionCertificate& c, const Schedule& schedule);

// (sigma - s) alpha T / (s c) for s <= sigma, 0 for s > sigma.
double blowup_time(double s, double sigma, double alpha, double c, double T);

// sum_{n <= N} gamma_n^2 lambda_n^{d-2s} [C_s^2 exp(2 s c t / tau_n) - C_d C0_hat^2 / s]
double hs_lower_bound_series(const Schedule& schedule, double s, double t, long N,
                             const MixerConstants& constants, int d);
// Partial sums for N = 1..N_max.
std::vector<long double> hs_lower_bound_partial_sums(const Schedule& schedule, double s, double t,
                                                     long N_max, const MixerConstants& constants,
                                                     int d);

// gamma * rho_bar(X^{-1}(t / tau, (x - center) / lambda + 1/2)) on the piece's
// cell, 0 elsewhere. rho_bar lives on the unit torus grid.
ScalarField evaluate_piece(const PieceSpec& piece, const FlowMap& base_flow,
                           const ScalarField& base_datum, double t, const Grid& grid);

// theta_N(t) = sum of pieces 1..N on the window grid. The window must not
// contain the accumulation point and every piece cell must fit inside it.
ScalarField evaluate_truncated_solution(const Schedule& schedule, const FlowMap& base_flow,
                                        const ScalarField& base_datum, long N, double t,
                                        const Cube& window, const Grid& grid);

}  // namespace regloss
