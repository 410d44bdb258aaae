#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regloss/grid.hpp"
#include "regloss/series.hpp"

namespace regloss {

struct ConstructionParams {
  int d = 3;
  double r = 2.0;
  double p = 2.0;
  double sigma = 1.0;
  double T = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double mu_bar = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// lambda_n (space), tau_n (time), gamma_n (amplitude) in exp-polynomial form,
// with cubes accumulating at `accumulation` along axis 0.
struct Schedule {
  std::string name;
  int d = 2;
  ExpPolySeries lambda;
  ExpPolySeries tau;
  ExpPolySeries gamma;
  Point accumulation{};
  std::optional<ConstructionParams> params;

  double lambda_at(long n) const;
  double tau_at(long n) const;
  double gamma_at(long n) const;
};

// tau = n^-3, lambda = e^-n, gamma = e^-n^2.
Schedule theorem1_schedule(int d = 2);

// Fills beta, mu_bar and (when alpha <= 0) the default alpha = 2 (r-1) b / beta.
// Needs r > 1 and p < d / (r - 1).
ConstructionParams construction_params(int d, double r, double p, double sigma, double T,
                                       double b, double c, double alpha = 0.0);

// tau = 1/n, lambda = exp(-alpha T n), gamma = n^-2 exp(alpha (d/2 - sigma) T n).
Schedule theorem2_schedule(const ConstructionParams& params, double b, double c);

// Threshold on s/sigma above which (D) diverges at t = T for a given alpha.
double divergence_threshold(double alpha, double c);

// An alpha satisfying alpha beta > (r-1) b for which (D) diverges at t = T,
// or nothing when no admissible alpha exists (s/sigma <= mu_bar).
std::optional<double> admissible_alpha_for_blowup(const ConstructionParams& params, double s);

struct PieceSpec {
  long n = 1;
  int d = 2;
  double lambda = 1.0;
  double tau = 1.0;
  double gamma = 1.0;
  Point center{};

  Cube cube() const;  // Q_n, side 3 lambda
  Cube cell() const;  // support cell, side lambda
};

PieceSpec make_piece(const Schedule& schedule, long n);

// sum_{m > n} term(m); p-series tails use the integral bound past a cutoff.
double tail_sum(const ExpPolySeries& s, long n);

// First N cubes Q_n along axis 0, accumulating at the schedule's point.
// Q_n spans [a_n, a_n + 3 lambda_n] with a_n = sum_{m > n} (l_m + g_m),
// l_m = 3 lambda_m, g_m = sup_{j >= m} l_j.
std::vector<Cube> place_cubes(const Schedule& schedule, long N);

}  // namespace regloss
