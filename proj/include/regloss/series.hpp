#pragma once

#include <span>
#include <string>
#include <vector>

namespace regloss {

// term(n) = c * n^k * exp(sum_j q[j-1] * n^j), n >= n0.
struct ExpPolySeries {
  double c = 1.0;
  double k = 0.0;
  std::vector<double> q;
  long n0 = 1;

  long double log_abs_term(long n) const;
  long double term(long n) const;
  int degree() const;  // highest j with q_j != 0, 0 if none
  bool operator==(const ExpPolySeries& o) const = default;
};

// exp(coef * n^degree) as a series factor.
ExpPolySeries exp_monomial(double coef, int degree, long n0 = 1);

enum class Verdict { convergent, divergent };
const char* to_string(Verdict v);

struct Classification {
  Verdict verdict;
  std::string reason;
};

// Convergence of sum term(n).
Classification classify(const ExpPolySeries& s);
// Boundedness of the sequence term(n); convergent <-> bounded.
Classification classify_sequence(const ExpPolySeries& s);

struct PartialSum {
  long double value = 0.0L;
  bool saturated = false;  // overflow: +inf divergence witness
};

PartialSum partial_sum(const ExpPolySeries& s, long N);

ExpPolySeries product_and_power(std::span<const ExpPolySeries> series,
                                std::span<const double> exponents);

}  // namespace regloss
