#pragma once

#include <span>
#include <string>

#include "regloss/field.hpp"

namespace regloss {

struct SobolevIndex {
  double s = 0.0;
  double p = 2.0;
};

enum class NormMethod { multiplier, gagliardo };
const char* to_string(NormMethod m);

struct NormValue {
  double value = 0.0;  // +inf is the distinguished infinite-norm signal
  SobolevIndex index;
  NormMethod method = NormMethod::multiplier;

  bool infinite() const;
};

// Relative size of the zero mode (|mean| / RMS) tolerated by negative orders.
inline constexpr double kZeroModeTolerance = 1e-9;

// (sum_{k != 0} |xi_k|^{2s} |c_k|^2)^{1/2}; the zero mode counts only at s = 0.
NormValue hs_norm(const ScalarField& f, double s, double zero_mode_tol = kZeroModeTolerance);

// Grid L^p norm of F^{-1}(|xi|^s f_hat); vector fields combine components in l2.
NormValue wsp_norm(const ScalarField& f, double s, double p);
NormValue wsp_norm(const VectorField& u, double s, double p);

// Direct pair sum of |f(x) - f(y)|^2 K(x - y) h^{2d}, with K the periodized
// kernel |z|^{-d-2s} summed over lattice images, plus a near-diagonal
// correction for the skipped x = y pairs.
NormValue gagliardo_seminorm(const ScalarField& f, double s);

// Same double sum restricted to pairs with both points in `region`.
NormValue gagliardo_seminorm_restricted(const ScalarField& f, double s, const Box& region);

// [f]^2_gagliardo / ||f||^2_{H^s} on R^d: 2 / C(d, s) with C(d, s) the
// fractional Laplacian normalization constant.
double gagliardo_multiplier_ratio_sq(int d, double s);

NormValue rescaled_norm(const NormValue& base, double lam, int d);

double interpolation_bound(const NormValue& n1, const NormValue& n2, double s);

// |S^{d-1}|
double sphere_area(int d);

struct OrthogonalPiece {
  double hs_sq;
  double l2_sq;
  double lam;
};

double orthogonality_lower_bound(std::span<const OrthogonalPiece> pieces, double s, int d);

}  // namespace regloss
