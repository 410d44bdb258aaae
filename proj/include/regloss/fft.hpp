#pragma once

#include <complex>
#include <vector>

#include "regloss/grid.hpp"

namespace regloss::spectral {

using cplx = std::complex<double>;

// Unnormalized d-dimensional DFTs (FFTW backed). backward(forward(f)) = M^d f.
std::vector<cplx> forward(const Grid& g, const std::vector<double>& values);
std::vector<cplx> forward(const Grid& g, std::vector<cplx> values);
std::vector<cplx> backward(const Grid& g, std::vector<cplx> values);

// Signed wavenumber of DFT index j, in [-M/2, M/2).
inline int wavenumber(int j, int M) { return j < M / 2 ? j : j - M; }

// Angular frequency vector xi_k = 2 pi k / L of the mode stored at `flat`.
Point frequency(const Grid& g, std::size_t flat);

// |xi_k|^2 for every stored mode.
std::vector<double> frequency_squared(const Grid& g);

// Coefficients c_k normalized so that sum |c_k|^2 equals the grid L2 norm squared.
std::vector<cplx> coefficients(const Grid& g, const std::vector<double>& values);

// Real part of the inverse transform of m(xi) * f_hat, m real.
std::vector<double> apply_real_multiplier(const Grid& g, const std::vector<double>& values,
                                          const std::vector<double>& multiplier);

// Spectral partial derivative along one axis (the Nyquist mode is dropped).
std::vector<double> derivative(const Grid& g, const std::vector<double>& values, int axis);

}  // namespace regloss::spectral
