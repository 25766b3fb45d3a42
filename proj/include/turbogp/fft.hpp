#pragma once

#include <complex>
#include <span>
#include <vector>

#include "turbogp/grid.hpp"

namespace turbogp {

/// Discrete Fourier transform contract shared by every module.
///
///   inverse:  f(x_j) = sum_n c(n) exp(+i n . x_j)
///   forward:  c(n)   = N^-2 sum_j f(x_j) exp(-i n . x_j)
///
/// With this pair the grid mean of |f|^2 equals sum_n |c(n)|^2, so a
/// coefficient of variance E|c(n)|^2 = D(n) adds exactly
/// kCoefficientVarianceScale * D(n) to the pointwise variance of f. The
/// grid quadrature of f^2 is therefore (2 pi)^2 sum_n |c(n)|^2.
inline constexpr double kCoefficientVarianceScale = 1.0;

namespace dft {

using Complex = std::complex<double>;

/// Both spans must hold grid.size() values in the layout of GridSpec.
void forward(const GridSpec& grid, std::span<const Complex> in, std::span<Complex> out);
void inverse(const GridSpec& grid, std::span<const Complex> in, std::span<Complex> out);

/// Inverse transform of a real, even coefficient array (e.g. a spectral
/// density laid out in DFT order). The imaginary part of the result is
/// dropped; for even input it is rounding noise.
std::vector<double> inverse_even(const GridSpec& grid, std::span<const double> coefficients);

}  // namespace dft
}  // namespace turbogp
