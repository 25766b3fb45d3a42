#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "turbogp/fft.hpp"
#include "turbogp/grid.hpp"
#include "turbogp/spectral_density.hpp"

namespace turbogp {

/// Real field sampled on the grid nodes (vorticity, stream function or a
/// velocity component).
class RealField {
public:
    explicit RealField(GridSpec grid);
    RealField(GridSpec grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double operator[](std::size_t linear) const { return values_[linear]; }
    double& operator[](std::size_t linear) { return values_[linear]; }
    double at(GridPoint p) const { return values_[grid_.index(p)]; }

    double mean() const;
    /// Population variance about the grid mean.
    double variance() const;
    /// Root mean square of the raw values (no mean removal).
    double rms() const;

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// Fourier coefficients of a field in DFT layout (see GridSpec).
class SpectralField {
public:
    explicit SpectralField(GridSpec grid);
    SpectralField(GridSpec grid, std::vector<std::complex<double>> coeffs);

    const GridSpec& grid() const { return grid_; }
    std::span<const std::complex<double>> coeffs() const { return coeffs_; }
    std::span<std::complex<double>> coeffs() { return coeffs_; }

    std::complex<double> coeff(WaveVector n) const { return coeffs_[grid_.spectral_index(n)]; }
    std::complex<double>& coeff(WaveVector n) { return coeffs_[grid_.spectral_index(n)]; }

    /// Largest |c(-n) - conj(c(n))| over the grid.
    double hermitian_defect() const;

private:
    GridSpec grid_;
    std::vector<std::complex<double>> coeffs_;
};

SpectralField to_spectral(const RealField& field);

/// Inverse transform. Drops the imaginary part, which vanishes up to
/// rounding when the input is Hermitian.
RealField to_physical(const SpectralField& field);

/// Inverse transform keeping the complex values, for checking reality.
std::vector<std::complex<double>> to_physical_complex(const SpectralField& field);

/// Draws one field from the Gaussian measure with coefficient variances
/// density(n): independent complex normals on a half lattice, mirrored to
/// enforce c(-n) = conj(c(n)). Modes outside the density's truncation and
/// the zero mode are left at zero.
SpectralField sample_gaussian_coefficients(const SpectralDensity& density, const GridSpec& grid,
                                           std::uint64_t seed);
RealField sample_gaussian_field(const SpectralDensity& density, const GridSpec& grid, std::uint64_t seed);

struct VelocityField {
    RealField u1;
    RealField u2;
};

struct SpectralVelocity {
    SpectralField u1;
    SpectralField u2;
};

/// Biot-Savart in Fourier space: u_hat(n) = -i n_perp w_hat(n) / |n|^2 with
/// n_perp = (-n2, n1), so that d1 u2 - d2 u1 = w.
///
/// The stream-function coefficient w_hat/|n|^2 is rounded to
/// 53 - 2 * bits(N/2) significant bits before multiplying by the wave
/// numbers. Every product n_a * n_b * psi_hat is then exact in double
/// precision and n . u_hat(n) evaluates to exactly zero on every mode.
/// Nyquist rows and columns carry no velocity (their derivative vanishes on
/// the grid). Throws InvalidArgument if the zero mode is not zero.
SpectralVelocity biot_savart_spectral(const SpectralField& vorticity);
VelocityField biot_savart(const SpectralField& vorticity);

/// Spectral curl d1 u2 - d2 u1 of a velocity field.
RealField curl(const RealField& u1, const RealField& u2);

/// Largest |n . u_hat(n)| over all modes; exactly zero for biot_savart output.
double max_spectral_divergence(const SpectralVelocity& velocity);

/// One radial shell of a spectrum estimate.
struct SpectrumShell {
    int k = 0;
    double shell_avg_power = 0.0;
    double shell_sum_power = 0.0;
    int mode_count = 0;
};

/// Shells k = 1 .. N/2 - 1; every mode n != 0 goes to shell round(|n|).
struct SpectrumEstimate {
    std::vector<SpectrumShell> shells;
    const SpectrumShell& shell(int k) const { return shells.at(std::size_t(k - 1)); }
    int max_shell() const { return int(shells.size()); }
};

SpectrumEstimate radial_spectrum(const SpectralField& field);
SpectrumEstimate radial_spectrum(const RealField& field);

/// Shell-wise mean of several estimates taken on the same grid.
SpectrumEstimate average_spectra(std::span<const SpectrumEstimate> spectra);

struct PowerLawFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double intercept = 0.0;
    int k_min = 0;
    int k_max = 0;
    double r_squared = 0.0;
};

/// Ordinary least squares of log(power) on log(k) over k_min..k_max, using
/// shell sums when use_sum is true and shell averages otherwise.
PowerLawFit fit_power_law(const SpectrumEstimate& spectrum, int k_min, int k_max, bool use_sum);

/// Default fit window k in [4, N/4].
inline int default_fit_k_min(const GridSpec&) { return 4; }
inline int default_fit_k_max(const GridSpec& grid) { return grid.n() / 4; }

}  // namespace turbogp
