#pragma once

#include <functional>
#include <vector>

#include "turbogp/grid.hpp"

namespace turbogp {

/// True when n lies in the spectral truncation of radius M: 0 < |n| <= M,
/// minus the four axis points (+-M, 0) and (0, +-M). On a grid with N = 2M
/// those four points alias onto the self-conjugate Nyquist modes, which a
/// real field cannot differentiate, so they are excluded everywhere.
bool in_truncation(WaveVector n, int truncation);

/// Isotropic spectral density n -> S(|n|) with S(0) = 0, restricted to a
/// truncation and carrying the constant that normalizes it to a target
/// marginal variance.
class SpectralDensity {
public:
    /// Unnormalized radial profile k -> S(k), called only with k > 0.
    using Profile = std::function<double(double)>;

    SpectralDensity(Profile profile, int truncation, double normalization);

    /// Builds the density with normalization chosen so that the sum over the
    /// truncation equals `variance`. Throws InvalidArgument if that sum is
    /// not positive and finite.
    static SpectralDensity normalized(Profile profile, int truncation, double variance);

    /// S(|n|) without normalization or truncation; 0 at n = 0.
    double unnormalized(WaveVector n) const;
    /// Normalized coefficient variance at n; 0 outside the truncation.
    double operator()(WaveVector n) const;

    double normalization() const { return normalization_; }
    int truncation() const { return truncation_; }

    /// Normalized variances of every grid mode, in DFT layout. Requires
    /// truncation <= N/2.
    std::vector<double> grid_variances(const GridSpec& grid) const;

private:
    Profile profile_;
    int truncation_;
    double normalization_;
};

}  // namespace turbogp
