#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "turbogp/grid.hpp"
#include "turbogp/spectral_density.hpp"

namespace turbogp {

enum class KernelFamily { kCht, kRbf, kMatern };

/// Lower-case family tag: "cht", "rbf" or "matern".
std::string to_string(KernelFamily family);
/// Inverse of to_string; throws InvalidArgument on an unknown tag.
KernelFamily parse_kernel_family(const std::string& tag);

/// A named stationary kernel. Only the fields of the named family matter:
///  - CHT:    S(k) = k^(-2(1 + alpha))
///  - RBF:    S(k) = exp(-length_scale^2 k^2 / 2)
///  - MATERN: S(k) = (2 nu / length_scale^2 + k^2)^(-(nu + 1))
/// variance is the marginal variance K(x, x) after normalization.
struct KernelSpec {
    KernelFamily family = KernelFamily::kCht;
    double alpha = 1.5;
    double length_scale = 0.5;
    double nu = 1.5;
    double variance = 1.0;

    static KernelSpec cht(double alpha, double variance = 1.0);
    static KernelSpec rbf(double length_scale, double variance = 1.0);
    static KernelSpec matern(double nu, double length_scale, double variance = 1.0);

    /// Throws InvalidArgument when a meaningful field is out of range.
    void validate() const;

    /// Short human-readable label, e.g. "cht(alpha=1.5)".
    std::string describe() const;
};

/// Family density normalized over the truncation of radius `truncation`.
SpectralDensity spectral_density(const KernelSpec& spec, int truncation);

/// Grid-aligned kernel values K(dx) for every grid offset, obtained as the
/// inverse DFT of the normalized density over the truncation |n| <= N/2.
/// The table is symmetrized over the eight lattice symmetries, so
/// value(a, b) == value(-a, -b) == value(b, a) hold exactly.
class KernelTable {
public:
    KernelTable(KernelSpec spec, GridSpec grid, std::vector<double> values);

    const KernelSpec& spec() const { return spec_; }
    const GridSpec& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }

    /// K at grid offset (a, b) * spacing; indices are taken modulo N.
    double value(int a, int b) const { return values_[grid_.index(grid_.wrap(a), grid_.wrap(b))]; }
    /// K(x - y) for two grid points.
    double between(GridPoint x, GridPoint y) const { return value(x.i1 - y.i1, x.i2 - y.i2); }
    /// Marginal variance K(0).
    double variance() const { return values_[0]; }

private:
    KernelSpec spec_;
    GridSpec grid_;
    std::vector<double> values_;
};

KernelTable build_kernel_table(const KernelSpec& spec, const GridSpec& grid);

/// Table built from an arbitrary even coefficient array in DFT layout (used
/// for powers of a density). Symmetrized like build_kernel_table.
std::vector<double> symmetric_table_from_coefficients(const GridSpec& grid, std::span<const double> coefficients);

/// Brute-force sum over the truncation of radius M of the normalized
/// density times cos(n . dx). Independent of the FFT path; with M = N/2 it
/// reproduces build_kernel_table at grid offsets.
double direct_kernel_sum(const KernelSpec& spec, double dx1, double dx2, int truncation);

/// m x m matrix K(x_i - x_j) + jitter * I. Throws InvalidArgument for a
/// location outside the table's grid or negative jitter.
Eigen::MatrixXd gram_matrix(const KernelTable& table, std::span<const GridPoint> locations, double jitter);

/// Spectral covariance of the velocity for vorticity prior CHT(alpha):
/// (n_perp n_perp^T) / |n|^(4 + 2 alpha). Throws InvalidArgument at n = 0.
Eigen::Matrix2d velocity_spectral_covariance(double alpha, WaveVector n);

/// Dissipation exponent gamma and forcing spectral exponent beta.
struct PhysicsParams {
    double gamma = 1.0;
    double beta = 1.5;
};

/// alpha = beta + gamma - 1. Throws InvalidArgument unless gamma in (2/3, 1].
double forcing_to_alpha(const PhysicsParams& params);

/// Whether the (alpha, gamma) pair has an invariant measure equivalent to
/// the Gaussian reference: gamma == 1 and alpha > 0, or gamma < 1 and
/// alpha > 2 - gamma. Throws InvalidArgument unless gamma in (2/3, 1].
bool check_admissible(double alpha, double gamma);

}  // namespace turbogp
