#pragma once

#include <cstddef>
#include <numbers>

namespace turbogp {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Integer wave vector n = (n1, n2) on the Fourier lattice.
struct WaveVector {
    int n1 = 0;
    int n2 = 0;

    double norm_squared() const { return double(n1) * n1 + double(n2) * n2; }
    friend bool operator==(const WaveVector&, const WaveVector&) = default;
};

/// Grid node (i1, i2), located at x = (i1 * spacing, i2 * spacing).
struct GridPoint {
    int i1 = 0;
    int i2 = 0;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
    friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

/// Uniform N x N grid on the torus [0, 2pi)^2.
///
/// Arrays indexed by a GridSpec are row-major with the first axis (x1) as
/// the slow index: linear index = i1 * N + i2. Spectral arrays use the same
/// layout in standard DFT order, so row i holds wave number i for i < N/2
/// and i - N for i >= N/2.
class GridSpec {
public:
    /// Throws InvalidArgument unless n is even and at least 8.
    explicit GridSpec(int n);

    int n() const { return n_; }
    std::size_t size() const { return std::size_t(n_) * std::size_t(n_); }
    double domain_length() const { return kTwoPi; }
    double spacing() const { return kTwoPi / n_; }
    double quadrature_weight() const { return spacing() * spacing(); }

    std::size_t index(int i1, int i2) const { return std::size_t(i1) * std::size_t(n_) + std::size_t(i2); }
    std::size_t index(GridPoint p) const { return index(p.i1, p.i2); }
    GridPoint point(std::size_t linear) const {
        return {int(linear / std::size_t(n_)), int(linear % std::size_t(n_))};
    }

    /// Reduces any integer index into [0, N).
    int wrap(int i) const {
        const int r = i % n_;
        return r < 0 ? r + n_ : r;
    }
    bool contains(GridPoint p) const { return p.i1 >= 0 && p.i1 < n_ && p.i2 >= 0 && p.i2 < n_; }

    /// Signed wave number in [-N/2, N/2) stored at DFT row/column i.
    int wavenumber(int i) const { return i < n_ / 2 ? i : i - n_; }
    WaveVector wave_vector(int i1, int i2) const { return {wavenumber(i1), wavenumber(i2)}; }
    /// DFT slot holding wave vector k (components taken modulo N).
    std::size_t spectral_index(WaveVector k) const { return index(wrap(k.n1), wrap(k.n2)); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int n_;
};

/// Shortest periodic distance between two grid points, in radians.
double torus_distance(const GridSpec& grid, GridPoint a, GridPoint b);

}  // namespace turbogp
