#include "turbogp/spectral_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "turbogp/error.hpp"
#include "turbogp/rng.hpp"

namespace turbogp {

using Complex = std::complex<double>;

RealField::RealField(GridSpec grid) : grid_(grid), values_(grid.size(), 0.0) {}

RealField::RealField(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("field values do not match the grid size");
}

double RealField::mean() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0) / double(values_.size());
}

double RealField::variance() const {
    const double mu = mean();
    double s = 0.0;
    for (double v : values_) s += (v - mu) * (v - mu);
    return s / double(values_.size());
}

double RealField::rms() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s / double(values_.size()));
}

SpectralField::SpectralField(GridSpec grid) : grid_(grid), coeffs_(grid.size(), Complex{}) {}

SpectralField::SpectralField(GridSpec grid, std::vector<Complex> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size()) throw InvalidArgument("coefficient array does not match the grid size");
}

double SpectralField::hermitian_defect() const {
    double worst = 0.0;
    for (int i1 = 0; i1 < grid_.n(); ++i1) {
        for (int i2 = 0; i2 < grid_.n(); ++i2) {
            const WaveVector n = grid_.wave_vector(i1, i2);
            const Complex c = coeffs_[grid_.index(i1, i2)];
            const Complex mirror = coeff({-n.n1, -n.n2});
            worst = std::max(worst, std::abs(mirror - std::conj(c)));
        }
    }
    return worst;
}

SpectralField to_spectral(const RealField& field) {
    const GridSpec& grid = field.grid();
    std::vector<Complex> in(field.values().begin(), field.values().end());
    std::vector<Complex> out(grid.size());
    dft::forward(grid, in, out);
    return SpectralField(grid, std::move(out));
}

std::vector<Complex> to_physical_complex(const SpectralField& field) {
    std::vector<Complex> out(field.grid().size());
    dft::inverse(field.grid(), field.coeffs(), out);
    return out;
}

RealField to_physical(const SpectralField& field) {
    const auto values = to_physical_complex(field);
    std::vector<double> re(values.size());
    std::transform(values.begin(), values.end(), re.begin(), [](Complex c) { return c.real(); });
    return RealField(field.grid(), std::move(re));
}

SpectralField sample_gaussian_coefficients(const SpectralDensity& density, const GridSpec& grid,
                                           std::uint64_t seed) {
    const std::vector<double> variances = density.grid_variances(grid);
    for (double v : variances) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InvalidArgument("spectral density is negative or not finite at some mode");
        }
    }

    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal;
    SpectralField out(grid);
    auto coeffs = out.coeffs();
    // Visit slots in linear order; each conjugate pair is drawn once, at its
    // lower slot, so the draw sequence depends only on the grid size.
    for (std::size_t slot = 0; slot < grid.size(); ++slot) {
        const GridPoint p = grid.point(slot);
        const WaveVector n = grid.wave_vector(p.i1, p.i2);
        const std::size_t mirror = grid.spectral_index({-n.n1, -n.n2});
        if (mirror < slot) continue;
        const double var = variances[slot] * kCoefficientVarianceScale;
        if (mirror == slot) {
            const double g = normal(rng);
            coeffs[slot] = Complex(std::sqrt(var) * g, 0.0);
            continue;
        }
        const double g1 = normal(rng);
        const double g2 = normal(rng);
        const double s = std::sqrt(0.5 * var);
        coeffs[slot] = Complex(s * g1, s * g2);
        coeffs[mirror] = std::conj(coeffs[slot]);
    }
    coeffs[0] = Complex{};
    return out;
}

RealField sample_gaussian_field(const SpectralDensity& density, const GridSpec& grid, std::uint64_t seed) {
    return to_physical(sample_gaussian_coefficients(density, grid, seed));
}

namespace {

bool is_nyquist(const GridSpec& grid, WaveVector n) { return n.n1 == -grid.n() / 2 || n.n2 == -grid.n() / 2; }

double round_to_bits(double x, int bits) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    int e = 0;
    const double m = std::frexp(x, &e);
    return std::ldexp(std::nearbyint(std::ldexp(m, bits)), e - bits);
}

}  // namespace

SpectralVelocity biot_savart_spectral(const SpectralField& vorticity) {
    const GridSpec& grid = vorticity.grid();
    const auto w = vorticity.coeffs();
    double energy = 0.0;
    for (const Complex& c : w) energy += std::norm(c);
    if (std::abs(w[0]) > 1e-10 * std::sqrt(energy)) {
        throw InvalidArgument("Biot-Savart requires a zero-mean vorticity (w_hat(0) = 0)");
    }

    const int wave_bits = std::bit_width(unsigned(grid.n() / 2));
    const int keep_bits = 53 - 2 * wave_bits;

    SpectralVelocity out{SpectralField(grid), SpectralField(grid)};
    auto u1 = out.u1.coeffs();
    auto u2 = out.u2.coeffs();
    for (int i1 = 0; i1 < grid.n(); ++i1) {
        for (int i2 = 0; i2 < grid.n(); ++i2) {
            const WaveVector n = grid.wave_vector(i1, i2);
            if ((n.n1 == 0 && n.n2 == 0) || is_nyquist(grid, n)) continue;
            const std::size_t slot = grid.index(i1, i2);
            const Complex psi = w[slot] / n.norm_squared();
            const double re = round_to_bits(psi.real(), keep_bits);
            const double im = round_to_bits(psi.imag(), keep_bits);
            const double a = n.n1;
            const double b = n.n2;
            // u1 = i n2 psi, u2 = -i n1 psi
            u1[slot] = Complex(-b * im, b * re);
            u2[slot] = Complex(a * im, -a * re);
        }
    }
    return out;
}

VelocityField biot_savart(const SpectralField& vorticity) {
    SpectralVelocity v = biot_savart_spectral(vorticity);
    return {to_physical(v.u1), to_physical(v.u2)};
}

RealField curl(const RealField& u1, const RealField& u2) {
    if (!(u1.grid() == u2.grid())) throw InvalidArgument("velocity components live on different grids");
    const GridSpec& grid = u1.grid();
    const SpectralField a = to_spectral(u1);
    const SpectralField b = to_spectral(u2);
    SpectralField w(grid);
    for (int i1 = 0; i1 < grid.n(); ++i1) {
        for (int i2 = 0; i2 < grid.n(); ++i2) {
            const WaveVector n = grid.wave_vector(i1, i2);
            if (is_nyquist(grid, n)) continue;
            const std::size_t slot = grid.index(i1, i2);
            const Complex i{0.0, 1.0};
            w.coeffs()[slot] = i * double(n.n1) * b.coeffs()[slot] - i * double(n.n2) * a.coeffs()[slot];
        }
    }
    return to_physical(w);
}

double max_spectral_divergence(const SpectralVelocity& velocity) {
    const GridSpec& grid = velocity.u1.grid();
    double worst = 0.0;
    for (int i1 = 0; i1 < grid.n(); ++i1) {
        for (int i2 = 0; i2 < grid.n(); ++i2) {
            const WaveVector n = grid.wave_vector(i1, i2);
            const std::size_t slot = grid.index(i1, i2);
            const Complex d = double(n.n1) * velocity.u1.coeffs()[slot] + double(n.n2) * velocity.u2.coeffs()[slot];
            worst = std::max(worst, std::abs(d));
        }
    }
    return worst;
}

SpectrumEstimate radial_spectrum(const SpectralField& field) {
    const GridSpec& grid = field.grid();
    const int max_shell = grid.n() / 2 - 1;
    SpectrumEstimate out;
    out.shells.resize(std::size_t(max_shell));
    for (int k = 1; k <= max_shell; ++k) out.shells[std::size_t(k - 1)].k = k;

    for (int i1 = 0; i1 < grid.n(); ++i1) {
        for (int i2 = 0; i2 < grid.n(); ++i2) {
            const WaveVector n = grid.wave_vector(i1, i2);
            if ((n.n1 == 0 && n.n2 == 0) || is_nyquist(grid, n)) continue;
            const long k = std::lround(std::sqrt(n.norm_squared()));
            if (k < 1 || k > max_shell) continue;
            SpectrumShell& s = out.shells[std::size_t(k - 1)];
            s.shell_sum_power += std::norm(field.coeffs()[grid.index(i1, i2)]) / kCoefficientVarianceScale;
            ++s.mode_count;
        }
    }
    for (auto& s : out.shells) s.shell_avg_power = s.mode_count > 0 ? s.shell_sum_power / s.mode_count : 0.0;
    return out;
}

SpectrumEstimate radial_spectrum(const RealField& field) { return radial_spectrum(to_spectral(field)); }

SpectrumEstimate average_spectra(std::span<const SpectrumEstimate> spectra) {
    if (spectra.empty()) throw InvalidArgument("cannot average an empty list of spectra");
    SpectrumEstimate out = spectra.front();
    for (std::size_t i = 1; i < spectra.size(); ++i) {
        if (spectra[i].shells.size() != out.shells.size()) throw InvalidArgument("spectra come from different grids");
        for (std::size_t k = 0; k < out.shells.size(); ++k) {
            out.shells[k].shell_sum_power += spectra[i].shells[k].shell_sum_power;
            out.shells[k].shell_avg_power += spectra[i].shells[k].shell_avg_power;
        }
    }
    const double inv = 1.0 / double(spectra.size());
    for (auto& s : out.shells) {
        s.shell_sum_power *= inv;
        s.shell_avg_power *= inv;
    }
    return out;
}

PowerLawFit fit_power_law(const SpectrumEstimate& spectrum, int k_min, int k_max, bool use_sum) {
    if (k_min < 2) throw InvalidArgument("power-law fit needs k_min >= 2, got " + std::to_string(k_min));
    if (k_max > spectrum.max_shell()) {
        throw InvalidArgument("power-law fit k_max = " + std::to_string(k_max) + " exceeds the largest shell " +
                              std::to_string(spectrum.max_shell()));
    }
    std::vector<double> xs, ys;
    for (int k = k_min; k <= k_max; ++k) {
        const SpectrumShell& s = spectrum.shell(k);
        if (s.mode_count == 0) continue;
        const double p = use_sum ? s.shell_sum_power : s.shell_avg_power;
        if (!(p > 0.0)) throw InvalidArgument("power-law fit hit zero power in shell " + std::to_string(k));
        xs.push_back(std::log(double(k)));
        ys.push_back(std::log(p));
    }
    if (xs.size() < 4) throw InvalidArgument("power-law fit needs at least 4 shells in range");

    const double n = double(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    PowerLawFit fit;
    fit.k_min = k_min;
    fit.k_max = k_max;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
        ssr += r * r;
    }
    fit.exponent_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return fit;
}

}  // namespace turbogp
