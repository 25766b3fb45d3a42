#include "turbogp/spectral_density.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "turbogp/error.hpp"

namespace turbogp {

bool in_truncation(WaveVector n, int truncation) {
    const double r2 = n.norm_squared();
    if (r2 == 0.0 || r2 > double(truncation) * truncation) return false;
    return std::abs(n.n1) < truncation && std::abs(n.n2) < truncation;
}

SpectralDensity::SpectralDensity(Profile profile, int truncation, double normalization)
    : profile_(std::move(profile)), truncation_(truncation), normalization_(normalization) {
    if (truncation < 1) throw InvalidArgument("spectral truncation must be at least 1");
    if (!(normalization >= 0.0) || !std::isfinite(normalization)) {
        throw InvalidArgument("spectral normalization must be finite and non-negative");
    }
}

SpectralDensity SpectralDensity::normalized(Profile profile, int truncation, double variance) {
    if (!(variance > 0.0)) throw InvalidArgument("kernel variance must be positive");
    double total = 0.0;
    for (int a = -truncation; a <= truncation; ++a) {
        for (int b = -truncation; b <= truncation; ++b) {
            const WaveVector n{a, b};
            if (in_truncation(n, truncation)) total += profile(std::sqrt(n.norm_squared()));
        }
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw InvalidArgument("spectral density sums to " + std::to_string(total) + " over the truncation");
    }
    return SpectralDensity(std::move(profile), truncation, variance / total);
}

double SpectralDensity::unnormalized(WaveVector n) const {
    const double r2 = n.norm_squared();
    return r2 == 0.0 ? 0.0 : profile_(std::sqrt(r2));
}

double SpectralDensity::operator()(WaveVector n) const {
    return in_truncation(n, truncation_) ? normalization_ * profile_(std::sqrt(n.norm_squared())) : 0.0;
}

std::vector<double> SpectralDensity::grid_variances(const GridSpec& grid) const {
    if (truncation_ > grid.n() / 2) {
        throw InvalidArgument("spectral truncation " + std::to_string(truncation_) + " exceeds N/2 = " +
                              std::to_string(grid.n() / 2));
    }
    std::vector<double> out(grid.size(), 0.0);
    for (int i1 = 0; i1 < grid.n(); ++i1) {
        for (int i2 = 0; i2 < grid.n(); ++i2) out[grid.index(i1, i2)] = (*this)(grid.wave_vector(i1, i2));
    }
    return out;
}

}  // namespace turbogp
