#include "turbogp/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "turbogp/error.hpp"
#include "turbogp/fft.hpp"

namespace turbogp {

std::string to_string(KernelFamily family) {
    switch (family) {
    case KernelFamily::kCht: return "cht";
    case KernelFamily::kRbf: return "rbf";
    case KernelFamily::kMatern: return "matern";
    }
    return "unknown";
}

KernelFamily parse_kernel_family(const std::string& tag) {
    if (tag == "cht") return KernelFamily::kCht;
    if (tag == "rbf") return KernelFamily::kRbf;
    if (tag == "matern") return KernelFamily::kMatern;
    throw InvalidArgument("unknown kernel family '" + tag + "' (expected cht, rbf or matern)");
}

KernelSpec KernelSpec::cht(double alpha, double variance) {
    KernelSpec s;
    s.family = KernelFamily::kCht;
    s.alpha = alpha;
    s.variance = variance;
    return s;
}

KernelSpec KernelSpec::rbf(double length_scale, double variance) {
    KernelSpec s;
    s.family = KernelFamily::kRbf;
    s.length_scale = length_scale;
    s.variance = variance;
    return s;
}

KernelSpec KernelSpec::matern(double nu, double length_scale, double variance) {
    KernelSpec s;
    s.family = KernelFamily::kMatern;
    s.nu = nu;
    s.length_scale = length_scale;
    s.variance = variance;
    return s;
}

void KernelSpec::validate() const {
    if (!(variance > 0.0) || !std::isfinite(variance)) throw InvalidArgument("kernel variance must be > 0");
    switch (family) {
    case KernelFamily::kCht:
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            throw InvalidArgument("CHT kernel requires alpha > 0 (got " + std::to_string(alpha) + ")");
        }
        break;
    case KernelFamily::kMatern:
        if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("Matern kernel requires nu > 0");
        [[fallthrough]];
    case KernelFamily::kRbf:
        if (!(length_scale > 0.0) || !std::isfinite(length_scale)) {
            throw InvalidArgument("kernel length scale must be > 0");
        }
        break;
    }
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    os << to_string(family) << '(';
    switch (family) {
    case KernelFamily::kCht: os << "alpha=" << alpha; break;
    case KernelFamily::kRbf: os << "length_scale=" << length_scale; break;
    case KernelFamily::kMatern: os << "nu=" << nu << ", length_scale=" << length_scale; break;
    }
    os << ", variance=" << variance << ')';
    return os.str();
}

SpectralDensity spectral_density(const KernelSpec& spec, int truncation) {
    spec.validate();
    SpectralDensity::Profile profile;
    switch (spec.family) {
    case KernelFamily::kCht: {
        const double p = -2.0 * (1.0 + spec.alpha);
        profile = [p](double k) { return std::pow(k, p); };
        break;
    }
    case KernelFamily::kRbf: {
        const double c = 0.5 * spec.length_scale * spec.length_scale;
        profile = [c](double k) { return std::exp(-c * k * k); };
        break;
    }
    case KernelFamily::kMatern: {
        const double kappa2 = 2.0 * spec.nu / (spec.length_scale * spec.length_scale);
        const double p = -(spec.nu + 1.0);
        profile = [kappa2, p](double k) { return std::pow(kappa2 + k * k, p); };
        break;
    }
    }
    return SpectralDensity::normalized(std::move(profile), truncation, spec.variance);
}

KernelTable::KernelTable(KernelSpec spec, GridSpec grid, std::vector<double> values)
    : spec_(spec), grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("kernel table does not match the grid size");
}

std::vector<double> symmetric_table_from_coefficients(const GridSpec& grid, std::span<const double> coefficients) {
    const std::vector<double> raw = dft::inverse_even(grid, coefficients);
    std::vector<double> out(raw.size());
    const int n = grid.n();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int ma = grid.wrap(-a), mb = grid.wrap(-b);
            std::array<std::size_t, 8> orbit = {
                grid.index(a, b),  grid.index(ma, b),  grid.index(a, mb),  grid.index(ma, mb),
                grid.index(b, a),  grid.index(mb, a),  grid.index(b, ma),  grid.index(mb, ma),
            };
            std::sort(orbit.begin(), orbit.end());
            const auto last = std::unique(orbit.begin(), orbit.end());
            if (orbit.front() != grid.index(a, b)) continue;
            double sum = 0.0;
            for (auto it = orbit.begin(); it != last; ++it) sum += raw[*it];
            const double mean = sum / double(last - orbit.begin());
            for (auto it = orbit.begin(); it != last; ++it) out[*it] = mean;
        }
    }
    return out;
}

KernelTable build_kernel_table(const KernelSpec& spec, const GridSpec& grid) {
    const SpectralDensity density = spectral_density(spec, grid.n() / 2);
    const std::vector<double> variances = density.grid_variances(grid);
    std::vector<double> coeffs(variances.size());
    std::transform(variances.begin(), variances.end(), coeffs.begin(),
                   [](double v) { return v * kCoefficientVarianceScale; });
    return KernelTable(spec, grid, symmetric_table_from_coefficients(grid, coeffs));
}

double direct_kernel_sum(const KernelSpec& spec, double dx1, double dx2, int truncation) {
    if (truncation < 2) throw InvalidArgument("direct kernel sum needs truncation >= 2");
    const SpectralDensity density = spectral_density(spec, truncation);
    double sum = 0.0;
    for (int a = -truncation; a <= truncation; ++a) {
        for (int b = -truncation; b <= truncation; ++b) {
            const double s = density(WaveVector{a, b});
            if (s != 0.0) sum += s * std::cos(a * dx1 + b * dx2);
        }
    }
    return sum * kCoefficientVarianceScale;
}

Eigen::MatrixXd gram_matrix(const KernelTable& table, std::span<const GridPoint> locations, double jitter) {
    if (!(jitter >= 0.0)) throw InvalidArgument("jitter must be non-negative");
    for (const GridPoint& p : locations) {
        if (!table.grid().contains(p)) {
            throw InvalidArgument("observation location (" + std::to_string(p.i1) + ", " + std::to_string(p.i2) +
                                  ") is off the kernel grid; snap it first");
        }
    }
    const auto m = Eigen::Index(locations.size());
    Eigen::MatrixXd g(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = table.between(locations[std::size_t(i)], locations[std::size_t(j)]);
            g(i, j) = v;
            g(j, i) = v;
        }
        g(i, i) += jitter;
    }
    return g;
}

Eigen::Matrix2d velocity_spectral_covariance(double alpha, WaveVector n) {
    if (n.n1 == 0 && n.n2 == 0) throw InvalidArgument("velocity covariance is undefined at n = 0");
    const Eigen::Vector2d perp(-double(n.n2), double(n.n1));
    return perp * perp.transpose() / std::pow(n.norm_squared(), 2.0 + alpha);
}

namespace {

void require_gamma(double gamma) {
    if (!(gamma > 2.0 / 3.0 && gamma <= 1.0)) {
        throw InvalidArgument("dissipation exponent gamma must lie in (2/3, 1], got " + std::to_string(gamma));
    }
}

}  // namespace

double forcing_to_alpha(const PhysicsParams& params) {
    require_gamma(params.gamma);
    return params.beta + params.gamma - 1.0;
}

bool check_admissible(double alpha, double gamma) {
    require_gamma(gamma);
    if (gamma == 1.0) return alpha > 0.0;
    return alpha > 2.0 - gamma;
}

}  // namespace turbogp
