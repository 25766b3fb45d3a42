#include "turbogp/gp_inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <boost/math/special_functions/erf.hpp>

#include "turbogp/error.hpp"
#include "turbogp/fft.hpp"

namespace turbogp {

void ObservationSet::validate() const {
    if (locations.size() != values.size()) {
        throw InvalidArgument("observation set has " + std::to_string(locations.size()) + " locations but " +
                              std::to_string(values.size()) + " values");
    }
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
        throw InvalidArgument("observation noise variance must be finite and >= 0");
    }
}

namespace {

struct Factorization {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
};

// Cholesky of K(X, X) + noise I, escalating jitter 1e-10 .. 1e-6 times the
// prior variance when needed. Noise-free data always gets the first step.
Factorization factorize(const KernelTable& kernel, const ObservationSet& obs) {
    const Eigen::MatrixXd g = gram_matrix(kernel, obs.locations, 0.0);
    const auto m = g.rows();
    const double scale = kernel.variance();
    Factorization f;
    auto attempt = [&](double jitter) {
        Eigen::MatrixXd a = g;
        a.diagonal().array() += obs.noise_variance + jitter;
        f.llt.compute(a);
        f.jitter = jitter;
        if (f.llt.info() != Eigen::Success) return false;
        const Eigen::VectorXd d = f.llt.matrixLLT().diagonal();
        return (d.array() > 0.0).all() && d.allFinite();
    };
    if (m == 0) return f;
    if (obs.noise_variance > 0.0 && attempt(0.0)) return f;
    for (double j = kJitterStart; j <= kJitterMax * 1.000001; j *= 10.0) {
        if (attempt(j * scale)) return f;
    }
    throw NumericalError("Gram matrix of " + std::to_string(m) + " observations is not positive definite even with jitter " +
                         std::to_string(kJitterMax) + " x variance; kernel " + kernel.spec().describe() + " is invalid");
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
}

double pseudo_noise(const KernelTable& kernel, const ObservationSet& obs) {
    return obs.noise_variance > 0.0 ? obs.noise_variance : kJitterStart * kernel.variance();
}

}  // namespace

Posterior::Posterior(KernelTable kernel, ObservationSet obs)
    : kernel_(std::move(kernel)), obs_(std::move(obs)), mean_(kernel_.grid()), variance_(kernel_.grid()) {}

const RealField& Posterior::variance_field() const {
    if (!has_variance_) throw InvalidArgument("posterior was fitted without a variance field");
    return variance_;
}

double Posterior::log_marginal_likelihood() const {
    const auto m = weights_.size();
    if (m == 0) return 0.0;
    const double quad = to_vector(obs_.values).dot(weights_);
    const double logdet_half = chol_.diagonal().array().log().sum();
    return -0.5 * quad - logdet_half - 0.5 * double(m) * std::log(2.0 * std::numbers::pi);
}

Posterior fit_posterior(const KernelTable& kernel, const ObservationSet& obs, FitOptions options) {
    obs.validate();
    Posterior post(kernel, obs);
    const GridSpec& grid = kernel.grid();
    const double prior_var = kernel.variance();
    const std::size_t m = obs.size();

    if (m == 0) {
        if (options.compute_variance) {
            std::fill(post.variance_.values().begin(), post.variance_.values().end(), prior_var);
            post.has_variance_ = true;
        }
        return post;
    }

    Factorization f = factorize(kernel, obs);
    post.jitter_ = f.jitter;
    post.chol_ = f.llt.matrixL().toDenseMatrix();
    post.weights_ = f.llt.solve(to_vector(obs.values));

    auto mean = post.mean_.values();
    for (std::size_t x = 0; x < grid.size(); ++x) {
        const GridPoint p = grid.point(x);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += kernel.between(p, obs.locations[i]) * post.weights_[Eigen::Index(i)];
        mean[x] = s;
    }

    if (options.compute_variance) {
        const auto L = f.llt.matrixL();
        auto var = post.variance_.values();
        constexpr std::size_t kBlock = 2048;
        for (std::size_t start = 0; start < grid.size(); start += kBlock) {
            const std::size_t cols = std::min(kBlock, grid.size() - start);
            Eigen::MatrixXd v(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(cols));
            for (std::size_t c = 0; c < cols; ++c) {
                const GridPoint p = grid.point(start + c);
                for (std::size_t i = 0; i < m; ++i) v(Eigen::Index(i), Eigen::Index(c)) = kernel.between(obs.locations[i], p);
            }
            L.solveInPlace(v);
            for (std::size_t c = 0; c < cols; ++c) {
                double value = prior_var - v.col(Eigen::Index(c)).squaredNorm();
                if (value < 0.0) {
                    value = 0.0;
                    ++post.clamped_;
                }
                var[start + c] = value;
            }
        }
        post.has_variance_ = true;
    }
    return post;
}

double log_marginal_likelihood(const KernelTable& kernel, const ObservationSet& obs) {
    obs.validate();
    if (obs.size() == 0) return 0.0;
    Factorization f = factorize(kernel, obs);
    const Eigen::VectorXd y = to_vector(obs.values);
    const Eigen::VectorXd w = f.llt.solve(y);
    const Eigen::MatrixXd L = f.llt.matrixL();
    return -0.5 * y.dot(w) - L.diagonal().array().log().sum() -
           0.5 * double(obs.size()) * std::log(2.0 * std::numbers::pi);
}

KernelSpec select_hyperparameter(std::span<const KernelSpec> candidates, const ObservationSet& obs,
                                 const GridSpec& grid) {
    if (candidates.empty()) throw InvalidArgument("hyperparameter selection needs at least one candidate");
    const KernelSpec* best = nullptr;
    double best_lml = 0.0;
    for (const KernelSpec& spec : candidates) {
        double lml = 0.0;
        try {
            lml = log_marginal_likelihood(build_kernel_table(spec, grid), obs);
        } catch (const NumericalError&) {
            continue;
        }
        if (!best || lml > best_lml) {
            best = &spec;
            best_lml = lml;
        }
    }
    if (!best) throw NumericalError("no hyperparameter candidate produced a factorizable Gram matrix");
    return *best;
}

double two_sided_quantile(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidArgument("credible level must lie in (0, 1), got " + std::to_string(level));
    }
    return std::numbers::sqrt2 * boost::math::erf_inv(level);
}

std::pair<double, double> credible_interval(const Posterior& post, GridPoint x, double level) {
    const double z = two_sided_quantile(level);
    const double m = post.mean_at(x);
    const double half = z * std::sqrt(std::max(0.0, post.variance_at(x)));
    return {m - half, m + half};
}

double energy_variance(const Posterior& post) {
    const KernelTable& kernel = post.kernel();
    const GridSpec& grid = kernel.grid();
    const double n2 = double(grid.size());
    const double h4 = grid.quadrature_weight() * grid.quadrature_weight();

    std::vector<double> d = spectral_density(kernel.spec(), grid.n() / 2).grid_variances(grid);
    for (double& v : d) v *= kCoefficientVarianceScale;

    // ||K||_F^2 over grid nodes = N^4 sum_n D(n)^2.
    double d2_sum = 0.0;
    for (double v : d) d2_sum += v * v;
    double frob = n2 * n2 * d2_sum;

    const auto& locs = post.observations().locations;
    const auto m = Eigen::Index(locs.size());
    if (m > 0) {
        std::vector<double> sq(d.size()), cube(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            sq[i] = d[i] * d[i];
            cube[i] = sq[i] * d[i];
        }
        // V^T V = N^2 K2(x_i - x_j) and V^T K V = N^4 K3(x_i - x_j), where
        // Kp is the inverse DFT of D^p.
        const KernelTable k2(kernel.spec(), grid, symmetric_table_from_coefficients(grid, sq));
        const KernelTable k3(kernel.spec(), grid, symmetric_table_from_coefficients(grid, cube));
        Eigen::MatrixXd a(m, m), b(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                a(i, j) = n2 * k2.between(locs[std::size_t(i)], locs[std::size_t(j)]);
                b(i, j) = n2 * n2 * k3.between(locs[std::size_t(i)], locs[std::size_t(j)]);
            }
        }
        const Eigen::MatrixXd& L = post.chol();
        auto solve = [&](const Eigen::MatrixXd& rhs) {
            Eigen::MatrixXd z = L.triangularView<Eigen::Lower>().solve(rhs);
            return Eigen::MatrixXd(L.transpose().triangularView<Eigen::Upper>().solve(z));
        };
        const Eigen::MatrixXd ginv_b = solve(b);
        const Eigen::MatrixXd ginv_a = solve(a);
        frob += -2.0 * ginv_b.trace() + (ginv_a * ginv_a).trace();
    }
    return std::max(0.0, 0.25 * h4 * frob);
}

namespace {

std::size_t pick_max_variance(const GridSpec& grid, std::span<const GridPoint> candidates,
                              const std::vector<double>& variances, const std::vector<bool>& taken,
                              double tolerance) {
    double best = -1.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (!taken[c]) best = std::max(best, std::max(0.0, variances[c]));
    }
    std::size_t chosen = candidates.size();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (taken[c] || std::max(0.0, variances[c]) < best - tolerance) continue;
        if (chosen == candidates.size() || grid.index(candidates[c]) < grid.index(candidates[chosen])) chosen = c;
    }
    return chosen;
}

std::vector<GridPoint> place_incremental(const KernelTable& kernel, const ObservationSet& obs,
                                         std::span<const GridPoint> candidates, int count) {
    const GridSpec& grid = kernel.grid();
    std::vector<GridPoint> points(obs.locations);
    points.insert(points.end(), candidates.begin(), candidates.end());
    const std::size_t offset = obs.size();
    const std::size_t total = points.size();
    const double noise = pseudo_noise(kernel, obs);

    std::vector<double> var(total, kernel.variance());
    std::vector<std::vector<double>> factors;
    auto condition = [&](std::size_t idx) {
        const double d = std::max(0.0, var[idx]) + noise;
        const double inv = 1.0 / std::sqrt(d);
        std::vector<double> u(total);
        for (std::size_t p = 0; p < total; ++p) {
            double c = kernel.between(points[p], points[idx]);
            for (const auto& f : factors) c -= f[p] * f[idx];
            u[p] = c * inv;
        }
        for (std::size_t p = 0; p < total; ++p) var[p] -= u[p] * u[p];
        factors.push_back(std::move(u));
    };
    for (std::size_t i = 0; i < offset; ++i) condition(i);

    std::vector<bool> taken(candidates.size(), false);
    std::vector<double> cand_var(candidates.size());
    std::vector<GridPoint> chosen;
    for (int step = 0; step < count; ++step) {
        for (std::size_t c = 0; c < candidates.size(); ++c) cand_var[c] = var[offset + c];
        const std::size_t c = pick_max_variance(grid, candidates, cand_var, taken, kPlacementTieTolerance * kernel.variance());
        taken[c] = true;
        chosen.push_back(candidates[c]);
        condition(offset + c);
    }
    return chosen;
}

std::vector<GridPoint> place_refit(const KernelTable& kernel, const ObservationSet& obs,
                                   std::span<const GridPoint> candidates, int count) {
    ObservationSet current = obs;
    std::vector<bool> taken(candidates.size(), false);
    std::vector<double> cand_var(candidates.size());
    std::vector<GridPoint> chosen;
    for (int step = 0; step < count; ++step) {
        const Posterior post = fit_posterior(kernel, current);
        for (std::size_t c = 0; c < candidates.size(); ++c) cand_var[c] = post.variance_at(candidates[c]);
        const std::size_t c =
            pick_max_variance(kernel.grid(), candidates, cand_var, taken, kPlacementTieTolerance * kernel.variance());
        taken[c] = true;
        chosen.push_back(candidates[c]);
        current.locations.push_back(candidates[c]);
        current.values.push_back(0.0);
    }
    return chosen;
}

}  // namespace

std::vector<GridPoint> greedy_sensor_placement(const KernelTable& kernel, const ObservationSet& obs,
                                               std::span<const GridPoint> candidates, int count,
                                               PlacementMethod method) {
    obs.validate();
    if (count < 1) throw InvalidArgument("sensor count must be at least 1");
    if (candidates.empty()) throw InvalidArgument("sensor placement needs a nonempty candidate pool");
    if (std::size_t(count) > candidates.size()) {
        throw InvalidArgument("requested " + std::to_string(count) + " sensors from a pool of " +
                              std::to_string(candidates.size()) + " candidates");
    }
    for (const GridPoint& p : candidates) {
        if (!kernel.grid().contains(p)) throw InvalidArgument("sensor candidate is off the kernel grid");
    }
    for (const GridPoint& p : obs.locations) {
        if (!kernel.grid().contains(p)) throw InvalidArgument("observation location is off the kernel grid");
    }
    return method == PlacementMethod::kIncremental ? place_incremental(kernel, obs, candidates, count)
                                                   : place_refit(kernel, obs, candidates, count);
}

}  // namespace turbogp
