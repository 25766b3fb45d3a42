#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "turbogp/grid.hpp"
#include "turbogp/kernels.hpp"
#include "turbogp/spectral_field.hpp"

namespace turbogp {

/// Pointwise vorticity observations y_i = w(x_i) + eps_i with
/// eps_i ~ N(0, noise_variance).
struct ObservationSet {
    std::vector<GridPoint> locations;
    std::vector<double> values;
    double noise_variance = 0.0;

    std::size_t size() const { return locations.size(); }
    /// Throws InvalidArgument on length mismatch or negative noise.
    void validate() const;
};

/// Jitter ladder applied when the Gram matrix does not factorize:
/// 1e-10, 1e-9, ..., 1e-6 times the prior variance.
inline constexpr double kJitterStart = 1e-10;
inline constexpr double kJitterMax = 1e-6;

struct FitOptions {
    /// The O(m^2 N^2) variance field is skipped when false; variance_field()
    /// then throws.
    bool compute_variance = true;
};

/// Exact GP posterior under a grid-aligned kernel table.
class Posterior {
public:
    const KernelTable& kernel() const { return kernel_; }
    const ObservationSet& observations() const { return obs_; }

    /// Lower Cholesky factor of K(X, X) + (noise + jitter) I.
    const Eigen::MatrixXd& chol() const { return chol_; }
    /// (K(X, X) + (noise + jitter) I)^-1 y.
    const Eigen::VectorXd& weights() const { return weights_; }
    /// Jitter that had to be added on top of the noise variance.
    double jitter() const { return jitter_; }

    const RealField& mean_field() const { return mean_; }
    const RealField& variance_field() const;
    bool has_variance() const { return has_variance_; }
    /// Grid points whose variance came out negative and was clamped to 0.
    int clamped_count() const { return clamped_; }

    double mean_at(GridPoint x) const { return mean_.at(x); }
    double variance_at(GridPoint x) const { return variance_field().at(x); }

    /// -1/2 y^T G^-1 y - sum log diag(L) - m/2 log(2 pi).
    double log_marginal_likelihood() const;

private:
    friend Posterior fit_posterior(const KernelTable&, const ObservationSet&, FitOptions);
    Posterior(KernelTable kernel, ObservationSet obs);

    KernelTable kernel_;
    ObservationSet obs_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd weights_;
    double jitter_ = 0.0;
    RealField mean_;
    RealField variance_;
    bool has_variance_ = false;
    int clamped_ = 0;
};

/// Throws InvalidArgument for off-grid locations and NumericalError when the
/// Gram matrix stays indefinite through the jitter ladder.
Posterior fit_posterior(const KernelTable& kernel, const ObservationSet& obs, FitOptions options = {});

double log_marginal_likelihood(const KernelTable& kernel, const ObservationSet& obs);

/// Candidate with the largest log marginal likelihood; ties go to the first.
/// Candidates whose Gram matrix cannot be factorized are skipped. Throws
/// NumericalError if none can be, InvalidArgument if the list is empty.
KernelSpec select_hyperparameter(std::span<const KernelSpec> candidates, const ObservationSet& obs,
                                 const GridSpec& grid);

/// Standard-normal two-sided quantile z with P(|Z| <= z) = level.
double two_sided_quantile(double level);

/// m -/+ z sqrt(v) at a grid point, with v clamped at zero.
std::pair<double, double> credible_interval(const Posterior& post, GridPoint x, double level);

/// 1/4 Tr(K_* K_*) for the posterior covariance viewed as an integral
/// operator under grid quadrature (weight (2 pi / N)^2 per node).
double energy_variance(const Posterior& post);

enum class PlacementMethod {
    /// Rank-one updates of the posterior covariance restricted to the
    /// candidate and observation points.
    kIncremental,
    /// Refit the full posterior after every pick.
    kRefit,
};

/// Two variances closer than this (times the prior variance) are treated
/// as tied; ties go to the lowest linear grid index.
inline constexpr double kPlacementTieTolerance = 1e-10;

/// Greedy design x_{k+1} = argmax_x K_*(x, x) over the candidate pool. Each
/// pick is conditioned on as a pseudo-observation with the observation
/// noise variance (or the first jitter step when that is zero).
std::vector<GridPoint> greedy_sensor_placement(const KernelTable& kernel, const ObservationSet& obs,
                                               std::span<const GridPoint> candidates, int count,
                                               PlacementMethod method = PlacementMethod::kIncremental);

}  // namespace turbogp
