#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "turbogp/gp_inference.hpp"
#include "turbogp/kernels.hpp"
#include "turbogp/spectral_field.hpp"

namespace turbogp {

/// A generated ground truth together with the factor that brought it to
/// unit grid variance.
struct ScaledField {
    RealField field;
    double scale_factor = 1.0;
};

/// Sample from the CHT(alpha) Gaussian measure rescaled to unit grid variance.
ScaledField generate_cht_truth(double alpha, const GridSpec& grid, std::uint64_t seed);

/// Superposed periodic Gaussian vortices
/// w(x) = sum_j A_j exp(-d_T(x, c_j)^2 / (2 r_j^2)).
struct VortexParams {
    int vortex_count = 12;
    double radius_min = 0.2;
    double radius_max = 0.6;
    double amplitude_min = 0.5;
    double amplitude_max = 1.5;
    /// Fraction of vortices with positive sign.
    double sign_balance = 0.5;

    void validate() const;
};

/// Vortex superposition before mean removal and normalization, with
/// centres, radii, amplitudes and signs drawn from `seed`.
RealField vortex_superposition(const VortexParams& params, const GridSpec& grid, std::uint64_t seed);

/// Mean-free, unit-variance vortex field.
ScaledField generate_vortex_truth(const VortexParams& params, const GridSpec& grid, std::uint64_t seed);

/// m distinct grid locations drawn uniformly, observed with additive
/// Gaussian noise of standard deviation noise_ratio * rms(truth). The
/// location and noise streams are split from `seed`.
ObservationSet observe(const RealField& truth, int m, double noise_ratio, std::uint64_t seed);

enum class TruthKind { kGaussianCht, kVortex };

std::string to_string(TruthKind kind);
TruthKind parse_truth_kind(const std::string& tag);

/// Default RBF/Matern length-scale grid: 16 log-spaced values from 0.05 to
/// 1.6 radians.
std::vector<double> default_length_scale_grid();

struct TrialConfig {
    int grid_n = 128;
    double alpha_true = 1.5;
    /// Reconstruction priors. RBF and Matern entries have their length
    /// scale re-selected per trial by marginal likelihood over
    /// length_scale_grid; CHT entries are used as given.
    std::vector<KernelSpec> kernel_candidates = {KernelSpec::cht(1.5), KernelSpec::rbf(0.5)};
    int m = 100;
    double noise_ratio = 0.1;
    std::uint64_t master_seed = 0;
    TruthKind truth_kind = TruthKind::kGaussianCht;
    VortexParams vortex;
    std::vector<double> length_scale_grid = default_length_scale_grid();

    void validate() const;
};

struct KernelOutcome {
    std::string tag;
    /// The spec actually used (after length-scale selection).
    KernelSpec spec;
    double relative_error = 0.0;
    double rmse = 0.0;
};

struct TrialResult {
    std::uint64_t seed = 0;
    std::vector<KernelOutcome> kernels;
    /// 100 (eps_baseline - eps_cht) / eps_baseline, with the first CHT
    /// candidate against the first non-CHT candidate; 0 if either is missing.
    double improvement_pct = 0.0;
    /// Tag of the candidate with the lowest relative error.
    std::string winner;

    /// True when the CHT candidate strictly beat the baseline.
    bool cht_wins() const { return improvement_pct > 0.0; }
};

/// One full reconstruction trial, deterministic in config.master_seed.
TrialResult run_trial(const TrialConfig& config);

/// Seed of trial `index` in a batch rooted at `master_seed`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index);

/// Runs `count` trials with seeds trial_seed(base.master_seed, t) on up to
/// `jobs` threads (0 means hardware concurrency). Results are ordered by t.
std::vector<TrialResult> run_trials(const TrialConfig& base, int count, int jobs = 0);

enum class SweepAxis { kAlpha, kDensity, kTrial };

struct SweepPoint {
    double axis_value = 0.0;
    double mean_improvement = 0.0;
    double std_improvement = 0.0;
    double win_rate = 0.0;
    int trial_count = 0;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::kTrial;
    std::vector<SweepPoint> points;
    /// Per-point trial results, parallel to points.
    std::vector<std::vector<TrialResult>> trials;
};

/// Mean, sample standard deviation and win rate of a batch.
SweepPoint aggregate(double axis_value, std::span<const TrialResult> trials);

/// For each reconstruction alpha, CHT(alpha) against the tuned baselines in
/// base.kernel_candidates. Every point reuses the same trial seeds, so the
/// truths and observations are shared across alphas.
SweepResult sweep_alpha(const TrialConfig& base, std::span<const double> alphas, int trials, int jobs = 0);

/// For each observation count, independent trial seeds per point.
SweepResult sweep_density(const TrialConfig& base, std::span<const int> m_values, int trials, int jobs = 0);

struct SpectralValidationRow {
    double alpha = 0.0;
    PowerLawFit shell_sum_fit;
    PowerLawFit mode_avg_fit;
};

/// Per alpha, averages radial spectra of seeds_per_alpha raw CHT samples
/// and fits both estimators over [k_min, k_max] (0 selects the default).
std::vector<SpectralValidationRow> spectral_validation(std::span<const double> alphas, const GridSpec& grid,
                                                       int seeds_per_alpha, std::uint64_t master_seed = 0,
                                                       int k_min = 0, int k_max = 0);

}  // namespace turbogp
