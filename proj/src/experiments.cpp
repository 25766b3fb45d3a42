#include "turbogp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "turbogp/error.hpp"
#include "turbogp/rng.hpp"

namespace turbogp {
namespace {

ScaledField rescale_unit_variance(RealField field, bool remove_mean) {
    if (remove_mean) {
        const double mu = field.mean();
        for (double& v : field.values()) v -= mu;
    }
    const double var = field.variance();
    if (!(var > 0.0)) throw NumericalError("generated truth has zero variance");
    const double scale = 1.0 / std::sqrt(var);
    for (double& v : field.values()) v *= scale;
    return {std::move(field), scale};
}

}  // namespace

ScaledField generate_cht_truth(double alpha, const GridSpec& grid, std::uint64_t seed) {
    const SpectralDensity density = spectral_density(KernelSpec::cht(alpha), grid.n() / 2);
    return rescale_unit_variance(sample_gaussian_field(density, grid, seed), false);
}

void VortexParams::validate() const {
    if (vortex_count < 1) throw InvalidArgument("vortex count must be at least 1");
    if (!(radius_min > 0.0 && radius_min <= radius_max && radius_max < std::numbers::pi)) {
        throw InvalidArgument("vortex radii must satisfy 0 < radius_min <= radius_max < pi");
    }
    if (!(amplitude_min > 0.0 && amplitude_min <= amplitude_max)) {
        throw InvalidArgument("vortex amplitudes must satisfy 0 < amplitude_min <= amplitude_max");
    }
    if (!(sign_balance >= 0.0 && sign_balance <= 1.0)) throw InvalidArgument("vortex sign balance must lie in [0, 1]");
}

RealField vortex_superposition(const VortexParams& params, const GridSpec& grid, std::uint64_t seed) {
    params.validate();
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> centre(0.0, kTwoPi);
    std::uniform_real_distribution<double> radius(params.radius_min, params.radius_max);
    std::uniform_real_distribution<double> amplitude(params.amplitude_min, params.amplitude_max);
    std::bernoulli_distribution positive(params.sign_balance);

    RealField field(grid);
    auto values = field.values();
    const double h = grid.spacing();
    auto periodic_gap = [](double d) {
        d = std::fmod(std::abs(d), kTwoPi);
        return std::min(d, kTwoPi - d);
    };
    for (int j = 0; j < params.vortex_count; ++j) {
        const double c1 = centre(rng);
        const double c2 = centre(rng);
        const double r = radius(rng);
        const double a = amplitude(rng) * (positive(rng) ? 1.0 : -1.0);
        const double inv = 1.0 / (2.0 * r * r);
        for (int i1 = 0; i1 < grid.n(); ++i1) {
            const double d1 = periodic_gap(i1 * h - c1);
            for (int i2 = 0; i2 < grid.n(); ++i2) {
                const double d2 = periodic_gap(i2 * h - c2);
                values[grid.index(i1, i2)] += a * std::exp(-(d1 * d1 + d2 * d2) * inv);
            }
        }
    }
    return field;
}

ScaledField generate_vortex_truth(const VortexParams& params, const GridSpec& grid, std::uint64_t seed) {
    return rescale_unit_variance(vortex_superposition(params, grid, seed), true);
}

ObservationSet observe(const RealField& truth, int m, double noise_ratio, std::uint64_t seed) {
    const GridSpec& grid = truth.grid();
    if (m < 1 || std::size_t(m) > grid.size()) {
        throw InvalidArgument("observation count must lie in [1, N^2], got " + std::to_string(m));
    }
    if (!(noise_ratio >= 0.0) || !std::isfinite(noise_ratio)) throw InvalidArgument("noise ratio must be >= 0");

    // Partial Fisher-Yates: the first m slots become a uniform sample
    // without replacement.
    Rng loc_rng = make_rng(derive_seed(seed, Stream::kLocations));
    std::vector<std::size_t> slots(grid.size());
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t i = 0; i < std::size_t(m); ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, slots.size() - 1);
        std::swap(slots[i], slots[pick(loc_rng)]);
    }

    Rng noise_rng = make_rng(derive_seed(seed, Stream::kNoise));
    std::normal_distribution<double> normal;
    const double sigma = noise_ratio * truth.rms();
    ObservationSet obs;
    obs.noise_variance = sigma * sigma;
    obs.locations.reserve(std::size_t(m));
    obs.values.reserve(std::size_t(m));
    for (std::size_t i = 0; i < std::size_t(m); ++i) {
        const GridPoint p = grid.point(slots[i]);
        obs.locations.push_back(p);
        obs.values.push_back(sigma > 0.0 ? truth.at(p) + sigma * normal(noise_rng) : truth.at(p));
    }
    return obs;
}

std::string to_string(TruthKind kind) { return kind == TruthKind::kVortex ? "vortex" : "gaussian"; }

TruthKind parse_truth_kind(const std::string& tag) {
    if (tag == "gaussian" || tag == "cht") return TruthKind::kGaussianCht;
    if (tag == "vortex") return TruthKind::kVortex;
    throw InvalidArgument("unknown truth kind '" + tag + "' (expected gaussian or vortex)");
}

std::vector<double> default_length_scale_grid() {
    constexpr int kCount = 16;
    constexpr double kLo = 0.05, kHi = 1.6;
    std::vector<double> out(kCount);
    for (int i = 0; i < kCount; ++i) out[std::size_t(i)] = kLo * std::pow(kHi / kLo, double(i) / (kCount - 1));
    return out;
}

void TrialConfig::validate() const {
    (void)GridSpec(grid_n);
    if (m < 1) throw InvalidArgument("trial needs at least one observation");
    if (!(noise_ratio >= 0.0)) throw InvalidArgument("noise ratio must be >= 0");
    if (kernel_candidates.empty()) throw InvalidArgument("trial needs at least one kernel candidate");
    for (const KernelSpec& k : kernel_candidates) {
        k.validate();
        if (k.family != KernelFamily::kCht && length_scale_grid.empty()) {
            throw InvalidArgument("baseline kernels need a nonempty length-scale grid");
        }
    }
    if (truth_kind == TruthKind::kGaussianCht && !(alpha_true > 0.0)) {
        throw InvalidArgument("truth alpha must be > 0");
    }
    if (truth_kind == TruthKind::kVortex) vortex.validate();
}

namespace {

KernelSpec tune_baseline(const KernelSpec& spec, const std::vector<double>& grid_ls, const ObservationSet& obs,
                         const GridSpec& grid) {
    std::vector<KernelSpec> candidates;
    candidates.reserve(grid_ls.size());
    for (double ls : grid_ls) {
        KernelSpec c = spec;
        c.length_scale = ls;
        candidates.push_back(c);
    }
    return select_hyperparameter(candidates, obs, grid);
}

}  // namespace

TrialResult run_trial(const TrialConfig& config) {
    config.validate();
    const GridSpec grid(config.grid_n);
    const std::uint64_t seed = config.master_seed;
    const ScaledField truth = config.truth_kind == TruthKind::kVortex
                                  ? generate_vortex_truth(config.vortex, grid, derive_seed(seed, Stream::kTruth))
                                  : generate_cht_truth(config.alpha_true, grid, derive_seed(seed, Stream::kTruth));
    const ObservationSet obs = observe(truth.field, config.m, config.noise_ratio, derive_seed(seed, Stream::kLocations));
    const double truth_std = std::sqrt(truth.field.variance());

    TrialResult result;
    result.seed = seed;
    for (std::size_t c = 0; c < config.kernel_candidates.size(); ++c) {
        KernelSpec spec = config.kernel_candidates[c];
        if (spec.family != KernelFamily::kCht) spec = tune_baseline(spec, config.length_scale_grid, obs, grid);
        const Posterior post = fit_posterior(build_kernel_table(spec, grid), obs, FitOptions{.compute_variance = false});

        double sse = 0.0;
        const auto mean = post.mean_field().values();
        const auto exact = truth.field.values();
        for (std::size_t i = 0; i < grid.size(); ++i) sse += (mean[i] - exact[i]) * (mean[i] - exact[i]);

        KernelOutcome outcome;
        outcome.tag = to_string(spec.family);
        const bool taken = std::any_of(result.kernels.begin(), result.kernels.end(),
                                       [&](const KernelOutcome& k) { return k.tag == outcome.tag; });
        if (taken) outcome.tag += "_" + std::to_string(c);
        outcome.spec = spec;
        outcome.rmse = std::sqrt(sse / double(grid.size()));
        outcome.relative_error = outcome.rmse / truth_std;
        result.kernels.push_back(std::move(outcome));
    }

    const auto best = std::min_element(result.kernels.begin(), result.kernels.end(),
                                       [](const auto& a, const auto& b) { return a.relative_error < b.relative_error; });
    result.winner = best->tag;

    const auto cht = std::find_if(result.kernels.begin(), result.kernels.end(),
                                  [](const auto& k) { return k.spec.family == KernelFamily::kCht; });
    const auto base = std::find_if(result.kernels.begin(), result.kernels.end(),
                                   [](const auto& k) { return k.spec.family != KernelFamily::kCht; });
    if (cht != result.kernels.end() && base != result.kernels.end() && base->relative_error > 0.0) {
        result.improvement_pct = 100.0 * (base->relative_error - cht->relative_error) / base->relative_error;
    }
    return result;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(Stream::kTrial), index});
}

std::vector<TrialResult> run_trials(const TrialConfig& base, int count, int jobs) {
    if (count < 1) throw InvalidArgument("trial count must be at least 1");
    base.validate();
    std::vector<TrialResult> results(static_cast<std::size_t>(count));
    int workers = jobs > 0 ? jobs : int(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, count);

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int t = next++; t < count; t = next++) {
            try {
                TrialConfig cfg = base;
                cfg.master_seed = trial_seed(base.master_seed, std::uint64_t(t));
                results[std::size_t(t)] = run_trial(cfg);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(std::size_t(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

SweepPoint aggregate(double axis_value, std::span<const TrialResult> trials) {
    if (trials.empty()) throw InvalidArgument("cannot aggregate an empty batch of trials");
    SweepPoint p;
    p.axis_value = axis_value;
    p.trial_count = int(trials.size());
    double sum = 0.0;
    int wins = 0;
    for (const auto& t : trials) {
        sum += t.improvement_pct;
        wins += t.cht_wins() ? 1 : 0;
    }
    p.mean_improvement = sum / double(trials.size());
    double ss = 0.0;
    for (const auto& t : trials) ss += (t.improvement_pct - p.mean_improvement) * (t.improvement_pct - p.mean_improvement);
    p.std_improvement = trials.size() > 1 ? std::sqrt(ss / double(trials.size() - 1)) : 0.0;
    p.win_rate = double(wins) / double(trials.size());
    return p;
}

SweepResult sweep_alpha(const TrialConfig& base, std::span<const double> alphas, int trials, int jobs) {
    if (alphas.empty()) throw InvalidArgument("alpha sweep needs at least one alpha");
    SweepResult out;
    out.axis = SweepAxis::kAlpha;
    for (double alpha : alphas) {
        TrialConfig cfg = base;
        cfg.kernel_candidates.clear();
        cfg.kernel_candidates.push_back(KernelSpec::cht(alpha));
        for (const KernelSpec& k : base.kernel_candidates) {
            if (k.family != KernelFamily::kCht) cfg.kernel_candidates.push_back(k);
        }
        auto batch = run_trials(cfg, trials, jobs);
        out.points.push_back(aggregate(alpha, batch));
        out.trials.push_back(std::move(batch));
    }
    return out;
}

SweepResult sweep_density(const TrialConfig& base, std::span<const int> m_values, int trials, int jobs) {
    if (m_values.empty()) throw InvalidArgument("density sweep needs at least one observation count");
    SweepResult out;
    out.axis = SweepAxis::kDensity;
    for (std::size_t i = 0; i < m_values.size(); ++i) {
        TrialConfig cfg = base;
        cfg.m = m_values[i];
        cfg.master_seed = derive_seed(base.master_seed, {static_cast<std::uint64_t>(Stream::kSweepPoint), i});
        auto batch = run_trials(cfg, trials, jobs);
        out.points.push_back(aggregate(double(m_values[i]), batch));
        out.trials.push_back(std::move(batch));
    }
    return out;
}

std::vector<SpectralValidationRow> spectral_validation(std::span<const double> alphas, const GridSpec& grid,
                                                       int seeds_per_alpha, std::uint64_t master_seed, int k_min,
                                                       int k_max) {
    if (alphas.empty()) throw InvalidArgument("spectral validation needs at least one alpha");
    if (seeds_per_alpha < 1) throw InvalidArgument("spectral validation needs at least one seed per alpha");
    if (k_min == 0) k_min = default_fit_k_min(grid);
    if (k_max == 0) k_max = default_fit_k_max(grid);

    std::vector<SpectralValidationRow> rows;
    for (double alpha : alphas) {
        const SpectralDensity density = spectral_density(KernelSpec::cht(alpha), grid.n() / 2);
        std::vector<SpectrumEstimate> spectra;
        for (int s = 0; s < seeds_per_alpha; ++s) {
            // Same seeds for every alpha, so the alphas share their white noise.
            const std::uint64_t seed = trial_seed(master_seed, std::uint64_t(s));
            spectra.push_back(radial_spectrum(sample_gaussian_coefficients(density, grid, seed)));
        }
        const SpectrumEstimate mean = average_spectra(spectra);
        rows.push_back({alpha, fit_power_law(mean, k_min, k_max, true), fit_power_law(mean, k_min, k_max, false)});
    }
    return rows;
}

}  // namespace turbogp
