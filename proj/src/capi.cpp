#include "turbogp/turbogp.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "turbogp/error.hpp"
#include "turbogp/experiments.hpp"
#include "turbogp/field_io.hpp"
#include "turbogp/gp_inference.hpp"
#include "turbogp/kernels.hpp"
#include "turbogp/spectral_field.hpp"

using namespace turbogp;

struct tgp_field_s {
    RealField field;
};

struct tgp_kernel_s {
    KernelTable table;
};

struct tgp_posterior_s {
    Posterior post;
};

namespace {

thread_local std::string g_last_error;

tgp_status fail(tgp_status status, const char* message) {
    g_last_error = message;
    return status;
}

/// Runs `body`, mapping library exceptions to status codes.
template <class F>
tgp_status guarded(F&& body) noexcept {
    try {
        g_last_error.clear();
        body();
        return TGP_OK;
    } catch (const InvalidArgument& e) {
        return fail(TGP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const NumericalError& e) {
        return fail(TGP_ERR_NUMERICAL, e.what());
    } catch (const IoError& e) {
        return fail(TGP_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(TGP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(TGP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(TGP_ERR_INTERNAL, "unknown error");
    }
}

void require(bool ok, const char* message) {
    if (!ok) throw InvalidArgument(message);
}

template <class T>
void require_ptr(const T* p, const char* name) {
    if (p == nullptr) throw InvalidArgument(std::string(name) + " must not be null");
}

KernelFamily to_family(int family) {
    switch (family) {
        case TGP_KERNEL_CHT: return KernelFamily::kCht;
        case TGP_KERNEL_RBF: return KernelFamily::kRbf;
        case TGP_KERNEL_MATERN: return KernelFamily::kMatern;
        default: throw InvalidArgument("unknown kernel family " + std::to_string(family));
    }
}

int from_family(KernelFamily family) {
    switch (family) {
        case KernelFamily::kCht: return TGP_KERNEL_CHT;
        case KernelFamily::kRbf: return TGP_KERNEL_RBF;
        case KernelFamily::kMatern: return TGP_KERNEL_MATERN;
    }
    return TGP_KERNEL_CHT;
}

KernelSpec to_spec(const tgp_kernel_spec& c) {
    KernelSpec s;
    s.family = to_family(c.family);
    s.alpha = c.alpha;
    s.length_scale = c.length_scale;
    s.nu = c.nu;
    s.variance = c.variance;
    s.validate();
    return s;
}

tgp_kernel_spec from_spec(const KernelSpec& s) {
    return {from_family(s.family), s.alpha, s.length_scale, s.nu, s.variance};
}

VortexParams to_vortex(const tgp_vortex_params& c) {
    VortexParams v;
    v.vortex_count = c.vortex_count;
    v.radius_min = c.radius_min;
    v.radius_max = c.radius_max;
    v.amplitude_min = c.amplitude_min;
    v.amplitude_max = c.amplitude_max;
    v.sign_balance = c.sign_balance;
    v.validate();
    return v;
}

ObservationSet to_obs(const tgp_observations* c) {
    require_ptr(c, "observations");
    ObservationSet obs;
    obs.noise_variance = c->noise_variance;
    if (c->count > 0) {
        require_ptr(c->i1, "observations.i1");
        require_ptr(c->i2, "observations.i2");
        require_ptr(c->values, "observations.values");
    }
    obs.locations.reserve(c->count);
    for (std::size_t i = 0; i < c->count; ++i) obs.locations.push_back({c->i1[i], c->i2[i]});
    obs.values.assign(c->values, c->values + c->count);
    obs.validate();
    return obs;
}

TrialConfig to_trial_config(const tgp_trial_config* c) {
    require_ptr(c, "config");
    TrialConfig cfg;
    cfg.grid_n = c->grid_n;
    cfg.alpha_true = c->alpha_true;
    cfg.m = c->m;
    cfg.noise_ratio = c->noise_ratio;
    cfg.master_seed = c->master_seed;
    require(c->truth_kind == TGP_TRUTH_GAUSSIAN || c->truth_kind == TGP_TRUTH_VORTEX, "unknown truth kind");
    cfg.truth_kind = c->truth_kind == TGP_TRUTH_VORTEX ? TruthKind::kVortex : TruthKind::kGaussianCht;
    cfg.vortex = to_vortex(c->vortex);
    if (c->candidate_count > 0) {
        require_ptr(c->candidates, "config.candidates");
        require(c->candidate_count <= TGP_MAX_CANDIDATES, "too many kernel candidates");
        cfg.kernel_candidates.clear();
        for (std::size_t i = 0; i < c->candidate_count; ++i) cfg.kernel_candidates.push_back(to_spec(c->candidates[i]));
    }
    cfg.validate();
    return cfg;
}

void copy_trial(const TrialResult& r, tgp_trial_result& out) {
    out = {};
    out.seed = r.seed;
    out.improvement_pct = r.improvement_pct;
    out.kernel_count = std::min<std::size_t>(r.kernels.size(), TGP_MAX_CANDIDATES);
    out.winner = 0;
    for (std::size_t k = 0; k < out.kernel_count; ++k) {
        const auto& ko = r.kernels[k];
        out.kernels[k].spec = from_spec(ko.spec);
        out.kernels[k].relative_error = ko.relative_error;
        out.kernels[k].rmse = ko.rmse;
        if (ko.tag == r.winner) out.winner = int(k);
    }
}

tgp_sweep_point to_c(const SweepPoint& p) {
    return {p.axis_value, p.mean_improvement, p.std_improvement, p.win_rate, p.trial_count};
}

tgp_power_law to_c(const PowerLawFit& f) {
    return {f.exponent, f.exponent_stderr, f.intercept, f.k_min, f.k_max, f.r_squared};
}

void copy_values(std::span<const double> src, double* out, std::size_t capacity) {
    require_ptr(out, "out");
    require(capacity >= src.size(), "output buffer too small");
    std::copy(src.begin(), src.end(), out);
}

GridPoint checked_point(const GridSpec& grid, int i1, int i2) {
    const GridPoint p{i1, i2};
    require(grid.contains(p), "grid index out of range");
    return p;
}

}  // namespace

extern "C" {

const char* tgp_version(void) { return TURBOGP_VERSION; }

const char* tgp_last_error(void) { return g_last_error.c_str(); }

tgp_kernel_spec tgp_default_kernel_spec(int family) {
    KernelSpec s;
    switch (family) {
        case TGP_KERNEL_RBF: s = KernelSpec::rbf(0.5); break;
        case TGP_KERNEL_MATERN: s = KernelSpec::matern(1.5, 0.5); break;
        default: s = KernelSpec::cht(1.5); break;
    }
    return from_spec(s);
}

tgp_vortex_params tgp_default_vortex_params(void) {
    const VortexParams v;
    return {v.vortex_count, v.radius_min, v.radius_max, v.amplitude_min, v.amplitude_max, v.sign_balance};
}

tgp_status tgp_field_create(int n, const double* values, tgp_field** out) {
    return guarded([&] {
        require_ptr(out, "out");
        require_ptr(values, "values");
        const GridSpec grid(n);
        std::vector<double> v(values, values + grid.size());
        *out = new tgp_field{RealField(grid, std::move(v))};
    });
}

tgp_status tgp_field_sample(const tgp_kernel_spec* spec, int n, uint64_t seed, tgp_field** out) {
    return guarded([&] {
        require_ptr(spec, "spec");
        require_ptr(out, "out");
        const GridSpec grid(n);
        const auto density = spectral_density(to_spec(*spec), n / 2);
        *out = new tgp_field{sample_gaussian_field(density, grid, seed)};
    });
}

tgp_status tgp_field_cht_truth(double alpha, int n, uint64_t seed, tgp_field** out, double* scale_factor) {
    return guarded([&] {
        require_ptr(out, "out");
        auto truth = generate_cht_truth(alpha, GridSpec(n), seed);
        if (scale_factor != nullptr) *scale_factor = truth.scale_factor;
        *out = new tgp_field{std::move(truth.field)};
    });
}

tgp_status tgp_field_vortex_truth(const tgp_vortex_params* params, int n, uint64_t seed, tgp_field** out) {
    return guarded([&] {
        require_ptr(params, "params");
        require_ptr(out, "out");
        auto truth = generate_vortex_truth(to_vortex(*params), GridSpec(n), seed);
        *out = new tgp_field{std::move(truth.field)};
    });
}

void tgp_field_destroy(tgp_field* field) { delete field; }

int tgp_field_n(const tgp_field* field) { return field ? field->field.grid().n() : 0; }

tgp_status tgp_field_values(const tgp_field* field, double* out, size_t capacity) {
    return guarded([&] {
        require_ptr(field, "field");
        copy_values(field->field.values(), out, capacity);
    });
}

tgp_status tgp_field_biot_savart(const tgp_field* vorticity, tgp_field** u1, tgp_field** u2) {
    return guarded([&] {
        require_ptr(vorticity, "vorticity");
        require_ptr(u1, "u1");
        require_ptr(u2, "u2");
        auto vel = biot_savart(to_spectral(vorticity->field));
        auto* a = new tgp_field{std::move(vel.u1)};
        *u1 = a;
        *u2 = new tgp_field{std::move(vel.u2)};
    });
}

tgp_status tgp_field_spectrum(const tgp_field* field, tgp_shell* out, size_t capacity, size_t* count) {
    return guarded([&] {
        require_ptr(field, "field");
        require_ptr(count, "count");
        const auto est = radial_spectrum(field->field);
        *count = est.shells.size();
        if (out == nullptr) return;
        require(capacity >= est.shells.size(), "output buffer too small");
        for (std::size_t i = 0; i < est.shells.size(); ++i) {
            const auto& s = est.shells[i];
            out[i] = {s.k, s.shell_avg_power, s.shell_sum_power, s.mode_count};
        }
    });
}

tgp_status tgp_fit_power_law(const tgp_shell* shells, size_t count, int k_min, int k_max, int use_sum,
                             tgp_power_law* out) {
    return guarded([&] {
        require_ptr(shells, "shells");
        require_ptr(out, "out");
        SpectrumEstimate est;
        for (std::size_t i = 0; i < count; ++i) {
            require(shells[i].k == int(i) + 1, "shells must be consecutive from k = 1");
            est.shells.push_back({shells[i].k, shells[i].shell_avg_power, shells[i].shell_sum_power,
                                  shells[i].mode_count});
        }
        *out = to_c(fit_power_law(est, k_min, k_max, use_sum != 0));
    });
}

tgp_status tgp_field_save(const tgp_field* field, const char* header_path, const char* payload_path, int kind,
                          const uint64_t* seed, const double* alpha) {
    return guarded([&] {
        require_ptr(field, "field");
        require_ptr(header_path, "header_path");
        require_ptr(payload_path, "payload_path");
        std::optional<std::uint64_t> s;
        std::optional<double> a;
        if (seed) s = *seed;
        if (alpha) a = *alpha;
        if (kind == TGP_FIELD_REAL) {
            write_field(field->field, header_path, payload_path, s, a);
        } else if (kind == TGP_FIELD_SPECTRAL) {
            write_field(to_spectral(field->field), header_path, payload_path, s, a);
        } else {
            throw InvalidArgument("unknown field kind");
        }
    });
}

tgp_status tgp_field_load(const char* header_path, const char* payload_path, tgp_field** out) {
    return guarded([&] {
        require_ptr(header_path, "header_path");
        require_ptr(payload_path, "payload_path");
        require_ptr(out, "out");
        *out = new tgp_field{read_real_field(header_path, payload_path)};
    });
}

tgp_status tgp_kernel_build(const tgp_kernel_spec* spec, int n, tgp_kernel** out) {
    return guarded([&] {
        require_ptr(spec, "spec");
        require_ptr(out, "out");
        *out = new tgp_kernel{build_kernel_table(to_spec(*spec), GridSpec(n))};
    });
}

void tgp_kernel_destroy(tgp_kernel* kernel) { delete kernel; }

tgp_status tgp_kernel_value(const tgp_kernel* kernel, int a, int b, double* out) {
    return guarded([&] {
        require_ptr(kernel, "kernel");
        require_ptr(out, "out");
        *out = kernel->table.value(a, b);
    });
}

tgp_status tgp_direct_kernel_sum(const tgp_kernel_spec* spec, double dx1, double dx2, int truncation, double* out) {
    return guarded([&] {
        require_ptr(spec, "spec");
        require_ptr(out, "out");
        *out = direct_kernel_sum(to_spec(*spec), dx1, dx2, truncation);
    });
}

tgp_status tgp_check_admissible(double alpha, double gamma, int* admissible) {
    return guarded([&] {
        require_ptr(admissible, "admissible");
        *admissible = check_admissible(alpha, gamma) ? 1 : 0;
    });
}

tgp_status tgp_forcing_to_alpha(double beta, double gamma, double* alpha) {
    return guarded([&] {
        require_ptr(alpha, "alpha");
        *alpha = forcing_to_alpha({gamma, beta});
    });
}

tgp_status tgp_observe(const tgp_field* truth, int m, double noise_ratio, uint64_t seed, int* i1, int* i2,
                       double* values, double* noise_variance) {
    return guarded([&] {
        require_ptr(truth, "truth");
        require_ptr(i1, "i1");
        require_ptr(i2, "i2");
        require_ptr(values, "values");
        const auto obs = observe(truth->field, m, noise_ratio, seed);
        for (std::size_t i = 0; i < obs.size(); ++i) {
            i1[i] = obs.locations[i].i1;
            i2[i] = obs.locations[i].i2;
            values[i] = obs.values[i];
        }
        if (noise_variance) *noise_variance = obs.noise_variance;
    });
}

tgp_status tgp_posterior_fit(const tgp_kernel* kernel, const tgp_observations* obs, tgp_posterior** out) {
    return guarded([&] {
        require_ptr(kernel, "kernel");
        require_ptr(out, "out");
        *out = new tgp_posterior{fit_posterior(kernel->table, to_obs(obs))};
    });
}

void tgp_posterior_destroy(tgp_posterior* post) { delete post; }

tgp_status tgp_posterior_mean(const tgp_posterior* post, double* out, size_t capacity) {
    return guarded([&] {
        require_ptr(post, "posterior");
        copy_values(post->post.mean_field().values(), out, capacity);
    });
}

tgp_status tgp_posterior_variance(const tgp_posterior* post, double* out, size_t capacity) {
    return guarded([&] {
        require_ptr(post, "posterior");
        copy_values(post->post.variance_field().values(), out, capacity);
    });
}

tgp_status tgp_posterior_interval(const tgp_posterior* post, int i1, int i2, double level, double* lo, double* hi) {
    return guarded([&] {
        require_ptr(post, "posterior");
        require_ptr(lo, "lo");
        require_ptr(hi, "hi");
        const auto [a, b] = credible_interval(post->post, checked_point(post->post.kernel().grid(), i1, i2), level);
        *lo = a;
        *hi = b;
    });
}

tgp_status tgp_posterior_energy_variance(const tgp_posterior* post, double* out) {
    return guarded([&] {
        require_ptr(post, "posterior");
        require_ptr(out, "out");
        *out = energy_variance(post->post);
    });
}

tgp_status tgp_posterior_log_likelihood(const tgp_posterior* post, double* out) {
    return guarded([&] {
        require_ptr(post, "posterior");
        require_ptr(out, "out");
        *out = post->post.log_marginal_likelihood();
    });
}

tgp_status tgp_posterior_clamped(const tgp_posterior* post, int* out) {
    return guarded([&] {
        require_ptr(post, "posterior");
        require_ptr(out, "out");
        *out = post->post.clamped_count();
    });
}

tgp_status tgp_select_hyperparameter(const tgp_kernel_spec* candidates, size_t count, const tgp_observations* obs,
                                     int n, size_t* best) {
    return guarded([&] {
        require_ptr(candidates, "candidates");
        require_ptr(best, "best");
        std::vector<KernelSpec> specs;
        for (std::size_t i = 0; i < count; ++i) specs.push_back(to_spec(candidates[i]));
        const auto chosen = select_hyperparameter(specs, to_obs(obs), GridSpec(n));
        for (std::size_t i = 0; i < count; ++i) {
            const auto& s = specs[i];
            if (s.family == chosen.family && s.alpha == chosen.alpha && s.length_scale == chosen.length_scale &&
                s.nu == chosen.nu && s.variance == chosen.variance) {
                *best = i;
                return;
            }
        }
        throw Error("selected candidate not found");
    });
}

tgp_status tgp_place_sensors(const tgp_kernel* kernel, const tgp_observations* obs, const int* cand_i1,
                             const int* cand_i2, size_t candidate_count, int count, int* out_i1, int* out_i2) {
    return guarded([&] {
        require_ptr(kernel, "kernel");
        require_ptr(out_i1, "out_i1");
        require_ptr(out_i2, "out_i2");
        const auto& grid = kernel->table.grid();
        std::vector<GridPoint> candidates;
        if (candidate_count == 0) {
            candidates.reserve(grid.size());
            for (std::size_t l = 0; l < grid.size(); ++l) candidates.push_back(grid.point(l));
        } else {
            require_ptr(cand_i1, "cand_i1");
            require_ptr(cand_i2, "cand_i2");
            for (std::size_t i = 0; i < candidate_count; ++i) candidates.push_back({cand_i1[i], cand_i2[i]});
        }
        ObservationSet o;
        if (obs != nullptr) o = to_obs(obs);
        const auto picks = greedy_sensor_placement(kernel->table, o, candidates, count);
        for (std::size_t i = 0; i < picks.size(); ++i) {
            out_i1[i] = picks[i].i1;
            out_i2[i] = picks[i].i2;
        }
    });
}

tgp_status tgp_run_trials(const tgp_trial_config* config, int trials, tgp_trial_result* out) {
    return guarded([&] {
        require_ptr(out, "out");
        require(trials > 0, "trials must be positive");
        const auto cfg = to_trial_config(config);
        const auto results = run_trials(cfg, trials, config->jobs);
        for (std::size_t t = 0; t < results.size(); ++t) copy_trial(results[t], out[t]);
    });
}

tgp_status tgp_sweep_alpha(const tgp_trial_config* config, const double* alphas, size_t count, int trials,
                           tgp_sweep_point* out) {
    return guarded([&] {
        require_ptr(alphas, "alphas");
        require_ptr(out, "out");
        const auto cfg = to_trial_config(config);
        const auto res = sweep_alpha(cfg, std::span<const double>(alphas, count), trials, config->jobs);
        for (std::size_t i = 0; i < res.points.size(); ++i) out[i] = to_c(res.points[i]);
    });
}

tgp_status tgp_sweep_density(const tgp_trial_config* config, const int* m_values, size_t count, int trials,
                             tgp_sweep_point* out) {
    return guarded([&] {
        require_ptr(m_values, "m_values");
        require_ptr(out, "out");
        const auto cfg = to_trial_config(config);
        const auto res = sweep_density(cfg, std::span<const int>(m_values, count), trials, config->jobs);
        for (std::size_t i = 0; i < res.points.size(); ++i) out[i] = to_c(res.points[i]);
    });
}

tgp_status tgp_spectral_validation(const double* alphas, size_t count, int n, int seeds_per_alpha,
                                   uint64_t master_seed, int k_min, int k_max, tgp_validation_row* out) {
    return guarded([&] {
        require_ptr(alphas, "alphas");
        require_ptr(out, "out");
        const auto rows = spectral_validation(std::span<const double>(alphas, count), GridSpec(n), seeds_per_alpha,
                                              master_seed, k_min, k_max);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out[i] = {rows[i].alpha, to_c(rows[i].shell_sum_fit), to_c(rows[i].mode_avg_fit)};
        }
    });
}

}  // extern "C"
