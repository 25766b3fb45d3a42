/// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
/// nonzero if any selected criterion fails. `--criterion K` runs only K.
/// All statistical criteria use master seed 1, fixed before any run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "turbogp/experiments.hpp"
#include "turbogp/gp_inference.hpp"
#include "turbogp/kernels.hpp"
#include "turbogp/rng.hpp"
#include "turbogp/spectral_field.hpp"

using namespace turbogp;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMasterSeed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;  // <= 0: no limit
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- 1, 2: spectral exponents -------------------------------------------

Outcome shell_sum_exponents() {
    const std::vector<double> alphas{1.5, 2.0, 2.5};
    const auto rows = spectral_validation(alphas, GridSpec(128), 10, kMasterSeed);
    bool ok = true;
    std::string d = "exponents";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double e = rows[i].shell_sum_fit.exponent;
        const double target = -(2.0 * alphas[i] + 1.0);
        ok = ok && std::abs(e - target) <= 0.35;
        d += " " + fmt("%.3f", e);
    }
    d += "; steps";
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double step = rows[i].shell_sum_fit.exponent - rows[i - 1].shell_sum_fit.exponent;
        ok = ok && std::abs(step + 1.0) <= 0.3;
        d += " " + fmt("%.3f", step);
    }
    return {ok, d};
}

Outcome mode_avg_exponent() {
    const std::vector<double> alphas{1.5};
    const double e = spectral_validation(alphas, GridSpec(128), 10, kMasterSeed)[0].mode_avg_fit.exponent;
    return {std::abs(e + 5.0) <= 0.15, "exponent " + fmt("%.4f", e) + " (target -5 +/- 0.15)"};
}

// ---- 3: oracle equivalence ---------------------------------------------

/// Dense prior covariance assembled from the direct spectral sum, without
/// the FFT table.
Eigen::MatrixXd dense_direct_prior(const KernelSpec& spec, const GridSpec& g) {
    const int n = g.n();
    std::vector<double> by_offset(g.size());
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            by_offset[g.index(a, b)] = direct_kernel_sum(spec, a * g.spacing(), b * g.spacing(), n / 2);
        }
    }
    const auto p = Eigen::Index(g.size());
    Eigen::MatrixXd k(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        const GridPoint x = g.point(std::size_t(i));
        for (Eigen::Index j = 0; j < p; ++j) {
            const GridPoint y = g.point(std::size_t(j));
            k(i, j) = by_offset[g.index(g.wrap(x.i1 - y.i1), g.wrap(x.i2 - y.i2))];
        }
    }
    return k;
}

struct DensePosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

DensePosterior dense_condition(const Eigen::MatrixXd& k, const GridSpec& g, const std::vector<GridPoint>& at,
                               const std::vector<double>& y, double noise) {
    const auto m = Eigen::Index(at.size());
    if (m == 0) return {Eigen::VectorXd::Zero(k.rows()), k};
    std::vector<Eigen::Index> idx;
    for (const auto& p : at) idx.push_back(Eigen::Index(g.index(p)));
    Eigen::MatrixXd kx(k.rows(), m);
    for (Eigen::Index i = 0; i < m; ++i) kx.col(i) = k.col(idx[std::size_t(i)]);
    Eigen::MatrixXd gm(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) gm(i, j) = k(idx[std::size_t(i)], idx[std::size_t(j)]);
    }
    gm.diagonal().array() += noise;
    const Eigen::VectorXd yy = Eigen::Map<const Eigen::VectorXd>(y.data(), m);
    const Eigen::LDLT<Eigen::MatrixXd> solver(gm);
    return {kx * solver.solve(yy), k - kx * solver.solve(kx.transpose())};
}

ObservationSet random_observations(const GridSpec& g, int m, double noise, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<int> pick(0, g.n() - 1);
    std::normal_distribution<double> normal;
    ObservationSet obs;
    obs.noise_variance = noise;
    while (int(obs.size()) < m) {
        const GridPoint p{pick(rng), pick(rng)};
        if (std::find(obs.locations.begin(), obs.locations.end(), p) != obs.locations.end()) continue;
        obs.locations.push_back(p);
        obs.values.push_back(normal(rng));
    }
    return obs;
}

/// Greedy design by full dense re-conditioning at every step; ties within
/// 1e-10 sigma^2 go to the lowest linear index.
std::vector<std::size_t> exhaustive_greedy(const Eigen::MatrixXd& k, const GridSpec& g, const ObservationSet& obs,
                                           int count, double sigma2) {
    const double noise = obs.noise_variance > 0.0 ? obs.noise_variance : kJitterStart * sigma2;
    std::vector<GridPoint> at = obs.locations;
    std::vector<double> y(at.size(), 0.0);
    std::vector<std::size_t> picks;
    for (int step = 0; step < count; ++step) {
        const Eigen::VectorXd var = dense_condition(k, g, at, y, noise).cov.diagonal();
        std::size_t best = 0;
        for (std::size_t i = 1; i < g.size(); ++i) {
            if (var(Eigen::Index(i)) > var(Eigen::Index(best)) + 1e-10 * sigma2) best = i;
        }
        picks.push_back(best);
        at.push_back(g.point(best));
        y.push_back(0.0);
    }
    return picks;
}

Outcome oracle_equivalence() {
    double table_err = 0.0, mean_err = 0.0, var_err = 0.0, energy_err = 0.0;
    int greedy_cases = 0, greedy_match = 0;
    for (int n : {8, 16}) {
        const GridSpec g(n);
        for (const KernelSpec& spec : {KernelSpec::cht(1.5), KernelSpec::rbf(0.7), KernelSpec::matern(1.5, 0.6, 2.0)}) {
            const KernelTable t = build_kernel_table(spec, g);
            const Eigen::MatrixXd k = dense_direct_prior(spec, g);
            double worst = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                worst = std::max(worst, std::abs(t.between(g.point(i), GridPoint{0, 0}) - k(Eigen::Index(i), 0)));
            }
            table_err = std::max(table_err, worst / k.cwiseAbs().maxCoeff());

            for (int m : {1, 3, 7}) {
                const ObservationSet obs = random_observations(g, m, 0.05, std::uint64_t(1000 * n + m));
                const Posterior post = fit_posterior(t, obs);
                const DensePosterior d = dense_condition(k, g, obs.locations, obs.values, obs.noise_variance);
                double dm = 0.0, dv = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    dm = std::max(dm, std::abs(post.mean_field()[i] - d.mean(Eigen::Index(i))));
                    dv = std::max(dv, std::abs(post.variance_field()[i] - d.cov(Eigen::Index(i), Eigen::Index(i))));
                }
                mean_err = std::max(mean_err, dm / d.mean.cwiseAbs().maxCoeff());
                var_err = std::max(var_err, dv / d.cov.diagonal().cwiseAbs().maxCoeff());
                const double h4 = g.quadrature_weight() * g.quadrature_weight();
                const double dense_energy = 0.25 * h4 * d.cov.squaredNorm();
                energy_err = std::max(energy_err, std::abs(energy_variance(post) - dense_energy) / dense_energy);
            }

            std::vector<GridPoint> cands;
            for (std::size_t i = 0; i < g.size(); ++i) cands.push_back(g.point(i));
            for (double noise : {0.0, 0.01}) {
                const ObservationSet obs = random_observations(g, 2, noise, std::uint64_t(77 * n));
                const auto expected = exhaustive_greedy(k, g, obs, 6, spec.variance);
                for (auto method : {PlacementMethod::kIncremental, PlacementMethod::kRefit}) {
                    const auto picks = greedy_sensor_placement(t, obs, cands, 6, method);
                    std::vector<std::size_t> got;
                    for (const auto& p : picks) got.push_back(g.index(p));
                    ++greedy_cases;
                    if (got == expected) ++greedy_match;
                }
            }
        }
    }
    const bool ok = table_err < 1e-10 && mean_err < 1e-8 && var_err < 1e-8 && energy_err < 1e-8 &&
                    greedy_match == greedy_cases;
    return {ok, "table " + fmt("%.2e", table_err) + ", mean " + fmt("%.2e", mean_err) + ", variance " +
                    fmt("%.2e", var_err) + ", energy " + fmt("%.2e", energy_err) + ", greedy " +
                    std::to_string(greedy_match) + "/" + std::to_string(greedy_cases) + " identical"};
}

// ---- 4: sampling covariance --------------------------------------------

Outcome sampling_covariance() {
    const GridSpec g(16);
    const KernelSpec spec = KernelSpec::cht(1.5);
    const auto density = spectral_density(spec, g.n() / 2);
    const KernelTable table = build_kernel_table(spec, g);
    const int samples = 10000;
    const auto p = Eigen::Index(g.size());
    Eigen::MatrixXd x(samples, p);
    for (int s = 0; s < samples; ++s) {
        const RealField f = sample_gaussian_field(density, g, derive_seed(kMasterSeed, {std::uint64_t(s)}));
        for (Eigen::Index i = 0; i < p; ++i) x(s, i) = f[std::size_t(i)];
    }
    const Eigen::MatrixXd sum = x.transpose() * x;
    const Eigen::MatrixXd x2 = x.array().square().matrix();
    const Eigen::MatrixXd sum_sq = x2.transpose() * x2;
    const Eigen::VectorXd mean = x.colwise().mean();
    int bad_cov = 0, bad_mean = 0;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        const double sd = std::sqrt((x.col(i).array() - mean(i)).square().sum() / (samples - 1));
        if (std::abs(mean(i)) > 5.0 * sd / std::sqrt(double(samples))) ++bad_mean;
        for (Eigen::Index j = 0; j < p; ++j) {
            // The mean is known to be zero, so the second moment estimates the covariance.
            const double c = sum(i, j) / samples;
            const double se = std::sqrt((sum_sq(i, j) / samples - c * c) / samples);
            const double z = std::abs(c - table.between(g.point(std::size_t(i)), g.point(std::size_t(j)))) / se;
            worst = std::max(worst, z);
            if (z > 5.0) ++bad_cov;
        }
    }
    return {bad_cov == 0 && bad_mean == 0, std::to_string(bad_cov) + " covariance and " + std::to_string(bad_mean) +
                                               " mean entries beyond 5 SE; largest z " + fmt("%.2f", worst)};
}

// ---- 5-8: reconstruction experiments -----------------------------------

TrialConfig gaussian_config() {
    TrialConfig c;
    c.grid_n = 128;
    c.alpha_true = 1.5;
    c.m = 100;
    c.noise_ratio = 0.1;
    c.master_seed = kMasterSeed;
    c.kernel_candidates = {KernelSpec::cht(1.5), KernelSpec::rbf(0.5)};
    return c;
}

Outcome gaussian_truths() {
    const auto results = run_trials(gaussian_config(), 20);
    const SweepPoint p = aggregate(0.0, results);
    return {p.mean_improvement > 0.0 && p.win_rate >= 0.55,
            "mean improvement " + fmt("%+.2f", p.mean_improvement) + "% (sd " + fmt("%.2f", p.std_improvement) +
                "), win rate " + fmt("%.2f", p.win_rate)};
}

Outcome density_scaling() {
    const std::vector<int> ms{20, 60, 150};
    const SweepResult s = sweep_density(gaussian_config(), ms, 20);
    std::string d = "mean improvement";
    for (const auto& p : s.points) d += " m=" + std::to_string(int(p.axis_value)) + ":" + fmt("%+.2f", p.mean_improvement);
    return {s.points.back().mean_improvement > s.points.front().mean_improvement, d};
}

Outcome alpha_shift() {
    const std::vector<double> alphas{0.75, 1.0, 1.25, 1.5};
    const SweepResult s = sweep_alpha(gaussian_config(), alphas, 20);
    bool all_positive = true;
    std::size_t best = 0;
    std::string d = "mean improvement";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        all_positive = all_positive && s.points[i].mean_improvement > 0.0;
        if (s.points[i].mean_improvement > s.points[best].mean_improvement) best = i;
        d += " " + fmt("%.2f", alphas[i]) + ":" + fmt("%+.2f", s.points[i].mean_improvement);
    }
    d += "; argmax " + fmt("%.2f", alphas[best]);
    return {all_positive && alphas[best] <= 1.5, d};
}

Outcome vortex_benchmark() {
    TrialConfig c = gaussian_config();
    c.truth_kind = TruthKind::kVortex;
    c.m = 60;
    c.noise_ratio = 0.08;
    const auto results = run_trials(c, 20);
    double cht = 0.0, rbf = 0.0, wins = 0.0;
    for (const auto& r : results) {
        cht += r.kernels[0].relative_error;
        rbf += r.kernels[1].relative_error;
        wins += r.cht_wins() ? 1.0 : 0.0;
    }
    cht /= 20.0;
    rbf /= 20.0;
    const double rate = wins / 20.0;
    return {cht < rbf && rate >= 0.5,
            "mean eps CHT " + fmt("%.4f", cht) + " vs RBF " + fmt("%.4f", rbf) + ", win rate " + fmt("%.2f", rate)};
}

// ---- 9: posterior properties -------------------------------------------

Outcome posterior_properties() {
    double var_min = 0.0, var_excess = -1.0;
    auto track_variance = [&](const Posterior& post) {
        const double s2 = post.kernel().variance();
        for (double v : post.variance_field().values()) {
            var_min = std::min(var_min, v);
            var_excess = std::max(var_excess, v - s2);
        }
    };

    // Near-noiseless interpolation and permutation invariance at N = 64.
    const GridSpec g64(64);
    const KernelTable t64 = build_kernel_table(KernelSpec::cht(1.5), g64);
    const RealField truth64 = generate_cht_truth(1.5, g64, derive_seed(kMasterSeed, {9, 0})).field;
    ObservationSet exact = observe(truth64, 100, 0.0, derive_seed(kMasterSeed, {9, 1}));
    exact.noise_variance = 1e-10;
    const Posterior interp = fit_posterior(t64, exact);
    track_variance(interp);
    double interp_err = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        interp_err = std::max(interp_err, std::abs(interp.mean_at(exact.locations[i]) - exact.values[i]));
    }

    const ObservationSet noisy = observe(truth64, 100, 0.1, derive_seed(kMasterSeed, {9, 2}));
    ObservationSet shuffled = noisy;
    std::vector<std::size_t> order(noisy.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(derive_seed(kMasterSeed, {9, 3}));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); ++i) {
        shuffled.locations[i] = noisy.locations[order[i]];
        shuffled.values[i] = noisy.values[order[i]];
    }
    const Posterior a = fit_posterior(t64, noisy);
    const Posterior b = fit_posterior(t64, shuffled);
    track_variance(a);
    double perm = 0.0;
    for (std::size_t i = 0; i < g64.size(); ++i) {
        perm = std::max(perm, std::abs(a.mean_field()[i] - b.mean_field()[i]));
        perm = std::max(perm, std::abs(a.variance_field()[i] - b.variance_field()[i]));
    }

    // 95% coverage over matched-kernel trials with the trial seeding scheme.
    const TrialConfig c = gaussian_config();
    const GridSpec g(c.grid_n);
    const KernelTable t = build_kernel_table(KernelSpec::cht(c.alpha_true), g);
    const double z = two_sided_quantile(0.95);
    double coverage = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const std::uint64_t seed = trial_seed(c.master_seed, s);
        const RealField truth = generate_cht_truth(c.alpha_true, g, derive_seed(seed, Stream::kTruth)).field;
        const Posterior post = fit_posterior(t, observe(truth, c.m, c.noise_ratio, derive_seed(seed, Stream::kLocations)));
        track_variance(post);
        int hit = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            hit += std::abs(truth[i] - post.mean_field()[i]) <= z * std::sqrt(post.variance_field()[i]);
        }
        coverage += double(hit) / double(g.size());
    }
    coverage /= 20.0;

    const bool ok = var_min >= 0.0 && var_excess <= 1e-8 && interp_err < 1e-6 && perm <= 1e-12 && coverage >= 0.90 &&
                    coverage <= 0.99;
    return {ok, "min variance " + fmt("%.2e", var_min) + ", max excess " + fmt("%.2e", var_excess) +
                    ", interpolation " + fmt("%.2e", interp_err) + ", permutation " + fmt("%.2e", perm) +
                    ", coverage " + fmt("%.4f", coverage)};
}

// ---- 10: Biot-Savart ----------------------------------------------------

Outcome biot_savart_checks() {
    const GridSpec g(64);
    const auto density = spectral_density(KernelSpec::cht(1.5), g.n() / 2);
    double div = 0.0, rel = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const SpectralField w = sample_gaussian_coefficients(density, g, derive_seed(kMasterSeed, {10, s}));
        div = std::max(div, max_spectral_divergence(biot_savart_spectral(w)));
        const RealField wf = to_physical(w);
        const VelocityField u = biot_savart(w);
        const RealField c = curl(u.u1, u.u2);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            num += (c[i] - wf[i]) * (c[i] - wf[i]);
            den += wf[i] * wf[i];
        }
        rel = std::max(rel, std::sqrt(num / den));
    }
    return {div == 0.0 && rel <= 1e-10, "max divergence " + fmt("%.1e", div) + ", curl relative error " + fmt("%.2e", rel)};
}

// ---- 11: admissibility -------------------------------------------------

Outcome admissibility_table() {
    // Exact rule in tenths: gamma = 1 needs alpha > 0, otherwise alpha > 2 - gamma.
    const int gammas[] = {10, 9, 8, 7};
    const int alphas[] = {5, 11, 13, 25};
    int agree = 0, total = 0;
    std::string table;
    for (int gt : gammas) {
        for (int at : alphas) {
            const bool expected = gt == 10 ? at > 0 : at > 20 - gt;
            const bool got = check_admissible(at / 10.0, gt / 10.0);
            ++total;
            agree += got == expected;
            table += got ? '1' : '0';
        }
        table += gt == 7 ? "" : "/";
    }
    return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " entries match (" + table + ")"};
}

// ---- 12: CLI determinism -------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome cli_determinism() {
    const fs::path root = fs::temp_directory_path() / ("turbogp_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    struct Run {
        std::string args;
        std::vector<std::string> files;
    };
    const Run runs[] = {
        {"sample --n 128 --alpha 1.5 --seed 7", {"field.bin", "field.json", "spectrum.csv"}},
        {"sample --n 64 --alpha 2 --format spectral --seed 3", {"field.bin", "field.json", "spectrum.csv"}},
        {"validate-spectrum --alphas 1.5,2.0,2.5 --n 128 --seeds 10 --estimator both --seed 1", {"exponents.csv"}},
        {"compare --n 64 --m 60 --trials 6 --seed 1", {"trials.csv"}},
        {"sweep-density --n 64 --m 20,60 --trials 4 --seed 1", {"density.csv"}},
        {"sweep-alpha --n 64 --m 40 --alphas 1.0,1.5 --trials 4 --seed 1", {"alpha.csv"}},
        {"place-sensors --n 16 --count 8", {"sensors.csv"}},
        {"reconstruct --n 64 --m 80 --seed 2", {"mean.bin", "variance.bin", "observations.csv"}},
    };
    int identical = 0, total = 0, failures = 0;
    std::string bad;
    for (std::size_t r = 0; r < std::size(runs); ++r) {
        std::string first[8];
        for (int rep = 0; rep < 2; ++rep) {
            // The repeat uses a different thread count; output must not depend on it.
            const fs::path dir = root / (std::to_string(r) + "_" + std::to_string(rep));
            const std::string cmd = std::string("\"") + TURBOGP_CLI_PATH + "\" " + runs[r].args + " --jobs " +
                                    (rep == 0 ? "1" : "3") + " --out \"" + dir.string() + "\" > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                ++failures;
                bad += " [" + runs[r].args + " failed]";
                continue;
            }
            for (std::size_t f = 0; f < runs[r].files.size(); ++f) {
                const std::string content = slurp(dir / runs[r].files[f]);
                if (rep == 0) {
                    first[f] = content;
                    continue;
                }
                ++total;
                if (!content.empty() && content == first[f]) {
                    ++identical;
                } else {
                    bad += " [" + runs[r].args + ": " + runs[r].files[f] + "]";
                }
            }
        }
    }
    fs::remove_all(root);
    return {failures == 0 && identical == total && total > 0,
            std::to_string(identical) + "/" + std::to_string(total) + " outputs byte-identical" + bad};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "shell-sum spectral exponents", 30, shell_sum_exponents},
        {2, "mode-averaged density exponent", 30, mode_avg_exponent},
        {3, "oracle equivalence", 10, oracle_equivalence},
        {4, "field sampling covariance", 60, sampling_covariance},
        {5, "CHT vs tuned RBF on Gaussian truths", 0, gaussian_truths},
        {6, "improvement grows with observation density", 0, density_scaling},
        {7, "prior exponent sweep", 0, alpha_shift},
        {8, "vortex benchmark", 0, vortex_benchmark},
        {9, "posterior properties", 60, posterior_properties},
        {10, "Biot-Savart", 5, biot_savart_checks},
        {11, "admissibility gate", 0, admissibility_table},
        {12, "CLI determinism", 60, cli_determinism},
    };

    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion K]\n", argv[0]);
            return 2;
        }
    }
    if (only != 0 && (only < 1 || only > int(criteria.size()))) {
        std::fprintf(stderr, "criterion must lie in 1..%zu\n", criteria.size());
        return 2;
    }

    int failed = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0 && secs > c.time_limit_s) {
            o.pass = false;
            o.detail += "; over the " + fmt("%.0f", c.time_limit_s) + " s budget";
        }
        std::printf("%s  %2d  %-44s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
