#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "turbogp/error.hpp"
#include "turbogp/experiments.hpp"
#include "turbogp/rng.hpp"

using namespace turbogp;

namespace {

double excess_kurtosis(const RealField& f) {
    const double mu = f.mean();
    double m2 = 0.0, m4 = 0.0;
    for (double v : f.values()) {
        const double d = (v - mu) * (v - mu);
        m2 += d;
        m4 += d * d;
    }
    m2 /= double(f.grid().size());
    m4 /= double(f.grid().size());
    return m4 / (m2 * m2) - 3.0;
}

bool same_result(const TrialResult& a, const TrialResult& b) {
    if (a.seed != b.seed || a.winner != b.winner || a.improvement_pct != b.improvement_pct) return false;
    if (a.kernels.size() != b.kernels.size()) return false;
    for (std::size_t k = 0; k < a.kernels.size(); ++k) {
        if (a.kernels[k].relative_error != b.kernels[k].relative_error || a.kernels[k].rmse != b.kernels[k].rmse ||
            a.kernels[k].spec.length_scale != b.kernels[k].spec.length_scale) {
            return false;
        }
    }
    return true;
}

TrialConfig small_config() {
    TrialConfig c;
    c.grid_n = 32;
    c.m = 40;
    c.master_seed = 12;
    return c;
}

}  // namespace

TEST_CASE("CHT truths have unit variance and depend on the seed") {
    const GridSpec g(64);
    const ScaledField a = generate_cht_truth(1.5, g, 1);
    const ScaledField b = generate_cht_truth(1.5, g, 2);
    CHECK(std::abs(a.field.variance() - 1.0) < 1e-12);
    CHECK(a.scale_factor > 0.0);
    double diff = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(a.field[i] - b.field[i]));
    CHECK(diff > 0.1);
    CHECK_THROWS_AS(generate_cht_truth(0.0, g, 1), InvalidArgument);
}

TEST_CASE("CHT truth spectrum follows the shell-sum law") {
    const GridSpec g(128);
    const PowerLawFit fit = fit_power_law(radial_spectrum(generate_cht_truth(1.5, g, 3).field), 4, 32, true);
    CHECK(std::abs(fit.exponent + 4.0) <= 0.25);
}

TEST_CASE("single vortex peaks at the grid point nearest its centre") {
    const GridSpec g(64);
    VortexParams p;
    p.vortex_count = 1;
    p.amplitude_min = p.amplitude_max = 1.0;
    p.sign_balance = 1.0;
    const std::uint64_t seed = 44;
    const RealField f = vortex_superposition(p, g, seed);
    // Replays the documented draw order: centre x1, centre x2, radius, amplitude, sign.
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> centre(0.0, kTwoPi);
    const double c1 = centre(rng), c2 = centre(rng);
    GridPoint nearest{};
    double best = 1e9;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const GridPoint q = g.point(i);
        auto gap = [](double d) {
            d = std::fmod(std::abs(d), kTwoPi);
            return std::min(d, kTwoPi - d);
        };
        const double d = std::hypot(gap(q.i1 * g.spacing() - c1), gap(q.i2 * g.spacing() - c2));
        if (d < best) {
            best = d;
            nearest = q;
        }
    }
    const auto peak = std::max_element(f.values().begin(), f.values().end()) - f.values().begin();
    CHECK(g.point(std::size_t(peak)) == nearest);
    CHECK(f.at(nearest) <= 1.0);
}

TEST_CASE("vortex truths are normalized and heavy tailed") {
    const GridSpec g(128);
    double kurt = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const RealField f = generate_vortex_truth(VortexParams{}, g, 300 + s).field;
        CHECK(std::abs(f.mean()) < 1e-12);
        CHECK(std::abs(f.variance() - 1.0) < 1e-12);
        kurt += excess_kurtosis(f);
    }
    CHECK(kurt / 20.0 > 0.5);
}

TEST_CASE("vortex parameters are validated") {
    VortexParams p;
    p.vortex_count = 0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.radius_max = 4.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.sign_balance = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("observation model") {
    const GridSpec g(32);
    const RealField truth = generate_cht_truth(1.5, g, 9).field;
    const ObservationSet exact = observe(truth, 200, 0.0, 4);
    CHECK(exact.noise_variance == 0.0);
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        CHECK(exact.values[i] == truth.at(exact.locations[i]));
        seen.insert(g.index(exact.locations[i]));
    }
    CHECK(seen.size() == 200);
    CHECK(observe(truth, 50, 0.1, 4).noise_variance == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(observe(truth, 50, 0.08, 4).noise_variance == doctest::Approx(0.0064).epsilon(1e-12));
    CHECK(observe(truth, int(g.size()), 0.0, 4).size() == g.size());
    CHECK_THROWS_AS(observe(truth, int(g.size()) + 1, 0.1, 4), InvalidArgument);
    CHECK_THROWS_AS(observe(truth, 0, 0.1, 4), InvalidArgument);

    const ObservationSet a = observe(truth, 30, 0.1, 5);
    const ObservationSet b = observe(truth, 30, 0.1, 5);
    CHECK(a.locations == b.locations);
    CHECK(a.values == b.values);
}

TEST_CASE("trials are deterministic and self-consistent") {
    const TrialConfig c = small_config();
    const TrialResult a = run_trial(c);
    const TrialResult b = run_trial(c);
    CHECK(same_result(a, b));
    REQUIRE(a.kernels.size() == 2);
    const auto& cht = a.kernels[0];
    const auto& rbf = a.kernels[1];
    CHECK(cht.tag == "cht");
    CHECK(rbf.tag == "rbf");
    CHECK(std::abs(a.improvement_pct - 100.0 * (rbf.relative_error - cht.relative_error) / rbf.relative_error) < 1e-12);
    CHECK(a.winner == (cht.relative_error < rbf.relative_error ? "cht" : "rbf"));

    // epsilon is rmse over the grid standard deviation of the truth.
    const RealField truth = generate_cht_truth(c.alpha_true, GridSpec(c.grid_n), derive_seed(c.master_seed, Stream::kTruth)).field;
    CHECK(std::abs(cht.relative_error - cht.rmse / std::sqrt(truth.variance())) < 1e-12);
}

TEST_CASE("exhaustive noiseless observation reconstructs the truth") {
    TrialConfig c;
    c.grid_n = 16;
    c.m = 256;
    c.noise_ratio = 0.0;
    c.kernel_candidates = {KernelSpec::cht(1.5)};
    c.master_seed = 2;
    CHECK(run_trial(c).kernels[0].relative_error < 1e-6);
}

TEST_CASE("parallel and serial batches are identical") {
    const TrialConfig c = small_config();
    const auto serial = run_trials(c, 6, 1);
    const auto parallel = run_trials(c, 6, 4);
    REQUIRE(serial.size() == 6);
    for (std::size_t t = 0; t < serial.size(); ++t) {
        CHECK(serial[t].seed == trial_seed(c.master_seed, t));
        CHECK(same_result(serial[t], parallel[t]));
    }
    std::set<std::uint64_t> seeds;
    for (const auto& r : serial) seeds.insert(r.seed);
    CHECK(seeds.size() == 6);
}

TEST_CASE("sweeps aggregate per point") {
    const TrialConfig c = small_config();
    const std::vector<double> one_alpha{c.alpha_true};
    const SweepResult sa = sweep_alpha(c, one_alpha, 4, 2);
    REQUIRE(sa.points.size() == 1);
    const SweepPoint direct = aggregate(c.alpha_true, run_trials(c, 4, 1));
    CHECK(sa.points[0].mean_improvement == direct.mean_improvement);
    CHECK(sa.points[0].std_improvement == direct.std_improvement);
    CHECK(sa.points[0].win_rate == direct.win_rate);

    const std::vector<int> ms{20, 60};
    const SweepResult sd = sweep_density(c, ms, 3, 2);
    REQUIRE(sd.points.size() == 2);
    for (const auto& p : sd.points) {
        CHECK(p.trial_count == 3);
        CHECK(p.win_rate >= 0.0);
        CHECK(p.win_rate <= 1.0);
    }
    CHECK(sd.trials[0][0].seed != sd.trials[1][0].seed);
    CHECK_THROWS_AS(sweep_alpha(c, std::vector<double>{}, 2), InvalidArgument);
    CHECK_THROWS_AS(sweep_density(c, std::vector<int>{}, 2), InvalidArgument);
}

TEST_CASE("alpha sweep shares truths across alphas") {
    const TrialConfig c = small_config();
    const std::vector<double> alphas{1.0, 1.5};
    const SweepResult s = sweep_alpha(c, alphas, 3, 1);
    for (int t = 0; t < 3; ++t) {
        CHECK(s.trials[0][std::size_t(t)].seed == s.trials[1][std::size_t(t)].seed);
        // The tuned baseline sees the same data, so its error is shared.
        CHECK(s.trials[0][std::size_t(t)].kernels[1].relative_error == s.trials[1][std::size_t(t)].kernels[1].relative_error);
    }
}

TEST_CASE("spectral validation recovers both exponents") {
    const GridSpec g(128);
    const std::vector<double> alphas{1.5, 2.0, 2.5};
    const auto rows = spectral_validation(alphas, g, 10);
    REQUIRE(rows.size() == 3);
    CHECK(std::abs(rows[0].shell_sum_fit.exponent + 4.0) <= 0.25);
    CHECK(std::abs(rows[0].mode_avg_fit.exponent + 5.0) <= 0.15);
    CHECK(std::abs(rows[1].shell_sum_fit.exponent + 5.0) <= 0.3);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::abs(rows[i].shell_sum_fit.exponent - rows[i - 1].shell_sum_fit.exponent + 1.0) <= 0.3);
    }
    CHECK(rows[0].shell_sum_fit.k_min == 4);
    CHECK(rows[0].shell_sum_fit.k_max == 32);
}

TEST_CASE("default baseline length-scale grid") {
    const auto ls = default_length_scale_grid();
    REQUIRE(ls.size() == 16);
    CHECK(ls.front() == doctest::Approx(0.05));
    CHECK(ls.back() == doctest::Approx(1.6));
    for (std::size_t i = 1; i < ls.size(); ++i) CHECK(ls[i] / ls[i - 1] == doctest::Approx(ls[1] / ls[0]));
    CHECK(parse_truth_kind("vortex") == TruthKind::kVortex);
    CHECK_THROWS_AS(parse_truth_kind("fluid"), InvalidArgument);
}
