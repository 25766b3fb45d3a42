/// turbogp command-line front end. Every subcommand writes plot-ready CSV or
/// field dumps plus a manifest.json into --out. Exit codes: 0 success,
/// 2 usage or I/O error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "turbogp/turbogp.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
/// Bumped whenever a CSV column set or order changes.
constexpr int kCsvSchemaVersion = 1;

/// Error carrying the process exit code.
struct ToolError : std::runtime_error {
    int code;
    ToolError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

[[noreturn]] void usage_error(const std::string& what) { throw ToolError(kExitUsage, what); }

/// Maps a C API status to an exception with the matching exit code.
void check(tgp_status s) {
    if (s == TGP_OK) return;
    const std::string msg = tgp_last_error();
    switch (s) {
        case TGP_ERR_INVALID_ARGUMENT:
        case TGP_ERR_IO: throw ToolError(kExitUsage, msg);
        default: throw ToolError(kExitNumerical, msg);
    }
}

/// Owning wrappers for C handles.
struct FieldDeleter {
    void operator()(tgp_field* f) const { tgp_field_destroy(f); }
};
struct KernelDeleter {
    void operator()(tgp_kernel* k) const { tgp_kernel_destroy(k); }
};
struct PosteriorDeleter {
    void operator()(tgp_posterior* p) const { tgp_posterior_destroy(p); }
};
using Field = std::unique_ptr<tgp_field, FieldDeleter>;
using Kernel = std::unique_ptr<tgp_kernel, KernelDeleter>;
using Posterior = std::unique_ptr<tgp_posterior, PosteriorDeleter>;

Field adopt(tgp_field* f) { return Field(f); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Short form for messages.
std::string brief(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) usage_error("empty entry in list '" + s + "'");
        out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty()) usage_error("empty list");
    return out;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& flag) {
    std::vector<double> out;
    for (const auto& item : split(s)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || !std::isfinite(v)) usage_error(flag + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

std::vector<int> parse_ints(const std::string& s, const std::string& flag) {
    std::vector<int> out;
    for (const auto& item : split(s)) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) usage_error(flag + ": '" + item + "' is not an integer");
        out.push_back(v);
    }
    return out;
}

/// Opens a file in the output directory, failing with a usage error.
std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) usage_error("cannot write " + p.string());
    return out;
}

void write_json(const fs::path& p, const ordered_json& j) {
    auto out = open_out(p);
    out << j.dump(2) << '\n';
    if (!out) usage_error("failed writing " + p.string());
}

/// Options shared by every subcommand.
struct Common {
    std::string out = ".";
    std::uint64_t seed = 0;
    int jobs = 0;
    std::string config;
    CLI::Option* seed_opt = nullptr;

    void add(CLI::App* app, bool seeded) {
        app->add_option("--out,-o", out, "Output directory (created if missing)")->capture_default_str();
        if (seeded) {
            seed_opt = app->add_option("--seed", seed, "Master seed (falls back to TURBOGP_SEED, then 0)");
        }
        app->add_option("--jobs,-j", jobs, "Worker threads, 0 = available parallelism")->capture_default_str();
        app->add_option("--config", config, "JSON file of option values; command-line flags take precedence");
    }

    /// Fills the seed from the environment when neither a flag nor the
    /// config file provided one.
    void resolve_seed() {
        if (!seed_opt || seed_opt->count() > 0) return;
        if (const char* env = std::getenv("TURBOGP_SEED")) {
            const std::string s = env;
            std::size_t used = 0;
            unsigned long long v = 0;
            try {
                v = std::stoull(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (s.empty() || used != s.size() || s[0] == '-') usage_error("TURBOGP_SEED='" + s + "' is not a seed");
            seed = v;
        }
    }

    /// Creates the output directory and proves it is writable before any
    /// work is done.
    fs::path prepare() const {
        if (jobs < 0) usage_error("--jobs must be >= 0");
        const fs::path dir(out);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) usage_error("cannot create output directory " + dir.string());
        const fs::path probe = dir / ".turbogp_write_test";
        const bool writable = static_cast<bool>(std::ofstream(probe));
        fs::remove(probe, ec);
        if (!writable) usage_error("output directory " + dir.string() + " is not writable");
        return dir;
    }
};

/// Kernel flags shared by the commands that fit or sample a prior.
struct KernelOpts {
    std::string family = "cht";
    double alpha = 1.5;
    double length_scale = 0.5;
    double nu = 1.5;
    double variance = 1.0;
    double gamma = 1.0;
    CLI::Option* gamma_opt = nullptr;

    void add(CLI::App* app, const std::string& alpha_help = "CHT smoothness exponent alpha > 0") {
        app->add_option("--kernel", family, "Kernel family: cht, rbf or matern")->capture_default_str();
        app->add_option("--alpha", alpha, alpha_help)->capture_default_str();
        app->add_option("--length-scale", length_scale, "RBF/Matern length scale")->capture_default_str();
        app->add_option("--nu", nu, "Matern smoothness")->capture_default_str();
        app->add_option("--variance", variance, "Prior variance")->capture_default_str();
        gamma_opt = app->add_option("--gamma", gamma,
                                    "Dissipation exponent in (2/3, 1]; when given, alpha is checked for admissibility");
    }

    tgp_kernel_spec spec() const {
        tgp_kernel_spec s{};
        if (family == "cht") {
            s = tgp_default_kernel_spec(TGP_KERNEL_CHT);
        } else if (family == "rbf") {
            s = tgp_default_kernel_spec(TGP_KERNEL_RBF);
        } else if (family == "matern") {
            s = tgp_default_kernel_spec(TGP_KERNEL_MATERN);
        } else {
            usage_error("--kernel must be cht, rbf or matern (got '" + family + "')");
        }
        s.alpha = alpha;
        s.length_scale = length_scale;
        s.nu = nu;
        s.variance = variance;
        return s;
    }

    bool has_gamma() const { return gamma_opt && gamma_opt->count() > 0; }

    ordered_json echo() const {
        ordered_json j{{"kernel", family}, {"alpha", alpha}, {"length_scale", length_scale}, {"nu", nu},
                       {"variance", variance}};
        if (has_gamma()) j["gamma"] = gamma;
        return j;
    }
};

/// Rejects alpha values outside the admissible range for the given gamma.
void check_admissible(double alpha, double gamma) {
    if (!(alpha > 0.0)) usage_error("alpha must satisfy alpha > 0 (got " + brief(alpha) + ")");
    int ok = 0;
    check(tgp_check_admissible(alpha, gamma, &ok));
    if (!ok) {
        usage_error("alpha = " + brief(alpha) + " is not admissible for gamma = " + brief(gamma) +
                    ": the invariant measure requires alpha > 2 - gamma = " + brief(2.0 - gamma));
    }
}

void require_positive(double v, const std::string& what) {
    if (!(v > 0.0)) usage_error(what + " must satisfy " + what + " > 0 (got " + brief(v) + ")");
}

/// Trial options shared by compare and the sweeps.
struct TrialOpts {
    int n = 128;
    double alpha_true = 1.5;
    int m = 100;
    double noise = 0.1;
    int trials = 20;
    std::string truth = "gaussian";
    std::string baseline = "rbf";
    int vortices = 12;

    void add(CLI::App* app, bool with_m) {
        app->add_option("--n", n, "Grid size N (even, >= 8)")->capture_default_str();
        app->add_option("--alpha-true", alpha_true, "Smoothness of the Gaussian truths")->capture_default_str();
        if (with_m) app->add_option("--m", m, "Observations per trial")->capture_default_str();
        app->add_option("--noise", noise, "Noise standard deviation as a fraction of the truth RMS")
            ->capture_default_str();
        app->add_option("--trials", trials, "Trials per point")->capture_default_str();
        app->add_option("--truth", truth, "Truth kind: gaussian or vortex")->capture_default_str();
        app->add_option("--baseline", baseline, "Tuned baseline family: rbf or matern")->capture_default_str();
        app->add_option("--vortices", vortices, "Vortex count for vortex truths")->capture_default_str();
    }

    ordered_json echo(bool with_m) const {
        ordered_json j{{"n", n}, {"alpha_true", alpha_true}};
        if (with_m) j["m"] = m;
        j["noise"] = noise;
        j["trials"] = trials;
        j["truth"] = truth;
        j["baseline"] = baseline;
        j["vortices"] = vortices;
        return j;
    }
};

/// Owns the candidate array referenced by a tgp_trial_config.
struct TrialSetup {
    tgp_kernel_spec candidates[2];
    tgp_trial_config config{};
    std::string baseline_tag;
};

std::unique_ptr<TrialSetup> make_trial_setup(const TrialOpts& t, double cht_alpha, const Common& c) {
    auto s = std::make_unique<TrialSetup>();
    if (t.trials < 1) usage_error("--trials must be >= 1");
    if (t.truth != "gaussian" && t.truth != "vortex") usage_error("--truth must be gaussian or vortex");
    if (t.baseline != "rbf" && t.baseline != "matern") usage_error("--baseline must be rbf or matern");
    require_positive(t.alpha_true, "alpha_true");
    s->candidates[0] = tgp_default_kernel_spec(TGP_KERNEL_CHT);
    s->candidates[0].alpha = cht_alpha;
    s->candidates[1] = tgp_default_kernel_spec(t.baseline == "rbf" ? TGP_KERNEL_RBF : TGP_KERNEL_MATERN);
    s->baseline_tag = t.baseline;
    tgp_trial_config& cfg = s->config;
    cfg.grid_n = t.n;
    cfg.alpha_true = t.alpha_true;
    cfg.candidates = s->candidates;
    cfg.candidate_count = 2;
    cfg.m = t.m;
    cfg.noise_ratio = t.noise;
    cfg.master_seed = c.seed;
    cfg.truth_kind = t.truth == "vortex" ? TGP_TRUTH_VORTEX : TGP_TRUTH_GAUSSIAN;
    cfg.vortex = tgp_default_vortex_params();
    cfg.vortex.vortex_count = t.vortices;
    cfg.jobs = c.jobs;
    return s;
}

const char* family_tag(int family) {
    switch (family) {
        case TGP_KERNEL_CHT: return "cht";
        case TGP_KERNEL_RBF: return "rbf";
        default: return "matern";
    }
}

std::string sweep_header(const std::string& axis) {
    return axis + ",mean_improvement,std_improvement,win_rate,trials\n";
}

void write_sweep_csv(const fs::path& p, const std::string& axis, const std::vector<tgp_sweep_point>& points,
                     bool integer_axis) {
    auto out = open_out(p);
    out << sweep_header(axis);
    for (const auto& pt : points) {
        out << (integer_axis ? std::to_string(static_cast<long long>(pt.axis_value)) : fmt(pt.axis_value)) << ','
            << fmt(pt.mean_improvement) << ',' << fmt(pt.std_improvement) << ',' << fmt(pt.win_rate) << ','
            << pt.trial_count << '\n';
    }
}

/// Spearman rank correlation of y against its position, with average
/// ranks for ties.
double spearman_against_order(const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double below = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (y[j] < y[i]) below += 1.0;
            if (y[j] == y[i]) equal += 1.0;
        }
        rank[i] = below + (equal + 1.0) / 2.0;
    }
    const double mean = (double(n) + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = double(i + 1) - mean;
        const double r = rank[i] - mean;
        sxy += x * r;
        sxx += x * x;
        syy += r * r;
    }
    return syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

std::vector<tgp_shell> spectrum_of(const tgp_field* f) {
    std::size_t count = 0;
    check(tgp_field_spectrum(f, nullptr, 0, &count));
    std::vector<tgp_shell> shells(count);
    check(tgp_field_spectrum(f, shells.data(), shells.size(), &count));
    return shells;
}

std::vector<double> values_of(const tgp_field* f) {
    const auto n = static_cast<std::size_t>(tgp_field_n(f));
    std::vector<double> v(n * n);
    check(tgp_field_values(f, v.data(), v.size()));
    return v;
}

/// Applies values from --config to options that were not given on the
/// command line. Accepts either a flat object of option values or a
/// manifest written by a previous run.
void apply_config(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) usage_error("cannot read config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        usage_error("config file " + path + " is not valid JSON: " + e.what());
    }
    if (j.is_object() && j.contains("command") && j.contains("config") && j["config"].is_object()) {
        if (j["command"] != sub->get_name()) {
            usage_error("config file " + path + " belongs to command '" + j["command"].get<std::string>() + "'");
        }
        const auto seed = j.contains("master_seed") ? j["master_seed"] : nlohmann::json();
        j = j["config"];
        if (!seed.is_null()) j["seed"] = seed;
    }
    if (!j.is_object()) usage_error("config file " + path + " must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        std::string name = key;
        for (auto& ch : name) {
            if (ch == '_') ch = '-';
        }
        if (name == "config") continue;
        CLI::Option* opt = sub->get_option_no_throw("--" + name);
        if (!opt) usage_error("config key '" + key + "' is not an option of '" + sub->get_name() + "'");
        if (opt->count() > 0) continue;
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (i) text += ',';
                text += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
            }
        } else if (value.is_number() || value.is_boolean()) {
            text = value.dump();
        } else {
            usage_error("config key '" + key + "' has an unsupported value");
        }
        try {
            opt->add_result(text);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            usage_error("config key '" + key + "': " + e.what());
        }
    }
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

/// A subcommand: its options plus the action run after parsing. The action
/// returns the resolved configuration for the manifest.
struct Command {
    CLI::App* app = nullptr;
    Common common;
    bool seeded = true;
    std::function<ordered_json(const fs::path&)> run;
};

// ---- sample -------------------------------------------------------------

struct SampleCmd {
    int n = 128;
    KernelOpts kernel;
    std::string format = "real";

    void add(Command& cmd) {
        cmd.app->add_option("--n", n, "Grid size N (even, >= 8)")->capture_default_str();
        kernel.add(cmd.app);
        cmd.app->add_option("--format", format, "Payload kind: real or spectral")->capture_default_str();
        cmd.run = [this, &cmd](const fs::path& dir) { return run(dir, cmd.common); };
    }

    ordered_json run(const fs::path& dir, const Common& c) {
        if (kernel.family == "cht") {
            require_positive(kernel.alpha, "alpha");
            if (kernel.has_gamma()) check_admissible(kernel.alpha, kernel.gamma);
        }
        if (format != "real" && format != "spectral") usage_error("--format must be real or spectral");
        const tgp_kernel_spec spec = kernel.spec();
        tgp_field* raw = nullptr;
        check(tgp_field_sample(&spec, n, c.seed, &raw));
        const Field f = adopt(raw);

        const std::uint64_t seed = c.seed;
        const double alpha = kernel.alpha;
        const bool record_alpha = kernel.family == "cht";
        check(tgp_field_save(f.get(), (dir / "field.json").c_str(), (dir / "field.bin").c_str(),
                             format == "real" ? TGP_FIELD_REAL : TGP_FIELD_SPECTRAL, &seed,
                             record_alpha ? &alpha : nullptr));

        auto out = open_out(dir / "spectrum.csv");
        out << "k,mode_count,shell_avg_power,shell_sum_power\n";
        for (const auto& s : spectrum_of(f.get())) {
            out << s.k << ',' << s.mode_count << ',' << fmt(s.shell_avg_power) << ',' << fmt(s.shell_sum_power)
                << '\n';
        }
        ordered_json j{{"n", n}};
        j.update(kernel.echo());
        j["format"] = format;
        return j;
    }
};

// ---- validate-spectrum --------------------------------------------------

struct ValidateCmd {
    std::string alphas = "1.5,2.0,2.5";
    int n = 128;
    int seeds = 10;
    int k_min = 0;
    int k_max = 0;
    std::string estimator = "shell_sum";

    void add(Command& cmd) {
        cmd.app->add_option("--alphas", alphas, "Comma-separated CHT exponents")->capture_default_str();
        cmd.app->add_option("--n", n, "Grid size N")->capture_default_str();
        cmd.app->add_option("--seeds", seeds, "Samples averaged per alpha")->capture_default_str();
        cmd.app->add_option("--kmin", k_min, "Lower fit shell, 0 = 4")->capture_default_str();
        cmd.app->add_option("--kmax", k_max, "Upper fit shell, 0 = N/4")->capture_default_str();
        cmd.app->add_option("--estimator", estimator, "shell_sum, mode_avg or both")->capture_default_str();
        cmd.run = [this, &cmd](const fs::path& dir) { return run(dir, cmd.common); };
    }

    ordered_json run(const fs::path& dir, const Common& c) {
        if (estimator != "shell_sum" && estimator != "mode_avg" && estimator != "both") {
            usage_error("--estimator must be shell_sum, mode_avg or both");
        }
        const auto list = parse_doubles(alphas, "--alphas");
        for (double a : list) require_positive(a, "alpha");
        std::vector<tgp_validation_row> rows(list.size());
        check(tgp_spectral_validation(list.data(), list.size(), n, seeds, c.seed, k_min, k_max, rows.data()));

        auto out = open_out(dir / "exponents.csv");
        out << "alpha,estimator,exponent,stderr,k_min,k_max,r_squared\n";
        auto row = [&](double a, const char* name, const tgp_power_law& f) {
            out << fmt(a) << ',' << name << ',' << fmt(f.exponent) << ',' << fmt(f.exponent_stderr) << ','
                << f.k_min << ',' << f.k_max << ',' << fmt(f.r_squared) << '\n';
        };
        for (const auto& r : rows) {
            if (estimator != "mode_avg") row(r.alpha, "shell_sum", r.shell_sum);
            if (estimator != "shell_sum") row(r.alpha, "mode_avg", r.mode_avg);
        }
        return ordered_json{{"alphas", join_doubles(list)}, {"n", n},           {"seeds", seeds},
                            {"kmin", k_min},                {"kmax", k_max},     {"estimator", estimator}};
    }
};

// ---- compare ------------------------------------------------------------

struct CompareCmd {
    TrialOpts trial;
    double alpha = 0.0;
    CLI::Option* alpha_opt = nullptr;
    double gamma = 1.0;
    CLI::Option* gamma_opt = nullptr;

    void add(Command& cmd) {
        trial.add(cmd.app, true);
        alpha_opt = cmd.app->add_option("--alpha", alpha, "CHT prior exponent (default: --alpha-true)");
        gamma_opt = cmd.app->add_option("--gamma", gamma, "Dissipation exponent; checks CHT admissibility");
        cmd.run = [this, &cmd](const fs::path& dir) { return run(dir, cmd.common); };
    }

    ordered_json run(const fs::path& dir, const Common& c) {
        const double cht_alpha = alpha_opt->count() > 0 ? alpha : trial.alpha_true;
        require_positive(cht_alpha, "alpha");
        if (gamma_opt->count() > 0) check_admissible(cht_alpha, gamma);
        const auto setup = make_trial_setup(trial, cht_alpha, c);
        std::vector<tgp_trial_result> results(static_cast<std::size_t>(trial.trials));
        check(tgp_run_trials(&setup->config, trial.trials, results.data()));

        auto out = open_out(dir / "trials.csv");
        out << "seed,kernel,eps,rmse,improvement_pct,winner\n";
        double eps_cht = 0.0, eps_base = 0.0, wins = 0.0, mean_imp = 0.0;
        for (const auto& r : results) {
            const char* winner = family_tag(r.kernels[r.winner].spec.family);
            for (std::size_t k = 0; k < r.kernel_count; ++k) {
                const auto& o = r.kernels[k];
                out << r.seed << ',' << family_tag(o.spec.family) << ',' << fmt(o.relative_error) << ','
                    << fmt(o.rmse) << ',' << fmt(r.improvement_pct) << ',' << winner << '\n';
            }
            eps_cht += r.kernels[0].relative_error;
            eps_base += r.kernels[1].relative_error;
            mean_imp += r.improvement_pct;
            if (r.improvement_pct > 0.0) wins += 1.0;
        }
        const double t = double(results.size());
        mean_imp /= t;
        double var = 0.0;
        for (const auto& r : results) var += (r.improvement_pct - mean_imp) * (r.improvement_pct - mean_imp);
        const double std_imp = results.size() > 1 ? std::sqrt(var / (t - 1.0)) : 0.0;

        ordered_json summary{{"trials", results.size()},
                             {"mean_eps_cht", eps_cht / t},
                             {"mean_eps_" + setup->baseline_tag, eps_base / t},
                             {"win_rate", wins / t},
                             {"mean_improvement_pct", mean_imp},
                             {"std_improvement_pct", std_imp}};
        write_json(dir / "summary.json", summary);

        ordered_json j = trial.echo(true);
        j["alpha"] = cht_alpha;
        if (gamma_opt->count() > 0) j["gamma"] = gamma;
        return j;
    }
};

// ---- sweep-alpha --------------------------------------------------------

struct SweepAlphaCmd {
    TrialOpts trial;
    std::string alphas = "0.75,1.0,1.25,1.5";
    double gamma = 1.0;
    CLI::Option* gamma_opt = nullptr;

    void add(Command& cmd) {
        trial.add(cmd.app, true);
        cmd.app->add_option("--alphas", alphas, "Comma-separated CHT prior exponents")->capture_default_str();
        gamma_opt = cmd.app->add_option("--gamma", gamma, "Dissipation exponent; checks every alpha");
        cmd.run = [this, &cmd](const fs::path& dir) { return run(dir, cmd.common); };
    }

    ordered_json run(const fs::path& dir, const Common& c) {
        const auto list = parse_doubles(alphas, "--alphas");
        for (double a : list) {
            require_positive(a, "alpha");
            if (gamma_opt->count() > 0) check_admissible(a, gamma);
        }
        const auto setup = make_trial_setup(trial, list.front(), c);
        std::vector<tgp_sweep_point> points(list.size());
        check(tgp_sweep_alpha(&setup->config, list.data(), list.size(), trial.trials, points.data()));
        write_sweep_csv(dir / "alpha.csv", "alpha", points, false);

        std::size_t best = 0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (points[i].mean_improvement > points[best].mean_improvement) best = i;
        }
        ordered_json summary{{"best_alpha", points[best].axis_value},
                             {"best_mean_improvement", points[best].mean_improvement}};
        write_json(dir / "summary.json", summary);

        ordered_json j = trial.echo(true);
        j["alphas"] = join_doubles(list);
        if (gamma_opt->count() > 0) j["gamma"] = gamma;
        return j;
    }
};

// ---- sweep-density ------------------------------------------------------

struct SweepDensityCmd {
    TrialOpts trial;
    std::string m_list = "20,40,60,80,100,150";
    double alpha = 0.0;
    CLI::Option* alpha_opt = nullptr;

    void add(Command& cmd) {
        trial.add(cmd.app, false);
        cmd.app->add_option("--m", m_list, "Comma-separated observation counts")->capture_default_str();
        alpha_opt = cmd.app->add_option("--alpha", alpha, "CHT prior exponent (default: --alpha-true)");
        cmd.run = [this, &cmd](const fs::path& dir) { return run(dir, cmd.common); };
    }

    ordered_json run(const fs::path& dir, const Common& c) {
        const auto ms = parse_ints(m_list, "--m");
        const double cht_alpha = alpha_opt->count() > 0 ? alpha : trial.alpha_true;
        require_positive(cht_alpha, "alpha");
        const auto setup = make_trial_setup(trial, cht_alpha, c);
        std::vector<tgp_sweep_point> points(ms.size());
        check(tgp_sweep_density(&setup->config, ms.data(), ms.size(), trial.trials, points.data()));
        write_sweep_csv(dir / "density.csv", "m", points, true);

        std::vector<double> means;
        bool nondecreasing = true;
        for (std::size_t i = 0; i < points.size(); ++i) {
            means.push_back(points[i].mean_improvement);
            if (i > 0 && points[i].mean_improvement < points[i - 1].mean_improvement) nondecreasing = false;
        }
        ordered_json trend{{"endpoint_increase", means.back() > means.front()},
                           {"nondecreasing", nondecreasing},
                           {"spearman_rho", spearman_against_order(means)}};
        write_json(dir / "summary.json", ordered_json{{"trend", trend}});

        ordered_json j = trial.echo(false);
        j["m"] = join_ints(ms);
        j["alpha"] = cht_alpha;
        return j;
    }
};

// ---- place-sensors ------------------------------------------------------

/// Reads "i1,i2[,value]" rows, skipping a header line if present.
struct PointList {
    std::vector<int> i1, i2;
    std::vector<double> values;
};

PointList read_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) usage_error("cannot read " + path);
    PointList p;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && line.find_first_of("0123456789") != 0 && line[0] != '-') {
            first = false;
            continue;
        }
        first = false;
        const auto cells = split(line);
        if (cells.size() < 2) usage_error(path + ": expected i1,i2[,value] rows");
        const auto idx = parse_ints(cells[0] + "," + cells[1], path);
        p.i1.push_back(idx[0]);
        p.i2.push_back(idx[1]);
        p.values.push_back(cells.size() > 2 ? parse_doubles(cells[2], path)[0] : 0.0);
    }
    return p;
}

struct PlaceCmd {
    int n = 64;
    KernelOpts kernel;
    int count = 10;
    std::string existing;
    std::string candidates;
    double noise_variance = 0.0;

    void add(Command& cmd) {
        cmd.app->add_option("--n", n, "Grid size N")->capture_default_str();
        kernel.add(cmd.app);
        cmd.app->add_option("--count", count, "Sensors to place")->capture_default_str();
        cmd.app->add_option("--existing", existing, "CSV of already placed sensors (i1,i2)");
        cmd.app->add_option("--candidates", candidates, "CSV of allowed sites (i1,i2); default every grid point");
        cmd.app->add_option("--noise-variance", noise_variance, "Observation noise variance")->capture_default_str();
        cmd.run = [this, &cmd](const fs::path& dir) { return run(dir); };
    }

    ordered_json run(const fs::path& dir) {
        if (kernel.family == "cht" && kernel.has_gamma()) check_admissible(kernel.alpha, kernel.gamma);
        if (count < 1) usage_error("--count must be >= 1");
        const tgp_kernel_spec spec = kernel.spec();
        tgp_kernel* raw = nullptr;
        check(tgp_kernel_build(&spec, n, &raw));
        const Kernel k(raw);

        PointList prior;
        if (!existing.empty()) prior = read_points(existing);
        tgp_observations obs{prior.i1.size(), prior.i1.data(), prior.i2.data(), prior.values.data(), noise_variance};
        PointList cand;
        if (!candidates.empty()) cand = read_points(candidates);

        std::vector<int> o1(static_cast<std::size_t>(count)), o2(static_cast<std::size_t>(count));
        check(tgp_place_sensors(k.get(), prior.i1.empty() && noise_variance == 0.0 ? nullptr : &obs,
                                cand.i1.empty() ? nullptr : cand.i1.data(), cand.i1.empty() ? nullptr : cand.i2.data(),
                                cand.i1.size(), count, o1.data(), o2.data()));

        const double h = 2.0 * std::numbers::pi / double(n);
        auto out = open_out(dir / "sensors.csv");
        out << "order,i1,i2,x1,x2\n";
        for (std::size_t i = 0; i < o1.size(); ++i) {
            out << i << ',' << o1[i] << ',' << o2[i] << ',' << fmt(o1[i] * h) << ',' << fmt(o2[i] * h) << '\n';
        }
        ordered_json j{{"n", n}};
        j.update(kernel.echo());
        j["count"] = count;
        j["existing"] = existing;
        j["candidates"] = candidates;
        j["noise_variance"] = noise_variance;
        return j;
    }
};

// ---- reconstruct --------------------------------------------------------

struct ReconstructCmd {
    std::string field_header;
    std::string field_payload;
    std::string observations;
    int n = 128;
    double alpha_true = 1.5;
    KernelOpts kernel;
    int m = 100;
    double noise = 0.1;
    double level = 0.95;

    void add(Command& cmd) {
        cmd.app->add_option("--field", field_header, "Truth field header (JSON); default: a fresh CHT truth");
        cmd.app->add_option("--payload", field_payload, "Truth payload (default: header path with .bin)");
        cmd.app->add_option("--observations", observations, "CSV of i1,i2,value observations instead of sampling");
        cmd.app->add_option("--n", n, "Grid size N when generating a truth")->capture_default_str();
        cmd.app->add_option("--alpha-true", alpha_true, "Smoothness of a generated truth")->capture_default_str();
        kernel.add(cmd.app, "Prior CHT exponent alpha > 0");
        cmd.app->add_option("--m", m, "Observations drawn from the truth")->capture_default_str();
        cmd.app->add_option("--noise", noise, "Noise standard deviation as a fraction of the truth RMS")
            ->capture_default_str();
        cmd.app->add_option("--noise-variance", noise_var_flag, "Noise variance for --observations input");
        cmd.app->add_option("--level", level, "Credible level of the pointwise band")->capture_default_str();
        cmd.run = [this, &cmd](const fs::path& dir) { return run(dir, cmd.common); };
    }

    double noise_var_flag = 0.0;

    ordered_json run(const fs::path& dir, const Common& c) {
        if (kernel.family == "cht") {
            require_positive(kernel.alpha, "alpha");
            if (kernel.has_gamma()) check_admissible(kernel.alpha, kernel.gamma);
        }
        if (!(level > 0.0 && level < 1.0)) usage_error("--level must lie in (0, 1)");

        Field truth;
        if (!field_header.empty()) {
            std::string payload = field_payload;
            if (payload.empty()) payload = fs::path(field_header).replace_extension(".bin").string();
            tgp_field* raw = nullptr;
            check(tgp_field_load(field_header.c_str(), payload.c_str(), &raw));
            truth = adopt(raw);
        } else if (observations.empty()) {
            require_positive(alpha_true, "alpha_true");
            tgp_field* raw = nullptr;
            check(tgp_field_cht_truth(alpha_true, n, c.seed, &raw, nullptr));
            truth = adopt(raw);
        }
        const int grid_n = truth ? tgp_field_n(truth.get()) : n;

        PointList pts;
        double noise_variance = 0.0;
        if (!observations.empty()) {
            pts = read_points(observations);
            noise_variance = noise_var_flag;
        } else {
            pts.i1.resize(static_cast<std::size_t>(std::max(m, 0)));
            pts.i2.resize(pts.i1.size());
            pts.values.resize(pts.i1.size());
            check(tgp_observe(truth.get(), m, noise, c.seed, pts.i1.data(), pts.i2.data(), pts.values.data(),
                              &noise_variance));
        }

        const tgp_kernel_spec spec = kernel.spec();
        tgp_kernel* kraw = nullptr;
        check(tgp_kernel_build(&spec, grid_n, &kraw));
        const Kernel k(kraw);
        const tgp_observations obs{pts.i1.size(), pts.i1.data(), pts.i2.data(), pts.values.data(), noise_variance};
        tgp_posterior* praw = nullptr;
        check(tgp_posterior_fit(k.get(), &obs, &praw));
        const Posterior post(praw);

        const std::size_t cells = std::size_t(grid_n) * std::size_t(grid_n);
        std::vector<double> mean(cells), var(cells);
        check(tgp_posterior_mean(post.get(), mean.data(), cells));
        check(tgp_posterior_variance(post.get(), var.data(), cells));
        save_grid(dir, "mean", mean, grid_n, c.seed);
        save_grid(dir, "variance", var, grid_n, c.seed);

        {
            auto out = open_out(dir / "observations.csv");
            out << "i1,i2,value\n";
            for (std::size_t i = 0; i < pts.i1.size(); ++i) {
                out << pts.i1[i] << ',' << pts.i2[i] << ',' << fmt(pts.values[i]) << '\n';
            }
        }

        double width = 0.0;
        double inside = 0.0;
        double sse = 0.0;
        const std::vector<double> exact = truth ? values_of(truth.get()) : std::vector<double>();
        for (std::size_t x = 0; x < cells; ++x) {
            double lo = 0.0, hi = 0.0;
            check(tgp_posterior_interval(post.get(), int(x / std::size_t(grid_n)), int(x % std::size_t(grid_n)), level,
                                         &lo, &hi));
            width += hi - lo;
            if (truth) {
                if (exact[x] >= lo && exact[x] <= hi) inside += 1.0;
                sse += (mean[x] - exact[x]) * (mean[x] - exact[x]);
            }
        }
        double energy_var = 0.0, lml = 0.0;
        int clamped = 0;
        check(tgp_posterior_energy_variance(post.get(), &energy_var));
        check(tgp_posterior_log_likelihood(post.get(), &lml));
        check(tgp_posterior_clamped(post.get(), &clamped));

        ordered_json band{{"level", level},
                          {"observations", pts.i1.size()},
                          {"noise_variance", noise_variance},
                          {"mean_band_width", width / double(cells)},
                          {"energy_variance", energy_var},
                          {"log_marginal_likelihood", lml},
                          {"clamped_variances", clamped}};
        if (truth) {
            double mu = 0.0;
            for (double v : exact) mu += v;
            mu /= double(cells);
            double tv = 0.0;
            for (double v : exact) tv += (v - mu) * (v - mu);
            const double rmse = std::sqrt(sse / double(cells));
            band["coverage"] = inside / double(cells);
            band["rmse"] = rmse;
            band["relative_error"] = rmse / std::sqrt(tv / double(cells));
        }
        write_json(dir / "band.json", band);

        ordered_json j{{"field", field_header}, {"payload", field_payload}, {"observations", observations},
                       {"n", grid_n},           {"alpha_true", alpha_true}};
        j.update(kernel.echo());
        j["m"] = m;
        j["noise"] = noise;
        j["noise_variance"] = noise_var_flag;
        j["level"] = level;
        return j;
    }

    static void save_grid(const fs::path& dir, const std::string& stem, const std::vector<double>& v, int n,
                          std::uint64_t seed) {
        tgp_field* raw = nullptr;
        check(tgp_field_create(n, v.data(), &raw));
        const Field f = adopt(raw);
        check(tgp_field_save(f.get(), (dir / (stem + ".json")).c_str(), (dir / (stem + ".bin")).c_str(),
                             TGP_FIELD_REAL, &seed, nullptr));
    }
};

int run_main(int argc, char** argv) {
    CLI::App app{"Gaussian-process priors for 2D turbulent vorticity fields"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tgp_version()));

    SampleCmd sample;
    ValidateCmd validate;
    CompareCmd compare;
    SweepAlphaCmd sweep_alpha;
    SweepDensityCmd sweep_density;
    PlaceCmd place;
    ReconstructCmd reconstruct;

    std::vector<std::unique_ptr<Command>> commands;
    auto make = [&](const std::string& name, const std::string& help, bool seeded) -> Command& {
        auto cmd = std::make_unique<Command>();
        cmd->app = app.add_subcommand(name, help);
        cmd->seeded = seeded;
        cmd->common.add(cmd->app, seeded);
        commands.push_back(std::move(cmd));
        return *commands.back();
    };
    sample.add(make("sample", "Draw a prior sample; writes field.json, field.bin and spectrum.csv", true));
    validate.add(make("validate-spectrum", "Fit spectral exponents of CHT samples; writes exponents.csv", true));
    compare.add(make("compare", "CHT against a tuned baseline; writes trials.csv and summary.json", true));
    sweep_alpha.add(make("sweep-alpha", "Improvement against the prior exponent; writes alpha.csv", true));
    sweep_density.add(make("sweep-density", "Improvement against observation count; writes density.csv", true));
    place.add(make("place-sensors", "Greedy maximum-variance sensor placement; writes sensors.csv", false));
    reconstruct.add(make("reconstruct", "Posterior mean, variance and credible band from observations", true));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    for (auto& cmd : commands) {
        if (!cmd->app->parsed()) continue;
        const auto start = std::chrono::steady_clock::now();
        if (!cmd->common.config.empty()) apply_config(cmd->app, cmd->common.config);
        cmd->common.resolve_seed();
        const fs::path dir = cmd->common.prepare();
        ordered_json config = cmd->run(dir);
        config["out"] = cmd->common.out;
        config["jobs"] = cmd->common.jobs;
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        ordered_json manifest{{"command", cmd->app->get_name()},
                              {"config", config},
                              {"master_seed", cmd->seeded ? ordered_json(cmd->common.seed) : ordered_json()},
                              {"tool_version", tgp_version()},
                              {"csv_schema_version", kCsvSchemaVersion},
                              {"wall_time_s", wall}};
        write_json(dir / "manifest.json", manifest);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const ToolError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
