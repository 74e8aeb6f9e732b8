#ifndef AENBO_EXPERIMENTS_HPP
#define AENBO_EXPERIMENTS_HPP
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "aenbo/benchmarks.hpp"
#include "aenbo/bo.hpp"
#include "aenbo/errors.hpp"
#include "aenbo/gp.hpp"
#include "aenbo/hyperopt.hpp"
#include "aenbo/kernels.hpp"

namespace aenbo {

/// A kernel kind plus optional pinned AEN-RBF parameters, written as
/// "aenrbf:lambda=0:alpha=0.5" on the command line.
struct KernelChoice {
    KernelKind kind = KernelKind::AenRbf;
    std::optional<double> lambda;
    std::optional<double> alpha;

    [[nodiscard]] std::string label() const {
        std::ostringstream s;
        s << to_string(kind);
        if (lambda) s << ":lambda=" << *lambda;
        if (alpha) s << ":alpha=" << *alpha;
        return s.str();
    }

    /// Starting kernel with pinned values applied.
    [[nodiscard]] KernelSpec spec() const {
        KernelSpec k = KernelSpec::defaults(kind);
        if (lambda) k.lambda = *lambda;
        if (alpha) k.alpha = *alpha;
        k.validate();
        return k;
    }

    /// Copies the pins into a fitting box.
    [[nodiscard]] ParamBox box(ParamBox base = {}) const {
        base.fixed_lambda = lambda;
        base.fixed_alpha = alpha;
        return base;
    }

    friend bool operator==(const KernelChoice&, const KernelChoice&) = default;
};

inline KernelChoice parse_kernel_choice(std::string_view text) {
    KernelChoice c;
    std::size_t pos = text.find(':');
    c.kind = parse_kernel_kind(text.substr(0, pos));
    while (pos != std::string_view::npos) {
        const std::size_t next = text.find(':', pos + 1);
        const std::string_view item = text.substr(pos + 1, next == std::string_view::npos ? next : next - pos - 1);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos) throw ParamError("kernel option '" + std::string(item) + "' needs a value");
        const std::string key(item.substr(0, eq));
        const std::string value(item.substr(eq + 1));
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw ParamError("kernel option '" + key + "' has non-numeric value '" + value + "'");
        }
        if (c.kind != KernelKind::AenRbf) throw ParamError("only aenrbf accepts lambda/alpha options");
        if (key == "lambda")
            c.lambda = v;
        else if (key == "alpha")
            c.alpha = v;
        else
            throw ParamError("unknown kernel option '" + key + "'");
        pos = next;
    }
    (void)c.spec();
    return c;
}

inline std::vector<KernelChoice> parse_kernel_list(std::string_view text) {
    std::vector<KernelChoice> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        std::string_view item = text.substr(start, comma == std::string_view::npos ? comma : comma - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (item.empty()) throw ParamError("empty entry in kernel list");
        out.push_back(parse_kernel_choice(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// BO settings for one kernel choice.
inline BoConfig bo_config_for(const BoConfig& base, const KernelChoice& choice) {
    BoConfig cfg = base;
    cfg.kernel = choice.spec();
    cfg.fit.box = choice.box(base.fit.box);
    return cfg;
}

// ---------------------------------------------------------------- run_experiment

struct ExperimentConfig {
    FunctionName function = FunctionName::Branin;
    std::vector<KernelChoice> kernels = {KernelChoice{KernelKind::Rbf, {}, {}}, KernelChoice{}};
    Scenario scenario = Scenario::None;
    BraninLowerSign branin_sign = BraninLowerSign::Verbatim;
    int repetitions = 30;
    int evaluations = 20;
    std::uint64_t seed = 0;
    /// Threads running repetitions; results do not depend on it.
    int workers = 1;
    /// Everything except kernel, evaluation budget and seed.
    BoConfig bo;
    /// Replaces the synthetic function when set.
    std::function<double(const Eigen::VectorXd&)> objective;

    void validate() const {
        if (repetitions < 1) throw ParamError("repetitions must be at least 1");
        if (evaluations < 2) throw ParamError("evaluation budget must be at least 2");
        if (kernels.empty()) throw ParamError("at least one kernel is required");
        if (workers < 1) throw ParamError("workers must be at least 1");
    }
};

struct RepetitionOutcome {
    int rep = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    double y_star = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd x_star;
    /// Mean wall time of the BO steps (initial design excluded).
    double seconds_per_iter = 0.0;
    std::vector<double> trace;
    /// The evaluated points in order.
    PointSet points;
};

struct KernelOutcome {
    KernelChoice kernel;
    std::vector<RepetitionOutcome> reps;
    double rmse = std::numeric_limits<double>::quiet_NaN();
    double rmse_normalized = std::numeric_limits<double>::quiet_NaN();
    double mean_seconds_per_iter = 0.0;
    int failures = 0;

    [[nodiscard]] std::vector<double> y_stars() const {
        std::vector<double> out;
        for (const auto& r : reps)
            if (!r.failed) out.push_back(r.y_star);
        return out;
    }
};

struct ExperimentResult {
    FunctionName function = FunctionName::Branin;
    Scenario scenario = Scenario::None;
    BoxDomain domain;
    double y_global = 0.0;
    std::vector<KernelOutcome> kernels;

    [[nodiscard]] bool partial() const {
        return std::any_of(kernels.begin(), kernels.end(), [](const KernelOutcome& k) { return k.failures > 0; });
    }
};

namespace detail {

inline RepetitionOutcome run_repetition(const ExperimentConfig& cfg, const KernelChoice& kernel, const BoxDomain& domain,
                                        int rep) {
    RepetitionOutcome out;
    out.rep = rep;
    out.seed = cfg.seed + static_cast<std::uint64_t>(rep);
    BoConfig bo = bo_config_for(cfg.bo, kernel);
    bo.evaluations = cfg.evaluations;
    bo.seed = out.seed;
    bo.quiet = true;
    try {
        BoResult r = cfg.objective ? run_bo(cfg.objective, domain, bo)
                                   : run_bo([&](const Eigen::VectorXd& x) { return eval_synthetic(cfg.function, x, domain); },
                                            domain, bo);
        out.y_star = r.y_best;
        out.x_star = r.x_best;
        out.trace = r.history.best_trace();
        out.points.resize(static_cast<Eigen::Index>(r.history.size()), domain.dim());
        double secs = 0.0;
        int steps = 0;
        for (std::size_t i = 0; i < r.history.size(); ++i) {
            const BoRecord& rec = r.history.records[i];
            out.points.row(static_cast<Eigen::Index>(i)) = rec.x.transpose();
            if (rec.iteration >= bo.initial_points) {
                secs += rec.seconds;
                ++steps;
            }
        }
        out.seconds_per_iter = steps > 0 ? secs / steps : 0.0;
    } catch (const BoError& e) {
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

} // namespace detail

/// Runs R seeded repetitions per kernel. Repetition r uses seed base + r for
/// every kernel, so initial designs are shared across kernels. Repetitions
/// are spread over `workers` threads; results are keyed by repetition index.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res;
    res.function = cfg.function;
    res.scenario = cfg.scenario;
    res.domain = scenario_domain(cfg.function, cfg.scenario, cfg.branin_sign);
    res.y_global = synthetic(cfg.function).global_min_value;

    const int nk = static_cast<int>(cfg.kernels.size());
    const int total = nk * cfg.repetitions;
    std::vector<RepetitionOutcome> slots(static_cast<std::size_t>(total));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int job = next++; job < total; job = next++) {
            const int k = job / cfg.repetitions;
            const int r = job % cfg.repetitions;
            try {
                slots[static_cast<std::size_t>(job)] =
                    detail::run_repetition(cfg, cfg.kernels[static_cast<std::size_t>(k)], res.domain, r);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const int threads = std::min(cfg.workers, total);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    for (int k = 0; k < nk; ++k) {
        KernelOutcome ko;
        ko.kernel = cfg.kernels[static_cast<std::size_t>(k)];
        double secs = 0.0;
        for (int r = 0; r < cfg.repetitions; ++r) {
            RepetitionOutcome& o = slots[static_cast<std::size_t>(k * cfg.repetitions + r)];
            if (o.failed)
                ++ko.failures;
            else
                secs += o.seconds_per_iter;
            ko.reps.push_back(std::move(o));
        }
        const auto ys = ko.y_stars();
        if (!ys.empty()) {
            ko.rmse = rmse(ys, res.y_global, false);
            ko.rmse_normalized = rmse(ys, res.y_global, true);
            ko.mean_seconds_per_iter = secs / static_cast<double>(ys.size());
        }
        if (ko.failures > 0)
            std::cerr << "[aenbo] warning: " << ko.failures << " of " << cfg.repetitions << " repetitions failed for "
                      << ko.kernel.label() << "; RMSE uses the remaining ones\n";
        res.kernels.push_back(std::move(ko));
    }
    return res;
}

// ------------------------------------------------------------ convergence_trace

struct ConvergenceResult {
    std::vector<KernelChoice> kernels;
    std::vector<std::vector<double>> traces;
    std::vector<double> final_gap;
    double y_global = 0.0;
};

/// One BO run of `max_iters` evaluations per kernel with a shared seed.
inline ConvergenceResult convergence_trace(FunctionName function, const std::vector<KernelChoice>& kernels, int max_iters,
                                           std::uint64_t seed, const BoConfig& base = {},
                                           Scenario scenario = Scenario::None) {
    if (max_iters <= base.initial_points) throw ParamError("max_iters must exceed the initial design size");
    ConvergenceResult out;
    out.kernels = kernels;
    out.y_global = synthetic(function).global_min_value;
    const BoxDomain domain = scenario_domain(function, scenario);
    for (const KernelChoice& k : kernels) {
        BoConfig cfg = bo_config_for(base, k);
        cfg.evaluations = max_iters;
        cfg.initial_within_budget = true;
        cfg.seed = seed;
        cfg.quiet = true;
        const BoResult r = run_bo([&](const Eigen::VectorXd& x) { return eval_synthetic(function, x, domain); }, domain, cfg);
        out.traces.push_back(r.history.best_trace());
        out.final_gap.push_back(std::abs(r.y_best - out.y_global));
    }
    return out;
}

// --------------------------------------------------------------- timing_profile

struct GrowthFit {
    std::vector<int> sizes;
    std::vector<double> seconds;
    double exponent = 0.0;
};

struct TimingReport {
    std::vector<KernelChoice> kernels;
    std::vector<double> mean_seconds_per_iter;
    GrowthFit growth;
};

/// Least-squares slope of log(seconds) against log(size).
inline double loglog_slope(const std::vector<int>& sizes, const std::vector<double>& seconds) {
    if (sizes.size() != seconds.size() || sizes.size() < 2) throw ParamError("slope needs at least two points");
    const std::size_t m = sizes.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += std::log(static_cast<double>(sizes[i]));
        my += std::log(seconds[i]);
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = std::log(static_cast<double>(sizes[i])) - mx;
        sxy += dx * (std::log(seconds[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

/// Median wall time of a dense Cholesky factorization of an RBF covariance
/// at each size, and the fitted growth exponent.
inline GrowthFit factorization_growth(const std::vector<int>& sizes, int repeats, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    GrowthFit g;
    g.sizes = sizes;
    for (int n : sizes) {
        const PointSet X = latin_hypercube(BoxDomain{{0.0, 1.0}, {0.0, 1.0}}, n, seed + static_cast<std::uint64_t>(n));
        GpModel model{KernelSpec::defaults(KernelKind::Rbf), 0.0, 1e-2};
        model.kernel.lengthscale = 0.2;
        Eigen::MatrixXd a = training_covariance(model.kernel, X);
        a.diagonal().array() += model.noise;
        // Enough inner calls that each sample spans well above clock resolution.
        const int inner = std::max(1, 2000000 / (n * n * n / 3 + 1));
        std::vector<double> samples;
        for (int r = 0; r < repeats; ++r) {
            double sink = 0.0;
            const auto t0 = clock::now();
            for (int i = 0; i < inner; ++i) sink += factorize_symmetric(a).log_det();
            const double dt = std::chrono::duration<double>(clock::now() - t0).count();
            if (!std::isfinite(sink)) throw FactorizationError("timing matrix failed to factorize", std::nan(""));
            samples.push_back(dt / inner);
        }
        std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(samples.size() / 2), samples.end());
        g.seconds.push_back(samples[samples.size() / 2]);
    }
    g.exponent = loglog_slope(g.sizes, g.seconds);
    return g;
}

/// Mean per-iteration BO time per kernel over `repetitions` serial runs, plus
/// the factorization growth exponent.
inline TimingReport timing_profile(FunctionName function, const std::vector<KernelChoice>& kernels, int max_iters,
                                   int repetitions, std::uint64_t seed, const BoConfig& base = {},
                                   const std::vector<int>& sizes = {50, 100, 200, 400}, int growth_repeats = 5) {
    if (repetitions < 1) throw ParamError("repetitions must be at least 1");
    if (max_iters <= base.initial_points) throw ParamError("max_iters must exceed the initial design size");
    TimingReport rep;
    rep.kernels = kernels;
    const BoxDomain domain = synthetic(function).domain;
    for (const KernelChoice& k : kernels) {
        double total = 0.0;
        int steps = 0;
        for (int r = 0; r < repetitions; ++r) {
            BoConfig cfg = bo_config_for(base, k);
            cfg.evaluations = max_iters;
            cfg.seed = seed + static_cast<std::uint64_t>(r);
            cfg.quiet = true;
            const BoResult res =
                run_bo([&](const Eigen::VectorXd& x) { return eval_synthetic(function, x, domain); }, domain, cfg);
            for (const BoRecord& rec : res.history.records)
                if (rec.iteration >= cfg.initial_points) {
                    total += rec.seconds;
                    ++steps;
                }
        }
        rep.mean_seconds_per_iter.push_back(total / steps);
    }
    rep.growth = factorization_growth(sizes, growth_repeats, seed);
    return rep;
}

// ----------------------------------------------------------------- mspe_compare

/// Test-input noise shape. Symmetric draws test offsets from the training
/// distribution; Asymmetric uses centered unit exponentials.
enum class MspeSetting { Symmetric, Asymmetric };

inline std::string_view to_string(MspeSetting s) { return s == MspeSetting::Symmetric ? "symmetric" : "asymmetric"; }

inline MspeSetting parse_mspe_setting(std::string_view s) {
    if (s == "symmetric") return MspeSetting::Symmetric;
    if (s == "asymmetric") return MspeSetting::Asymmetric;
    throw ParamError("unknown mspe setting '" + std::string(s) + "'");
}

struct MspeOptions {
    MspeSetting setting = MspeSetting::Asymmetric;
    int n_train = 30;
    int n_test = 50;
    double center = 0.5;
    double noise_sd = 0.1;
    int restarts = 3;
    KernelChoice aen{};
};

struct MspeReport {
    double mspe_rbf = 0.0;
    double mspe_aen = 0.0;
    double win_rate = 0.0;
    std::vector<double> trial_rbf;
    std::vector<double> trial_aen;
};

inline double mspe_truth(double x0, double x1) { return std::sin(2.0 * x0) + 0.5 * std::cos(3.0 * x1) + 0.2 * x0 * x1; }

struct MspeTrialData {
    Dataset train;
    PointSet test;
    Eigen::VectorXd truth;
};

/// Training inputs c + o with o ~ N(0, I); test inputs c + o' per the setting;
/// responses carry N(0, noise_sd^2) noise, test targets are noiseless.
inline MspeTrialData mspe_data(std::uint64_t seed, const MspeOptions& opt) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    MspeTrialData d;
    d.train.X.resize(opt.n_train, 2);
    d.train.y.resize(opt.n_train);
    for (int i = 0; i < opt.n_train; ++i) {
        for (int j = 0; j < 2; ++j) d.train.X(i, j) = opt.center + gauss(rng);
        d.train.y(i) = mspe_truth(d.train.X(i, 0), d.train.X(i, 1)) + opt.noise_sd * gauss(rng);
    }
    d.test.resize(opt.n_test, 2);
    d.truth.resize(opt.n_test);
    for (int i = 0; i < opt.n_test; ++i) {
        for (int j = 0; j < 2; ++j)
            d.test(i, j) = opt.center + (opt.setting == MspeSetting::Symmetric ? gauss(rng) : expo(rng) - 1.0);
        d.truth(i) = mspe_truth(d.test(i, 0), d.test(i, 1));
    }
    return d;
}

/// Held-out mean squared prediction error of an MLE fit.
inline double mspe_fit_predict(const KernelChoice& kernel, const MspeTrialData& d, int restarts, std::uint64_t seed) {
    GpModel m{kernel.spec(), d.train.y.mean(), 1e-2};
    FitOptions opt;
    opt.box = kernel.box();
    const FitReport fit = fit_mle(m, d.train, restarts, seed, opt);
    const ConditionedGp gp(fit.model, d.train);
    double s = 0.0;
    for (Eigen::Index i = 0; i < d.test.rows(); ++i) {
        const double e = gp.predict_point(d.test.row(i).transpose()).first - d.truth(i);
        s += e * e;
    }
    return s / static_cast<double>(d.test.rows());
}

/// Trials share data between the two kernels; trial t uses seed + t. AEN-RBF
/// wins a trial when its MSPE is strictly smaller.
inline MspeReport mspe_compare(std::uint64_t seed, int trials, const MspeOptions& opt = {}) {
    if (trials < 1) throw ParamError("mspe_compare needs at least one trial");
    MspeReport rep;
    int wins = 0;
    const KernelChoice rbf{KernelKind::Rbf, {}, {}};
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(t);
        const MspeTrialData d = mspe_data(s, opt);
        const std::uint64_t fit_seed = derive_seed(s, 3, 0);
        const double a = mspe_fit_predict(opt.aen, d, opt.restarts, fit_seed);
        const double b = mspe_fit_predict(rbf, d, opt.restarts, fit_seed);
        rep.trial_aen.push_back(a);
        rep.trial_rbf.push_back(b);
        if (a < b) ++wins;
    }
    for (int t = 0; t < trials; ++t) {
        rep.mspe_aen += rep.trial_aen[static_cast<std::size_t>(t)] / trials;
        rep.mspe_rbf += rep.trial_rbf[static_cast<std::size_t>(t)] / trials;
    }
    rep.win_rate = static_cast<double>(wins) / trials;
    return rep;
}

// ----------------------------------------------------------------------- demo1d

struct Demo1dOptions {
    double fraction = 0.1;
    double magnitude = 3.0;
    int points = 30;
    int grid = 200;
    int restarts = 3;
};

struct Demo1dBand {
    KernelChoice kernel;
    GpModel model;
    Eigen::VectorXd mean;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    [[nodiscard]] double mean_width() const { return (upper - lower).mean(); }
};

struct Demo1dResult {
    Dataset data;
    std::vector<int> outliers;
    Eigen::VectorXd grid;
    Eigen::VectorXd truth;
    std::vector<Demo1dBand> bands;
};

/// Forrester function on [0, 1].
inline double demo1d_truth(double x) { return (6.0 * x - 2.0) * (6.0 * x - 2.0) * std::sin(12.0 * x - 4.0); }

/// Evenly spaced samples of demo1d_truth with injected outliers, an MLE fit per
/// kernel, and the latent mean +/- 2 sd on a grid.
inline Demo1dResult demo1d(const std::vector<KernelChoice>& kernels, std::uint64_t seed, const Demo1dOptions& opt = {}) {
    if (!(opt.fraction >= 0.0 && opt.fraction <= 0.5)) throw ParamError("outlier fraction must lie in [0, 0.5]");
    if (opt.points < 2 || opt.grid < 2) throw ParamError("demo needs at least two points and two grid nodes");
    Demo1dResult res;
    Dataset clean;
    clean.X.resize(opt.points, 1);
    clean.y.resize(opt.points);
    for (int i = 0; i < opt.points; ++i) {
        clean.X(i, 0) = static_cast<double>(i) / (opt.points - 1);
        clean.y(i) = demo1d_truth(clean.X(i, 0));
    }
    res.data = inject_y_outliers(clean, opt.fraction, opt.magnitude, seed, &res.outliers);
    res.grid.resize(opt.grid);
    res.truth.resize(opt.grid);
    PointSet xq(opt.grid, 1);
    for (int i = 0; i < opt.grid; ++i) {
        res.grid(i) = static_cast<double>(i) / (opt.grid - 1);
        res.truth(i) = demo1d_truth(res.grid(i));
        xq(i, 0) = res.grid(i);
    }
    const double ymean = res.data.y.mean();
    for (const KernelChoice& k : kernels) {
        GpModel m{k.spec(), ymean, 1e-2};
        FitOptions fo;
        fo.box = k.box();
        const FitReport fit = fit_mle(m, res.data, opt.restarts, derive_seed(seed, 4, 0), fo);
        const Posterior post = posterior_predict(fit.model, res.data, xq);
        Demo1dBand band;
        band.kernel = k;
        band.model = fit.model;
        band.mean = post.mean;
        const Eigen::VectorXd sd = post.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
        band.lower = post.mean - 2.0 * sd;
        band.upper = post.mean + 2.0 * sd;
        res.bands.push_back(std::move(band));
    }
    return res;
}

// ------------------------------------------------------------ validation report

struct FunctionCheck {
    FunctionName name;
    double printed_min = 0.0;
    double grid_min = 0.0;
    Eigen::Vector2d grid_argmin;
    bool matches = false;
};

struct DomainCheck {
    FunctionName name;
    Scenario scenario;
    BoxDomain printed;
    BoxDomain rule;
    bool encloses_nominal = false;
    double max_deviation_from_rule = 0.0;
};

struct ValidationReport {
    std::vector<FunctionCheck> functions;
    std::vector<DomainCheck> domains;
};

/// Grid minima against the printed values (tolerance 1e-3) and printed
/// widened boxes against the widening rule.
inline ValidationReport validation_report(int grid = 2001) {
    ValidationReport rep;
    for (FunctionName f : kAllFunctions) {
        const SyntheticFunction fn = synthetic(f);
        const GridMinimum g = grid_minimum(f, fn.domain, grid);
        rep.functions.push_back({f, fn.global_min_value, g.value, g.location, std::abs(g.value - fn.global_min_value) <= 1e-3});
        for (Scenario sc : {Scenario::Widen5, Scenario::Widen10}) {
            DomainCheck d{f, sc, printed_widened_domain(f, sc),
                          widen_domain(fn.domain, sc == Scenario::Widen5 ? 0.025 : 0.05), false, 0.0};
            d.encloses_nominal = d.printed.encloses(fn.domain);
            d.max_deviation_from_rule = std::max((d.printed.lo - d.rule.lo).cwiseAbs().maxCoeff(),
                                                 (d.printed.hi - d.rule.hi).cwiseAbs().maxCoeff());
            rep.domains.push_back(std::move(d));
        }
    }
    return rep;
}

} // namespace aenbo

#endif // AENBO_EXPERIMENTS_HPP
