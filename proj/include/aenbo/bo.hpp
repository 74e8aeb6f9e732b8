#ifndef AENBO_BO_HPP
#define AENBO_BO_HPP
#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <utility>
#include <vector>

#include "aenbo/acquisition.hpp"
#include "aenbo/design.hpp"
#include "aenbo/errors.hpp"
#include "aenbo/gp.hpp"
#include "aenbo/hyperopt.hpp"
#include "aenbo/kernels.hpp"

namespace aenbo {

/// Value recorded in place of a non-finite objective return.
inline constexpr double kClippedValue = 1e12;

/// splitmix64 finalizer; derives independent streams from one base seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1) + 0xBF58476D1CE4E5B9ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct BoConfig {
    KernelSpec kernel = KernelSpec::defaults(KernelKind::AenRbf);
    int initial_points = 5;
    int evaluations = 20;
    /// When false the initial design is spent on top of `evaluations`.
    bool initial_within_budget = true;
    std::uint64_t seed = 0;
    double initial_noise = 1e-6;
    AcqConfig acq;
    bool refit_each_iter = true;
    int initial_restarts = 3;
    /// Warm start plus this many minus one random restarts at each refit.
    int refit_restarts = 2;
    FitOptions fit;
    bool quiet = false;

    [[nodiscard]] int total_evaluations() const {
        return initial_within_budget ? evaluations : evaluations + initial_points;
    }

    void validate() const {
        kernel.validate();
        acq.validate();
        if (initial_points < 1) throw ParamError("at least one initial point is required");
        if (initial_within_budget && initial_points >= evaluations)
            throw ParamError("initial points must be fewer than the evaluation budget");
        if (!initial_within_budget && evaluations < 1) throw ParamError("evaluation budget must be positive");
        if (initial_restarts < 1 || refit_restarts < 1) throw ParamError("restart counts must be positive");
    }
};

struct BoRecord {
    int iteration = 0;
    Eigen::VectorXd x;
    /// Value used by the optimizer (clipped when the objective misbehaved).
    double y = 0.0;
    double raw_y = 0.0;
    bool clipped = false;
    double y_best = 0.0;
    /// Hyperparameters in effect when this point was chosen.
    GpModel theta;
    double seconds = 0.0;
};

struct BoHistory {
    std::vector<BoRecord> records;

    [[nodiscard]] std::size_t size() const { return records.size(); }
    [[nodiscard]] bool empty() const { return records.empty(); }
    [[nodiscard]] std::vector<double> best_trace() const {
        std::vector<double> t;
        t.reserve(records.size());
        for (const auto& r : records) t.push_back(r.y_best);
        return t;
    }
};

struct BoResult {
    Eigen::VectorXd x_best;
    double y_best = std::numeric_limits<double>::infinity();
    BoHistory history;
    std::vector<FitReport> fits;
};

inline PointSet initial_design(const BoxDomain& domain, int count, std::uint64_t seed) {
    return latin_hypercube(domain, count, seed);
}

/// Argmin of the recorded values; ties go to the earliest record.
inline std::pair<Eigen::VectorXd, double> best_so_far(const BoHistory& history) {
    if (history.empty()) throw EmptyHistoryError("best_so_far on an empty history");
    std::size_t arg = 0;
    for (std::size_t i = 1; i < history.records.size(); ++i)
        if (history.records[i].y < history.records[arg].y) arg = i;
    return {history.records[arg].x, history.records[arg].y};
}

namespace detail {

// Zero mean, unit spread. A constant series only gets centered.
inline Eigen::VectorXd standardize(const Eigen::VectorXd& y) {
    const double mean = y.mean();
    Eigen::VectorXd c = y.array() - mean;
    const double sd = std::sqrt(c.squaredNorm() / static_cast<double>(y.size()));
    if (sd > 0.0 && std::isfinite(sd)) c /= sd;
    return c;
}

} // namespace detail

/// Sequential Bayesian optimization: evaluate a Latin-hypercube design, fit the
/// hyperparameters by maximum likelihood, then alternate EI maximization,
/// evaluation and refitting until the budget is spent. The GP works on
/// standardized outputs; recorded values are the raw ones.
template <class Objective>
BoResult run_bo(Objective&& objective, const BoxDomain& domain, const BoConfig& cfg) {
    using clock = std::chrono::steady_clock;
    cfg.validate();
    domain.validate();
    const int total = cfg.total_evaluations();
    const Eigen::Index p = domain.dim();

    BoResult result;
    PointSet X(0, p);
    Eigen::VectorXd y(0);
    GpModel model{cfg.kernel, 0.0, cfg.initial_noise};

    auto evaluate = [&](const Eigen::VectorXd& x, int iteration, const GpModel& theta, clock::time_point t0) {
        const double raw = objective(x);
        BoRecord rec;
        rec.iteration = iteration;
        rec.x = x;
        rec.raw_y = raw;
        rec.clipped = !std::isfinite(raw);
        rec.y = rec.clipped ? kClippedValue : raw;
        if (rec.clipped && !cfg.quiet)
            std::cerr << "[aenbo] warning: objective returned " << raw << " at iteration " << iteration
                      << "; recorded as " << kClippedValue << "\n";
        rec.y_best = result.history.empty() ? rec.y : std::min(result.history.records.back().y_best, rec.y);
        rec.theta = theta;
        X.conservativeResize(X.rows() + 1, Eigen::NoChange);
        X.row(X.rows() - 1) = x.transpose();
        y.conservativeResize(y.size() + 1);
        y(y.size() - 1) = rec.y;
        rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        result.history.records.push_back(std::move(rec));
    };

    const PointSet design = initial_design(domain, cfg.initial_points, cfg.seed);
    for (int i = 0; i < cfg.initial_points; ++i) evaluate(design.row(i).transpose(), i, model, clock::now());

    auto refit = [&](int iteration, int restarts) {
        const Dataset data{X, detail::standardize(y)};
        try {
            FitReport fit = fit_mle(model, data, restarts, derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(iteration)), cfg.fit);
            model = fit.model;
            result.fits.push_back(std::move(fit));
        } catch (const FitError& e) {
            throw BoError(e.what(), iteration);
        } catch (const FactorizationError& e) {
            throw BoError(e.what(), iteration);
        }
    };

    {
        const auto t0 = clock::now();
        refit(cfg.initial_points - 1, cfg.initial_restarts);
        result.history.records.back().seconds += std::chrono::duration<double>(clock::now() - t0).count();
    }

    for (int i = cfg.initial_points; i < total; ++i) {
        const auto t0 = clock::now();
        const Dataset data{X, detail::standardize(y)};
        Eigen::VectorXd next;
        try {
            const ConditionedGp gp(model, data);
            AcqConfig acq = cfg.acq;
            acq.seed = derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(i));
            next = maximize_acquisition([&gp](const Eigen::VectorXd& x) { return gp.predict_point(x); }, domain,
                                        data.y.minCoeff(), acq)
                       .x;
        } catch (const FactorizationError& e) {
            throw BoError(e.what(), i);
        }
        const GpModel theta = model;
        evaluate(next, i, theta, t0);
        if (cfg.refit_each_iter && i + 1 < total) refit(i, cfg.refit_restarts);
        result.history.records.back().seconds = std::chrono::duration<double>(clock::now() - t0).count();
    }

    const auto [xb, yb] = best_so_far(result.history);
    result.x_best = xb;
    result.y_best = yb;
    return result;
}

} // namespace aenbo

#endif // AENBO_BO_HPP
