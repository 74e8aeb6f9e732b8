#ifndef AENBO_HYPEROPT_HPP
#define AENBO_HYPEROPT_HPP
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "aenbo/errors.hpp"
#include "aenbo/gp.hpp"
#include "aenbo/kernels.hpp"
#include "aenbo/lbfgs.hpp"

namespace aenbo {

struct Interval {
    double lo;
    double hi;
    /// Searched on a log scale when true.
    bool log_scale;

    [[nodiscard]] bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Search ranges for maximum-likelihood fitting. lambda and alpha may be pinned,
/// which removes them from the search vector.
struct ParamBox {
    Interval variance{1e-6, 1e6, true};
    Interval lengthscale{1e-3, 1e3, true};
    Interval lambda{0.1, 0.9, false};
    Interval alpha{0.25, 0.75, false};
    Interval noise{1e-10, 1e2, true};
    std::optional<double> fixed_lambda;
    std::optional<double> fixed_alpha;

    [[nodiscard]] const Interval& interval(Hyper h) const {
        switch (h) {
        case Hyper::Variance: return variance;
        case Hyper::Lengthscale: return lengthscale;
        case Hyper::Lambda: return lambda;
        case Hyper::Alpha: return alpha;
        case Hyper::Noise: return noise;
        }
        return noise;
    }

    void validate() const {
        for (Hyper h : {Hyper::Variance, Hyper::Lengthscale, Hyper::Lambda, Hyper::Alpha, Hyper::Noise}) {
            const Interval& iv = interval(h);
            if (!(iv.lo < iv.hi)) throw ParamError("empty search interval for " + std::string(to_string(h)));
            if (iv.log_scale && !(iv.lo > 0.0))
                throw ParamError("log-scale interval for " + std::string(to_string(h)) + " must be positive");
        }
    }

    [[nodiscard]] bool is_fixed(Hyper h) const {
        return (h == Hyper::Lambda && fixed_lambda) || (h == Hyper::Alpha && fixed_alpha);
    }
};

/// Hyperparameters searched for this kernel kind, noise last.
inline std::vector<Hyper> free_hypers(KernelKind kind, const ParamBox& box) {
    std::vector<Hyper> out;
    for (Hyper h : kernel_hypers(kind))
        if (!box.is_fixed(h)) out.push_back(h);
    out.push_back(Hyper::Noise);
    return out;
}

/// Copies pinned lambda/alpha values from the box into the model.
inline GpModel apply_fixed(GpModel model, const ParamBox& box) {
    if (model.kernel.kind == KernelKind::AenRbf) {
        if (box.fixed_lambda) model.kernel.lambda = *box.fixed_lambda;
        if (box.fixed_alpha) model.kernel.alpha = *box.fixed_alpha;
    }
    return model;
}

namespace detail {

inline constexpr double kBoundaryInset = 1e-9;

inline double sigmoid(double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
}

// Position of v inside the interval as a fraction of its (possibly log) width.
inline double unit_position(double v, const Interval& iv) {
    if (iv.log_scale) return (std::log(v) - std::log(iv.lo)) / (std::log(iv.hi) - std::log(iv.lo));
    return (v - iv.lo) / (iv.hi - iv.lo);
}

inline double from_unit(double u, const Interval& iv) {
    const double v = iv.log_scale ? std::exp(std::log(iv.lo) + u * (std::log(iv.hi) - std::log(iv.lo)))
                                  : iv.lo + u * (iv.hi - iv.lo);
    // exp(log(lo)) can land one ulp outside the interval.
    return std::clamp(v, iv.lo, iv.hi);
}

inline double to_unconstrained_scalar(double v, const Interval& iv, Hyper h) {
    const double tol = 1e-12;
    double u = unit_position(v, iv);
    if (!std::isfinite(u) || u < -tol || u > 1.0 + tol)
        throw ParamError(std::string(to_string(h)) + " = " + std::to_string(v) + " lies outside its search box [" +
                         std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + "]");
    u = std::clamp(u, kBoundaryInset, 1.0 - kBoundaryInset);
    return std::log(u) - std::log1p(-u);
}

} // namespace detail

/// Scaled logit of each free hyperparameter (of its logarithm for log-scale ranges).
inline Eigen::VectorXd to_unconstrained(const GpModel& model, const ParamBox& box) {
    const auto hs = free_hypers(model.kernel.kind, box);
    Eigen::VectorXd v(static_cast<Eigen::Index>(hs.size()));
    for (std::size_t i = 0; i < hs.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = detail::to_unconstrained_scalar(model.get(hs[i]), box.interval(hs[i]), hs[i]);
    return v;
}

/// Inverse of to_unconstrained. `base` supplies the kernel kind and everything not searched.
/// When `jacobian` is given it receives d theta / d v for each coordinate.
inline GpModel from_unconstrained(const Eigen::VectorXd& v, const ParamBox& box, const GpModel& base,
                                  Eigen::VectorXd* jacobian = nullptr) {
    const auto hs = free_hypers(base.kernel.kind, box);
    if (v.size() != static_cast<Eigen::Index>(hs.size()))
        throw DimensionError("unconstrained vector has " + std::to_string(v.size()) + " entries, expected " +
                             std::to_string(hs.size()));
    GpModel m = apply_fixed(base, box);
    if (jacobian) jacobian->resize(v.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const Interval& iv = box.interval(hs[i]);
        const double u = detail::sigmoid(v(static_cast<Eigen::Index>(i)));
        const double theta = detail::from_unit(u, iv);
        m.set(hs[i], theta);
        if (jacobian) {
            const double du = u * (1.0 - u);
            (*jacobian)(static_cast<Eigen::Index>(i)) =
                iv.log_scale ? theta * (std::log(iv.hi) - std::log(iv.lo)) * du : (iv.hi - iv.lo) * du;
        }
    }
    return m;
}

inline bool within_box(const GpModel& m, const ParamBox& box) {
    for (Hyper h : free_hypers(m.kernel.kind, box))
        if (!box.interval(h).contains(m.get(h))) return false;
    return true;
}

struct FitReport {
    GpModel model;
    double lml = -std::numeric_limits<double>::infinity();
    int restarts_used = 0;
    bool converged = false;
    /// Norm of the likelihood gradient in unconstrained coordinates at the optimum.
    double gradient_norm = std::numeric_limits<double>::infinity();
    /// Log likelihood at each start point; -inf where the start could not be factorized.
    std::vector<double> start_lml;

    friend bool operator==(const FitReport&, const FitReport&) = default;
};

/// Relative decrease of 1e7 machine epsilons ends a likelihood fit.
inline LbfgsOptions mle_lbfgs_defaults() {
    LbfgsOptions o;
    o.f_tol = 2.2e-9;
    return o;
}

struct FitOptions {
    ParamBox box;
    LbfgsOptions lbfgs = mle_lbfgs_defaults();
};

/// Samples a start point uniformly over the (log-)box.
inline GpModel random_start(const GpModel& base, const ParamBox& box, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    GpModel m = apply_fixed(base, box);
    for (Hyper h : free_hypers(base.kernel.kind, box)) m.set(h, detail::from_unit(unif(rng), box.interval(h)));
    return m;
}

/// Moves a start that fails strict factorization into the feasible region:
/// lambda drops to its lower bound, then the lengthscale is halved, then the
/// noise variance is raised. Returns false when nothing works.
inline bool repair_start(GpModel& start, const Dataset& data, const ParamBox& box) {
    const auto feasible = [&](const GpModel& m) {
        try {
            (void)factorize(m, data.X, Strictness::Strict);
            return true;
        } catch (const FactorizationError&) {
            return false;
        }
    };
    if (feasible(start)) return true;
    if (start.kernel.kind == KernelKind::AenRbf && !box.is_fixed(Hyper::Lambda)) {
        start.kernel.lambda = box.lambda.lo;
        if (feasible(start)) return true;
    }
    if (!admissible_kernel_matrix(start, data.X)) {
        while (start.kernel.lengthscale > box.lengthscale.lo) {
            start.kernel.lengthscale = std::max(0.5 * start.kernel.lengthscale, box.lengthscale.lo);
            if (admissible_kernel_matrix(start, data.X)) break;
        }
        if (feasible(start)) return true;
    }
    double noise = std::max({start.noise, 1e-6 * start.kernel.variance, box.noise.lo});
    while (noise < box.noise.hi) {
        noise = std::min(noise * 10.0, box.noise.hi);
        start.noise = noise;
        if (feasible(start)) return true;
    }
    return false;
}

/// Maximizes the log marginal likelihood from `model` and (restarts - 1) random
/// box points seeded with seed + r. Ties go to the lowest restart index.
inline FitReport fit_mle(const GpModel& model, const Dataset& data, int restarts, std::uint64_t seed,
                         const FitOptions& options = {}) {
    if (restarts < 1) throw ParamError("fit_mle needs at least one restart");
    data.validate();
    const ParamBox& box = options.box;
    box.validate();

    FitReport best;
    int succeeded = 0;
    for (int r = 0; r < restarts; ++r) {
        GpModel start = r == 0 ? apply_fixed(model, box) : random_start(model, box, seed + static_cast<std::uint64_t>(r));
        if (!repair_start(start, data, box)) {
            best.start_lml.push_back(-std::numeric_limits<double>::infinity());
            continue;
        }
        const Eigen::VectorXd v0 = to_unconstrained(start, box);
        const GpModel base = start;

        auto objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) -> double {
            Eigen::VectorXd jac;
            const GpModel m = from_unconstrained(v, box, base, &jac);
            LmlResult res;
            try {
                // The noise term must not be what makes an indefinite kernel usable.
                res = lml_and_gradient(m, data, Strictness::Strict);
            } catch (const FactorizationError&) {
                grad.setZero(v.size());
                return std::numeric_limits<double>::infinity();
            }
            // Gradient entries follow m.hypers(); pick out the searched ones.
            const auto hs = free_hypers(m.kernel.kind, box);
            const auto all = m.hypers();
            grad.resize(v.size());
            for (std::size_t i = 0; i < hs.size(); ++i) {
                const auto pos = std::find(all.begin(), all.end(), hs[i]) - all.begin();
                grad(static_cast<Eigen::Index>(i)) = -res.gradient(pos) * jac(static_cast<Eigen::Index>(i));
            }
            return -res.value;
        };

        double start_value = -std::numeric_limits<double>::infinity();
        bool first_call = true;
        auto recording = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) -> double {
            const double f = objective(v, grad);
            if (first_call && std::isfinite(f)) start_value = -f;
            first_call = false;
            return f;
        };
        const LbfgsResult opt = minimize_lbfgs(recording, v0, options.lbfgs);
        best.start_lml.push_back(start_value);
        if (!std::isfinite(opt.f)) continue;
        ++succeeded;
        const double lml = -opt.f;
        if (lml > best.lml) {
            best.lml = lml;
            best.model = from_unconstrained(opt.x, box, base);
            best.converged = opt.converged;
            best.gradient_norm = opt.grad_norm;
        }
    }
    if (succeeded == 0) throw FitError("every likelihood restart failed to factorize");
    best.restarts_used = succeeded;
    if (!within_box(best.model, box)) throw std::logic_error("fitted hyperparameters left the search box");
    return best;
}

} // namespace aenbo

#endif // AENBO_HYPEROPT_HPP
