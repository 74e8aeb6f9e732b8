#ifndef AENBO_ACQUISITION_HPP
#define AENBO_ACQUISITION_HPP
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "aenbo/design.hpp"
#include "aenbo/errors.hpp"
#include "aenbo/lbfgs.hpp"

namespace aenbo {

struct AcqConfig {
    int multistarts = 10;
    int max_inner_iters = 200;
    /// Size of the Latin-hypercube pool the multistart points are drawn from.
    int candidates = 1000;
    std::uint64_t seed = 0;

    void validate() const {
        if (multistarts < 1) throw ParamError("acquisition needs at least one multistart");
        if (max_inner_iters < 0) throw ParamError("max_inner_iters must be nonnegative");
        if (candidates < multistarts) throw ParamError("candidate pool smaller than the multistart count");
    }
};

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// E[max(0, f_best - f)] for f ~ N(mu, sigma^2), minimization form.
inline double expected_improvement(double mu, double sigma, double f_best) {
    if (sigma < -1e-12 || std::isnan(sigma)) throw ParamError("predictive standard deviation must be nonnegative");
    sigma = std::max(sigma, 0.0);
    const double gap = f_best - mu;
    if (sigma == 0.0) return std::max(0.0, gap);
    const double z = gap / sigma;
    return std::max(0.0, gap * normal_cdf(z) + sigma * normal_pdf(z));
}

struct AcqResult {
    Eigen::VectorXd x;
    double ei = 0.0;
    /// Largest EI among the multistart seed points.
    double best_start_ei = 0.0;
};

/// Multistart maximization of EI over the box. `posterior(x)` returns the
/// predictive (mean, standard deviation) at x. Starts are the best points of a
/// seeded Latin-hypercube pool; each is polished by projected L-BFGS with
/// central-difference gradients. Ties go to the lowest start index.
template <class PosteriorFn>
AcqResult maximize_acquisition(PosteriorFn&& posterior, const BoxDomain& domain, double f_best, const AcqConfig& cfg) {
    cfg.validate();
    domain.validate();
    const Eigen::Index p = domain.dim();

    auto ei_at = [&](const Eigen::VectorXd& x) -> double {
        const auto [mu, sigma] = posterior(x);
        if (!std::isfinite(mu) || !std::isfinite(sigma)) return 0.0;
        return expected_improvement(mu, std::max(sigma, 0.0), f_best);
    };

    const PointSet pool = latin_hypercube(domain, cfg.candidates, cfg.seed);
    std::vector<double> pool_ei(static_cast<std::size_t>(cfg.candidates));
    for (int i = 0; i < cfg.candidates; ++i) pool_ei[static_cast<std::size_t>(i)] = ei_at(pool.row(i).transpose());
    std::vector<int> order(static_cast<std::size_t>(cfg.candidates));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return pool_ei[static_cast<std::size_t>(a)] > pool_ei[static_cast<std::size_t>(b)]; });

    const BoxBounds bounds{domain.lo, domain.hi};
    const Eigen::VectorXd step = 1e-6 * domain.width();
    auto neg_ei = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) -> double {
        const double f = ei_at(x);
        grad.resize(p);
        for (Eigen::Index j = 0; j < p; ++j) {
            Eigen::VectorXd up = x;
            Eigen::VectorXd down = x;
            up(j) = std::min(x(j) + step(j), domain.hi(j));
            down(j) = std::max(x(j) - step(j), domain.lo(j));
            grad(j) = -(ei_at(up) - ei_at(down)) / (up(j) - down(j));
        }
        return -f;
    };

    LbfgsOptions opt;
    opt.max_iterations = cfg.max_inner_iters;
    opt.grad_tol = 1e-12;
    opt.step_tol = 1e-12;
    opt.f_tol = 1e-14;

    AcqResult best;
    best.x = pool.row(order.front()).transpose();
    best.ei = pool_ei[static_cast<std::size_t>(order.front())];
    best.best_start_ei = best.ei;
    for (int s = 0; s < cfg.multistarts; ++s) {
        const Eigen::VectorXd x0 = pool.row(order[static_cast<std::size_t>(s)]).transpose();
        const LbfgsResult r = minimize_lbfgs(neg_ei, x0, opt, &bounds);
        const Eigen::VectorXd x = domain.clamp(r.x);
        const double ei = ei_at(x);
        if (ei > best.ei) {
            best.ei = ei;
            best.x = x;
        }
    }
    return best;
}

} // namespace aenbo

#endif // AENBO_ACQUISITION_HPP
