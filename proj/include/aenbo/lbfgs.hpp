#ifndef AENBO_LBFGS_HPP
#define AENBO_LBFGS_HPP
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace aenbo {

struct LbfgsOptions {
    int memory = 10;
    int max_iterations = 200;
    /// Converged once ||g|| <= grad_tol * (1 + |f|).
    double grad_tol = 1e-5;
    /// Converged once an accepted step is shorter than this.
    double step_tol = 1e-10;
    /// Stop without claiming convergence once the relative decrease falls below this.
    double f_tol = 1e-15;
    int max_line_search = 50;
};

struct LbfgsResult {
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::infinity();
    Eigen::VectorXd grad;
    double grad_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

struct BoxBounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    [[nodiscard]] Eigen::VectorXd project(const Eigen::VectorXd& x) const {
        return x.cwiseMax(lower).cwiseMin(upper);
    }
};

namespace detail {

inline Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                          const BoxBounds* bounds) {
    Eigen::VectorXd pg = g;
    if (bounds == nullptr) return pg;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if ((x(i) <= bounds->lower(i) && g(i) > 0.0) || (x(i) >= bounds->upper(i) && g(i) < 0.0)) pg(i) = 0.0;
    }
    return pg;
}

} // namespace detail

/// Limited-memory BFGS with a backtracking Armijo search. `fg(x, grad)` returns
/// f(x) and fills grad; a non-finite return marks x as infeasible and the search
/// backs off. With `bounds`, iterates are projected onto the box and the
/// direction is frozen along active constraints.
template <class Fn>
LbfgsResult minimize_lbfgs(Fn&& fg, Eigen::VectorXd x0, const LbfgsOptions& opt,
                           const BoxBounds* bounds = nullptr) {
    LbfgsResult res;
    const Eigen::Index dim = x0.size();
    Eigen::VectorXd x = bounds ? bounds->project(x0) : x0;
    Eigen::VectorXd g(dim);
    double f = fg(x, g);
    res.evaluations = 1;
    res.x = x;
    res.f = f;
    res.grad = g;
    if (!std::isfinite(f) || !g.allFinite()) return res;

    std::deque<Eigen::VectorXd> s_hist;
    std::deque<Eigen::VectorXd> y_hist;
    std::deque<double> rho_hist;

    Eigen::VectorXd g_new(dim);
    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it;
        const Eigen::VectorXd pg = detail::projected_gradient(x, g, bounds);
        res.grad_norm = pg.norm();
        if (res.grad_norm <= opt.grad_tol * (1.0 + std::abs(f))) {
            res.converged = true;
            break;
        }

        // Two-loop recursion.
        Eigen::VectorXd q = pg;
        std::vector<double> a(s_hist.size());
        for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
            a[k] = rho_hist[k] * s_hist[k].dot(q);
            q -= a[k] * y_hist[k];
        }
        if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double b = rho_hist[k] * y_hist[k].dot(q);
            q += (a[k] - b) * s_hist[k];
        }
        Eigen::VectorXd d = -q;
        for (Eigen::Index i = 0; i < dim; ++i)
            if (pg(i) == 0.0 && g(i) != 0.0) d(i) = 0.0;

        if (!(g.dot(d) < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = -pg;
        }
        double t = s_hist.empty() ? std::min(1.0, 1.0 / pg.norm()) : 1.0;

        bool accepted = false;
        bool stalled = false;
        Eigen::VectorXd x_new;
        double f_new = f;
        for (int ls = 0; ls < opt.max_line_search; ++ls) {
            x_new = x + t * d;
            if (bounds) x_new = bounds->project(x_new);
            if ((x_new - x).norm() < opt.step_tol) {
                stalled = true;
                break;
            }
            f_new = fg(x_new, g_new);
            ++res.evaluations;
            if (std::isfinite(f_new) && g_new.allFinite() && f_new <= f + 1e-4 * g.dot(x_new - x)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (!s_hist.empty() && !stalled) {
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                continue;
            }
            res.converged = stalled;
            break;
        }

        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        const double decrease = f - f_new;
        x = x_new;
        f = f_new;
        g = g_new;
        res.iterations = it + 1;
        if (s.norm() < opt.step_tol) {
            res.converged = true;
            break;
        }
        if (decrease <= opt.f_tol * (1.0 + std::abs(f))) break;
    }
    res.x = x;
    res.f = f;
    res.grad = g;
    res.grad_norm = detail::projected_gradient(x, g, bounds).norm();
    if (res.grad_norm <= opt.grad_tol * (1.0 + std::abs(f))) res.converged = true;
    return res;
}

} // namespace aenbo

#endif // AENBO_LBFGS_HPP
