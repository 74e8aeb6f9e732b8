#ifndef AENBO_BENCHMARKS_HPP
#define AENBO_BENCHMARKS_HPP
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "aenbo/design.hpp"
#include "aenbo/errors.hpp"
#include "aenbo/gp.hpp"

namespace aenbo {

enum class FunctionName { McCormick, SixHumpCamel, Rosenbrock, Branin };

inline constexpr std::array<FunctionName, 4> kAllFunctions = {FunctionName::McCormick, FunctionName::SixHumpCamel,
                                                             FunctionName::Rosenbrock, FunctionName::Branin};

inline std::string_view to_string(FunctionName f) {
    switch (f) {
    case FunctionName::McCormick: return "mccormick";
    case FunctionName::SixHumpCamel: return "sixhumpcamel";
    case FunctionName::Rosenbrock: return "rosenbrock";
    case FunctionName::Branin: return "branin";
    }
    return "?";
}

inline FunctionName parse_function(std::string_view s) {
    for (FunctionName f : kAllFunctions)
        if (to_string(f) == s) return f;
    if (s == "six-hump-camel" || s == "camel") return FunctionName::SixHumpCamel;
    throw ParamError("unknown benchmark function '" + std::string(s) + "'");
}

/// Which input box a benchmark run uses. Widen5/Widen10 are the printed
/// outlier-scenario boxes; the *Rule variants apply widen_domain to the
/// nominal box instead.
enum class Scenario { None, Widen5, Widen10, Widen5Rule, Widen10Rule };

inline std::string_view to_string(Scenario s) {
    switch (s) {
    case Scenario::None: return "none";
    case Scenario::Widen5: return "widen5";
    case Scenario::Widen10: return "widen10";
    case Scenario::Widen5Rule: return "widen5-rule";
    case Scenario::Widen10Rule: return "widen10-rule";
    }
    return "?";
}

inline Scenario parse_scenario(std::string_view s) {
    for (Scenario sc : {Scenario::None, Scenario::Widen5, Scenario::Widen10, Scenario::Widen5Rule, Scenario::Widen10Rule})
        if (to_string(sc) == s) return sc;
    throw ParamError("unknown scenario '" + std::string(s) + "'");
}

/// The printed Branin outlier boxes have a positive lower x bound; Negated
/// flips its sign. Verbatim is the default.
enum class BraninLowerSign { Verbatim, Negated };

struct SyntheticFunction {
    FunctionName name;
    BoxDomain domain;
    double global_min_value;
    /// A known minimizer, used for transcription checks.
    Eigen::Vector2d argmin;
};

inline double eval_formula(FunctionName name, double x, double xp) {
    using std::numbers::pi;
    switch (name) {
    case FunctionName::McCormick: return std::sin(x + xp) + (x - xp) * (x - xp) - 1.5 * x + 2.5 * xp + 1.0;
    case FunctionName::SixHumpCamel:
        return (4.0 - 2.1 * x * x + x * x * x * x / 3.0) * x * x + x * xp + (4.0 * xp * xp - 4.0) * xp * xp;
    case FunctionName::Rosenbrock: return 100.0 * (xp - x * x) * (xp - x * x) + (x - 1.0) * (x - 1.0);
    case FunctionName::Branin: {
        const double t = xp - 5.1 / (4.0 * pi * pi) * x * x + 5.0 / pi * x - 6.0;
        return t * t + 10.0 * (1.0 - 1.0 / (8.0 * pi)) * std::cos(x) + 10.0;
    }
    }
    return 0.0;
}

inline SyntheticFunction synthetic(FunctionName name) {
    switch (name) {
    case FunctionName::McCormick:
        return {name, BoxDomain{{-1.5, 4.0}, {-3.0, 4.0}}, -1.9133, Eigen::Vector2d(-0.54719, -1.54719)};
    case FunctionName::SixHumpCamel:
        return {name, BoxDomain{{-2.0, 2.0}, {-1.0, 1.0}}, -1.0316, Eigen::Vector2d(0.0898, -0.7126)};
    case FunctionName::Rosenbrock:
        return {name, BoxDomain{{-0.5, 3.0}, {-1.5, 2.0}}, 0.0, Eigen::Vector2d(1.0, 1.0)};
    case FunctionName::Branin:
        return {name, BoxDomain{{-5.0, 10.0}, {1.0, 15.0}}, 0.3979, Eigen::Vector2d(std::numbers::pi, 2.275)};
    }
    throw ParamError("unknown benchmark function");
}

/// [lo - pct * w, hi + pct * w] per interval; pct is a fraction (0.025 for 2.5%).
inline BoxDomain widen_domain(const BoxDomain& box, double pct_each_side) {
    if (!(pct_each_side >= 0.0)) throw ParamError("widening fraction must be nonnegative");
    const Eigen::VectorXd w = box.width();
    return BoxDomain(box.lo - pct_each_side * w, box.hi + pct_each_side * w);
}

/// Outlier-scenario boxes as printed, before any sign handling.
inline BoxDomain printed_widened_domain(FunctionName name, Scenario scenario) {
    const bool five = scenario == Scenario::Widen5;
    switch (name) {
    case FunctionName::McCormick:
        return five ? BoxDomain{{-1.59, 4.2}, {-3.17, 4.2}} : BoxDomain{{-1.8, 4.31}, {-3.39, 4.39}};
    case FunctionName::SixHumpCamel:
        return five ? BoxDomain{{-2.1, 2.11}, {-1.05, 1.06}} : BoxDomain{{-2.22, 2.22}, {-1.11, 1.11}};
    case FunctionName::Rosenbrock:
        return five ? BoxDomain{{-0.59, 3.1}, {-1.59, 2.11}} : BoxDomain{{-0.69, 3.2}, {-1.69, 2.2}};
    case FunctionName::Branin:
        return five ? BoxDomain{{5.39, 10.4}, {0.63, 15.37}} : BoxDomain{{5.67, 11.0}, {0.44, 16.0}};
    }
    throw ParamError("unknown benchmark function");
}

inline BoxDomain scenario_domain(FunctionName name, Scenario scenario,
                                 BraninLowerSign sign = BraninLowerSign::Verbatim) {
    const SyntheticFunction fn = synthetic(name);
    switch (scenario) {
    case Scenario::None: return fn.domain;
    case Scenario::Widen5Rule: return widen_domain(fn.domain, 0.025);
    case Scenario::Widen10Rule: return widen_domain(fn.domain, 0.05);
    case Scenario::Widen5:
    case Scenario::Widen10: {
        BoxDomain d = printed_widened_domain(name, scenario);
        if (name == FunctionName::Branin && sign == BraninLowerSign::Negated) d.lo(0) = -d.lo(0);
        return d;
    }
    }
    return fn.domain;
}

/// Evaluates the printed formula; throws DomainError outside `active`.
template <class A>
double eval_synthetic(FunctionName name, const Eigen::MatrixBase<A>& x, const BoxDomain& active) {
    if (x.size() != 2) throw DimensionError("benchmark functions take 2-dimensional points");
    if (!active.contains(x, 1e-12))
        throw DomainError("point (" + std::to_string(x(0)) + ", " + std::to_string(x(1)) + ") lies outside the " +
                          std::string(to_string(name)) + " domain");
    return eval_formula(name, x(0), x(1));
}

template <class A>
double eval_synthetic(FunctionName name, const Eigen::MatrixBase<A>& x) {
    return eval_synthetic(name, x, synthetic(name).domain);
}

struct GridMinimum {
    double value;
    Eigen::Vector2d location;
};

/// Minimum over an n x n grid spanning the box, endpoints included.
inline GridMinimum grid_minimum(FunctionName name, const BoxDomain& box, int n = 2001) {
    GridMinimum best{std::numeric_limits<double>::infinity(), Eigen::Vector2d::Zero()};
    for (int i = 0; i < n; ++i) {
        const double x = box.lo(0) + (box.hi(0) - box.lo(0)) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double xp = box.lo(1) + (box.hi(1) - box.lo(1)) * j / (n - 1);
            const double v = eval_formula(name, x, xp);
            if (v < best.value) best = {v, Eigen::Vector2d(x, xp)};
        }
    }
    return best;
}

/// Root of the summed squared gaps to the known minimum; with normalize the sum
/// is divided by R first.
inline double rmse(const std::vector<double>& y_stars, double y_global, bool normalize = false) {
    if (y_stars.empty()) throw ParamError("rmse needs at least one repetition");
    double s = 0.0;
    for (double y : y_stars) s += (y - y_global) * (y - y_global);
    if (normalize) s /= static_cast<double>(y_stars.size());
    return std::sqrt(s);
}

/// Shifts ceil(fraction * n) seeded observations by +/- magnitude * std(y).
inline Dataset inject_y_outliers(const Dataset& data, double fraction, double magnitude, std::uint64_t seed,
                                 std::vector<int>* modified = nullptr) {
    if (!(fraction >= 0.0 && fraction <= 0.5)) throw ParamError("outlier fraction must lie in [0, 0.5]");
    data.validate();
    const int n = static_cast<int>(data.size());
    // Guard against 0.1 * 20 landing a hair above 2.
    const int count = static_cast<int>(std::ceil(fraction * n - 1e-9));
    Dataset out = data;
    if (modified) modified->clear();
    if (count == 0) return out;

    const double mean = data.y.mean();
    const double sd = std::sqrt((data.y.array() - mean).square().sum() / n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < count; ++i) {
        const int k = i + std::min(static_cast<int>(unif(rng) * (n - i)), n - i - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(k)]);
        const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
        out.y(idx[static_cast<std::size_t>(i)]) += sign * magnitude * sd;
    }
    if (modified) {
        modified->assign(idx.begin(), idx.begin() + count);
        std::sort(modified->begin(), modified->end());
    }
    return out;
}

} // namespace aenbo

#endif // AENBO_BENCHMARKS_HPP
