#ifndef AENBO_DESIGN_HPP
#define AENBO_DESIGN_HPP
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "aenbo/errors.hpp"
#include "aenbo/kernels.hpp"

namespace aenbo {

/// Per-dimension closed intervals [lo_j, hi_j].
struct BoxDomain {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    BoxDomain() = default;
    BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper) : lo(std::move(lower)), hi(std::move(upper)) { validate(); }
    BoxDomain(std::initializer_list<std::pair<double, double>> intervals) {
        lo.resize(static_cast<Eigen::Index>(intervals.size()));
        hi.resize(lo.size());
        Eigen::Index j = 0;
        for (const auto& [a, b] : intervals) {
            lo(j) = a;
            hi(j) = b;
            ++j;
        }
        validate();
    }

    [[nodiscard]] Eigen::Index dim() const { return lo.size(); }
    [[nodiscard]] Eigen::VectorXd width() const { return hi - lo; }

    void validate() const {
        if (lo.size() == 0 || lo.size() != hi.size()) throw DimensionError("box domain bounds have mismatched sizes");
        for (Eigen::Index j = 0; j < lo.size(); ++j)
            if (!std::isfinite(lo(j)) || !std::isfinite(hi(j)) || !(lo(j) < hi(j)))
                throw ParamError("box interval " + std::to_string(j) + " is empty or non-finite");
    }

    template <class A>
    [[nodiscard]] bool contains(const Eigen::MatrixBase<A>& x, double rel_tol = 0.0) const {
        if (x.size() != dim()) return false;
        for (Eigen::Index j = 0; j < dim(); ++j) {
            const double slack = rel_tol * (hi(j) - lo(j));
            if (!(x(j) >= lo(j) - slack && x(j) <= hi(j) + slack)) return false;
        }
        return true;
    }

    /// Every interval of `inner` lies inside the matching interval here.
    [[nodiscard]] bool encloses(const BoxDomain& inner) const {
        return inner.dim() == dim() && (lo.array() <= inner.lo.array()).all() && (hi.array() >= inner.hi.array()).all();
    }

    [[nodiscard]] Eigen::VectorXd clamp(const Eigen::VectorXd& x) const { return x.cwiseMax(lo).cwiseMin(hi); }

    friend bool operator==(const BoxDomain& a, const BoxDomain& b) {
        return a.lo.size() == b.lo.size() && a.lo == b.lo && a.hi == b.hi;
    }
};

/// Seeded Latin-hypercube sample of `count` points, one per row. Each
/// dimension's coordinates occupy distinct strata of width 1/count.
inline PointSet latin_hypercube(const BoxDomain& domain, int count, std::uint64_t seed) {
    if (count < 1) throw ParamError("Latin hypercube needs at least one point");
    domain.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Eigen::Index p = domain.dim();
    PointSet out(count, p);
    std::vector<int> perm(static_cast<std::size_t>(count));
    for (Eigen::Index j = 0; j < p; ++j) {
        std::iota(perm.begin(), perm.end(), 0);
        // Fisher-Yates with an explicit draw so the sequence does not depend on
        // the standard library's shuffle.
        for (int i = count - 1; i > 0; --i) {
            const int k = static_cast<int>(unif(rng) * (i + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(std::min(k, i))]);
        }
        for (int i = 0; i < count; ++i) {
            double v = unif(rng);
            while (v == 0.0) v = unif(rng);
            double u = (perm[static_cast<std::size_t>(i)] + v) / count;
            u = std::clamp(u, 0.0, std::nextafter(1.0, 0.0));
            out(i, j) = domain.lo(j) + u * (domain.hi(j) - domain.lo(j));
        }
    }
    return out;
}

} // namespace aenbo

#endif // AENBO_DESIGN_HPP
