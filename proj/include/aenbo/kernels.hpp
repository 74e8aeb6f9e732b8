#ifndef AENBO_KERNELS_HPP
#define AENBO_KERNELS_HPP
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "aenbo/errors.hpp"

namespace aenbo {

using Point = Eigen::VectorXd;
/// n x p matrix, one point per row.
using PointSet = Eigen::MatrixXd;

enum class KernelKind { AenRbf, Rbf, Matern52, Linear, Polynomial };

/// Every hyperparameter a GP model can carry. Noise belongs to the model, not the kernel.
enum class Hyper { Variance, Lengthscale, Lambda, Alpha, Noise };

enum class Branch { Lower, Upper };

inline std::string_view to_string(KernelKind kind) {
    switch (kind) {
    case KernelKind::AenRbf: return "aenrbf";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Matern52: return "matern52";
    case KernelKind::Linear: return "linear";
    case KernelKind::Polynomial: return "polynomial";
    }
    return "?";
}

inline std::string_view to_string(Hyper h) {
    switch (h) {
    case Hyper::Variance: return "variance";
    case Hyper::Lengthscale: return "lengthscale";
    case Hyper::Lambda: return "lambda";
    case Hyper::Alpha: return "alpha";
    case Hyper::Noise: return "noise";
    }
    return "?";
}

inline KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "aenrbf" || name == "aen-rbf" || name == "aen_rbf") return KernelKind::AenRbf;
    if (name == "rbf") return KernelKind::Rbf;
    if (name == "matern52" || name == "matern") return KernelKind::Matern52;
    if (name == "linear") return KernelKind::Linear;
    if (name == "polynomial" || name == "poly") return KernelKind::Polynomial;
    throw ParamError("unknown kernel kind '" + std::string(name) + "'");
}

inline bool is_stationary(KernelKind kind) {
    return kind == KernelKind::AenRbf || kind == KernelKind::Rbf || kind == KernelKind::Matern52;
}

/// Hyperparameters differentiated by gram_grad, in slice order.
inline std::vector<Hyper> kernel_hypers(KernelKind kind) {
    switch (kind) {
    case KernelKind::AenRbf: return {Hyper::Variance, Hyper::Lengthscale, Hyper::Lambda, Hyper::Alpha};
    case KernelKind::Rbf:
    case KernelKind::Matern52: return {Hyper::Variance, Hyper::Lengthscale};
    case KernelKind::Linear:
    case KernelKind::Polynomial: return {Hyper::Variance};
    }
    return {};
}

struct KernelSpec {
    KernelKind kind = KernelKind::Rbf;
    double variance = 1.0;
    double lengthscale = 1.0;
    double lambda = 0.5;
    double alpha = 0.5;
    int poly_degree = 2;
    double poly_offset = 1.0;

    static KernelSpec defaults(KernelKind k) {
        KernelSpec s;
        s.kind = k;
        return s;
    }

    /// Throws ParamError when the spec cannot be evaluated. lambda and alpha are
    /// checked against [0, 1] here; the narrower fitting ranges live in ParamBox.
    void validate() const {
        if (!(variance > 0.0) || !std::isfinite(variance))
            throw ParamError("kernel variance must be positive and finite");
        if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
            throw ParamError("kernel lengthscale must be positive and finite");
        if (kind == KernelKind::AenRbf) {
            if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParamError("AEN-RBF lambda must lie in [0, 1]");
            if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParamError("AEN-RBF alpha must lie in [0, 1]");
        } else if (lambda != 0.5 || alpha != 0.5) {
            throw ParamError("lambda/alpha are only meaningful for the AEN-RBF kernel");
        }
        if (kind == KernelKind::Polynomial && poly_degree < 1)
            throw ParamError("polynomial degree must be a positive integer");
        if ((kind == KernelKind::Linear || kind == KernelKind::Polynomial) &&
            !(poly_offset >= 0.0 && std::isfinite(poly_offset)))
            throw ParamError("polynomial offset must be nonnegative");
    }

    [[nodiscard]] double get(Hyper h) const {
        switch (h) {
        case Hyper::Variance: return variance;
        case Hyper::Lengthscale: return lengthscale;
        case Hyper::Lambda: return lambda;
        case Hyper::Alpha: return alpha;
        case Hyper::Noise: break;
        }
        throw ParamError("noise is not a kernel hyperparameter");
    }

    void set(Hyper h, double v) {
        switch (h) {
        case Hyper::Variance: variance = v; return;
        case Hyper::Lengthscale: lengthscale = v; return;
        case Hyper::Lambda: lambda = v; return;
        case Hyper::Alpha: alpha = v; return;
        case Hyper::Noise: break;
        }
        throw ParamError("noise is not a kernel hyperparameter");
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct GramResult {
    Eigen::MatrixXd matrix;
    bool symmetric = false;
};

namespace detail {

template <class A, class B>
void check_same_dim(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    if (x.size() != x2.size() || x.size() == 0)
        throw DimensionError("point dimensions differ: " + std::to_string(x.size()) + " vs " +
                             std::to_string(x2.size()));
}

inline void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParamError("elastic-net weight lambda must lie in [0, 1]");
}

// Both squared distances in one pass. Kept as separate accumulators so the
// manhattan >= euclidean ordering survives rounding.
template <class A, class B>
void squared_distances(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2, double& euclid,
                       double& manhattan) {
    double sq = 0.0;
    double abs_sum = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double d = x(j) - x2(j);
        sq += d * d;
        abs_sum += std::abs(d);
    }
    euclid = sq;
    manhattan = abs_sum * abs_sum;
}

template <class A, class B>
Branch branch_unchecked(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) s += x(j) - x2(j);
    return s < 0.0 ? Branch::Lower : Branch::Upper;
}

inline double branch_coefficient(Branch b, double alpha) { return b == Branch::Lower ? 1.0 - alpha : alpha; }

// Shared by the GP, SVM and activation forms: exp(-c * D / scale).
template <class A, class B>
double asymmetric_elastic_exp(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2, double scale,
                              double lambda, double alpha) {
    double de = 0.0;
    double dm = 0.0;
    squared_distances(x, x2, de, dm);
    const double d = lambda * dm + (1.0 - lambda) * de;
    const double c = branch_coefficient(branch_unchecked(x, x2), alpha);
    return std::exp(-(c * d) / scale);
}

// (k(x, x2) + k(x2, x)) / 2 for AEN-RBF with one distance pass. Negating a
// sum of negated terms is exact, so this matches the two-call form bit for bit.
template <class A, class B>
double symmetrized_aen_unchecked(const KernelSpec& spec, const Eigen::MatrixBase<A>& x,
                                 const Eigen::MatrixBase<B>& x2) {
    double de = 0.0;
    double dm = 0.0;
    squared_distances(x, x2, de, dm);
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) s += x(j) - x2(j);
    const double d = spec.lambda * dm + (1.0 - spec.lambda) * de;
    const double scale = spec.lengthscale * spec.lengthscale;
    const double c1 = branch_coefficient(s < 0.0 ? Branch::Lower : Branch::Upper, spec.alpha);
    const double c2 = branch_coefficient(-s < 0.0 ? Branch::Lower : Branch::Upper, spec.alpha);
    return 0.5 * (spec.variance * std::exp(-(c1 * d) / scale) + spec.variance * std::exp(-(c2 * d) / scale));
}

inline double matern52_from_sq(double variance, double lengthscale, double de) {
    const double r = std::sqrt(de);
    const double s = std::sqrt(5.0) * r / lengthscale;
    return variance * (1.0 + s + 5.0 * de / (3.0 * lengthscale * lengthscale)) * std::exp(-s);
}

template <class A, class B>
double kernel_unchecked(const KernelSpec& spec, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    switch (spec.kind) {
    case KernelKind::AenRbf:
        return spec.variance *
               asymmetric_elastic_exp(x, x2, spec.lengthscale * spec.lengthscale, spec.lambda, spec.alpha);
    case KernelKind::Rbf: {
        double de = 0.0;
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double d = x(j) - x2(j);
            de += d * d;
        }
        // Same operation order as the AEN-RBF branch so that lambda = 0, alpha = 0.5
        // reproduces this value bit for bit.
        return spec.variance * std::exp(-(0.5 * de) / (spec.lengthscale * spec.lengthscale));
    }
    case KernelKind::Matern52: {
        double de = 0.0;
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double d = x(j) - x2(j);
            de += d * d;
        }
        return matern52_from_sq(spec.variance, spec.lengthscale, de);
    }
    case KernelKind::Linear: {
        double dot = 0.0;
        for (Eigen::Index j = 0; j < x.size(); ++j) dot += x(j) * x2(j);
        return spec.variance * (dot + spec.poly_offset);
    }
    case KernelKind::Polynomial: {
        double dot = 0.0;
        for (Eigen::Index j = 0; j < x.size(); ++j) dot += x(j) * x2(j);
        return spec.variance * std::pow(dot + spec.poly_offset, spec.poly_degree);
    }
    }
    return 0.0;
}

} // namespace detail

template <class A, class B>
double dist_euclidean_sq(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    detail::check_same_dim(x, x2);
    double de = 0.0;
    double dm = 0.0;
    detail::squared_distances(x, x2, de, dm);
    return de;
}

template <class A, class B>
double dist_manhattan_sq(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    detail::check_same_dim(x, x2);
    double de = 0.0;
    double dm = 0.0;
    detail::squared_distances(x, x2, de, dm);
    return dm;
}

/// lambda * D_M + (1 - lambda) * D_E.
template <class A, class B>
double dist_elastic_net(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2, double lambda) {
    detail::check_same_dim(x, x2);
    detail::check_lambda(lambda);
    double de = 0.0;
    double dm = 0.0;
    detail::squared_distances(x, x2, de, dm);
    return lambda * dm + (1.0 - lambda) * de;
}

/// Lower iff sum_j (x_j - x2_j) < 0. Ties go to Upper. At p = 1 this is x < x2.
template <class A, class B>
Branch branch_predicate(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    detail::check_same_dim(x, x2);
    return detail::branch_unchecked(x, x2);
}

template <class A, class B>
double eval_aen_rbf(const KernelSpec& spec, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    if (spec.kind != KernelKind::AenRbf) throw ParamError("eval_aen_rbf called with a non AEN-RBF spec");
    spec.validate();
    detail::check_same_dim(x, x2);
    return detail::kernel_unchecked(spec, x, x2);
}

template <class A, class B>
double eval_rbf(const KernelSpec& spec, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    if (spec.kind != KernelKind::Rbf) throw ParamError("eval_rbf called with a non RBF spec");
    spec.validate();
    detail::check_same_dim(x, x2);
    return detail::kernel_unchecked(spec, x, x2);
}

/// Matern 5/2, Linear and Polynomial.
template <class A, class B>
double eval_baseline(const KernelSpec& spec, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    if (spec.kind != KernelKind::Matern52 && spec.kind != KernelKind::Linear &&
        spec.kind != KernelKind::Polynomial)
        throw ParamError("eval_baseline expects a Matern52, Linear or Polynomial spec");
    spec.validate();
    detail::check_same_dim(x, x2);
    return detail::kernel_unchecked(spec, x, x2);
}

/// Any kind.
template <class A, class B>
double eval_kernel(const KernelSpec& spec, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
    spec.validate();
    detail::check_same_dim(x, x2);
    return detail::kernel_unchecked(spec, x, x2);
}

/// Unit-amplitude form used as an SVM kernel trick; sigma_sq is a free width.
template <class A, class B>
double eval_aen_rbf_svm(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2, double sigma_sq,
                        double lambda, double alpha) {
    if (!(sigma_sq > 0.0)) throw ParamError("sigma^2 must be positive");
    detail::check_lambda(lambda);
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParamError("alpha must lie in [0, 1]");
    detail::check_same_dim(x, x2);
    return detail::asymmetric_elastic_exp(x, x2, sigma_sq, lambda, alpha);
}

/// Activation of a hidden unit with the given center and width.
template <class A, class B>
double eval_aen_rbf_activation(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& center,
                               double width_sq, double lambda, double alpha) {
    return eval_aen_rbf_svm(x, center, width_sq, lambda, alpha);
}

namespace detail {

inline void check_point_sets(const PointSet& X, const PointSet& X2) {
    if (X.cols() != X2.cols())
        throw DimensionError("point sets have different dimensions: " + std::to_string(X.cols()) + " vs " +
                             std::to_string(X2.cols()));
    if (X.cols() == 0) throw DimensionError("points must have at least one coordinate");
}

} // namespace detail

/// K(i, j) = k(X.row(i), X2.row(j)).
inline GramResult gram(const KernelSpec& spec, const PointSet& X, const PointSet& X2) {
    spec.validate();
    detail::check_point_sets(X, X2);
    const bool same_points = X.rows() == X2.rows() && X == X2;
    const bool symmetric = same_points && (spec.kind != KernelKind::AenRbf || spec.alpha == 0.5);

    GramResult out;
    out.symmetric = symmetric;
    out.matrix.resize(X.rows(), X2.rows());
    if (symmetric) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            for (Eigen::Index j = i; j < X.rows(); ++j) {
                const double v = detail::kernel_unchecked(spec, X.row(i), X.row(j));
                out.matrix(i, j) = v;
                out.matrix(j, i) = v;
            }
        }
    } else {
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (Eigen::Index j = 0; j < X2.rows(); ++j)
                out.matrix(i, j) = detail::kernel_unchecked(spec, X.row(i), X2.row(j));
    }
    return out;
}

inline GramResult gram(const KernelSpec& spec, const PointSet& X) { return gram(spec, X, X); }

/// dK/dtheta for each hyperparameter in kernel_hypers(spec.kind). The AEN-RBF
/// branch does not depend on theta, so each entry is differentiated within its
/// active branch.
inline std::vector<Eigen::MatrixXd> gram_grad(const KernelSpec& spec, const PointSet& X) {
    spec.validate();
    detail::check_point_sets(X, X);
    const Eigen::Index n = X.rows();
    const auto hypers = kernel_hypers(spec.kind);
    std::vector<Eigen::MatrixXd> grads(hypers.size(), Eigen::MatrixXd::Zero(n, n));
    const double l = spec.lengthscale;
    const double l2 = l * l;

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto xi = X.row(i);
            const auto xj = X.row(j);
            const double k = detail::kernel_unchecked(spec, xi, xj);
            grads[0](i, j) = k / spec.variance;
            switch (spec.kind) {
            case KernelKind::AenRbf: {
                double de = 0.0;
                double dm = 0.0;
                detail::squared_distances(xi, xj, de, dm);
                const double d = spec.lambda * dm + (1.0 - spec.lambda) * de;
                const Branch b = detail::branch_unchecked(xi, xj);
                const double c = detail::branch_coefficient(b, spec.alpha);
                grads[1](i, j) = k * 2.0 * c * d / (l2 * l);
                grads[2](i, j) = -k * c * (dm - de) / l2;
                // dc/dalpha is -1 on the lower branch and +1 on the upper one.
                grads[3](i, j) = (b == Branch::Lower ? 1.0 : -1.0) * k * d / l2;
                break;
            }
            case KernelKind::Rbf: {
                double de = 0.0;
                double dm = 0.0;
                detail::squared_distances(xi, xj, de, dm);
                grads[1](i, j) = k * de / (l2 * l);
                break;
            }
            case KernelKind::Matern52: {
                double de = 0.0;
                double dm = 0.0;
                detail::squared_distances(xi, xj, de, dm);
                const double s = std::sqrt(5.0 * de) / l;
                grads[1](i, j) = spec.variance * s * s * (1.0 + s) * std::exp(-s) / (3.0 * l);
                break;
            }
            case KernelKind::Linear:
            case KernelKind::Polynomial: break;
            }
        }
    }
    return grads;
}

} // namespace aenbo

#endif // AENBO_KERNELS_HPP
