#ifndef AENBO_GP_HPP
#define AENBO_GP_HPP
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "aenbo/errors.hpp"
#include "aenbo/kernels.hpp"

namespace aenbo {

inline constexpr double kNoiseFloor = 1e-10;
/// Diagonal jitter levels tried in order by factorize().
inline constexpr std::array<double, 8> kJitterLadder = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4};

struct Dataset {
    PointSet X;
    Eigen::VectorXd y;

    [[nodiscard]] Eigen::Index size() const { return X.rows(); }
    [[nodiscard]] Eigen::Index dim() const { return X.cols(); }

    void validate() const {
        if (X.rows() < 1) throw DimensionError("dataset needs at least one observation");
        if (X.cols() < 1) throw DimensionError("dataset points need at least one coordinate");
        if (y.size() != X.rows())
            throw DimensionError("dataset has " + std::to_string(X.rows()) + " inputs but " +
                                 std::to_string(y.size()) + " outputs");
        if (!X.allFinite() || !y.allFinite()) throw ParamError("dataset contains non-finite values");
    }
};

/// How query-to-training covariances are formed for asymmetric kernels.
/// Symmetrized uses (k(x_q, x_i) + k(x_i, x_q)) / 2, matching the training
/// block, so the posterior is that of a proper GP. Raw uses k(x_q, x_i) as is;
/// it neither interpolates the data nor keeps variances nonnegative.
enum class CrossCovariance { Symmetrized, Raw };

struct GpModel {
    KernelSpec kernel;
    double mean_const = 0.0;
    double noise = 1e-6;
    CrossCovariance cross = CrossCovariance::Symmetrized;

    [[nodiscard]] double effective_noise() const { return std::max(noise, kNoiseFloor); }

    [[nodiscard]] double get(Hyper h) const { return h == Hyper::Noise ? noise : kernel.get(h); }
    void set(Hyper h, double v) {
        if (h == Hyper::Noise)
            noise = v;
        else
            kernel.set(h, v);
    }

    /// Kernel hyperparameters followed by the noise variance.
    [[nodiscard]] std::vector<Hyper> hypers() const {
        auto hs = kernel_hypers(kernel.kind);
        hs.push_back(Hyper::Noise);
        return hs;
    }

    friend bool operator==(const GpModel&, const GpModel&) = default;
};

struct Posterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Cholesky factor of K_sym + (noise + jitter) I.
class Factorization {
public:
    Factorization(Eigen::MatrixXd covariance, Eigen::LLT<Eigen::MatrixXd> llt, double jitter)
        : covariance_(std::move(covariance)), llt_(std::move(llt)), jitter_(jitter) {}

    [[nodiscard]] Eigen::Index size() const { return covariance_.rows(); }
    [[nodiscard]] double jitter() const { return jitter_; }
    /// The matrix that was factorized, jitter included.
    [[nodiscard]] const Eigen::MatrixXd& covariance() const { return covariance_; }
    [[nodiscard]] Eigen::MatrixXd lower() const { return llt_.matrixL(); }
    [[nodiscard]] Eigen::MatrixXd reconstruct() const { return llt_.reconstructedMatrix(); }

    template <class Rhs>
    [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixBase<Rhs>& b) const {
        return llt_.solve(b);
    }

    [[nodiscard]] Eigen::VectorXd solve_vec(const Eigen::VectorXd& b) const { return llt_.solve(b); }

    /// L^{-1} b.
    template <class Rhs>
    [[nodiscard]] Eigen::MatrixXd half_solve(const Eigen::MatrixBase<Rhs>& b) const {
        return llt_.matrixL().solve(b);
    }

    [[nodiscard]] double log_det() const {
        const auto& lu = llt_.matrixLLT();
        double s = 0.0;
        for (Eigen::Index i = 0; i < lu.rows(); ++i) s += std::log(lu(i, i));
        return 2.0 * s;
    }

private:
    Eigen::MatrixXd covariance_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double jitter_;
};

/// Cholesky with the jitter ladder applied to an already symmetric matrix.
inline Factorization factorize_symmetric(const Eigen::MatrixXd& a) {
    if (!a.allFinite()) throw FactorizationError("covariance matrix has non-finite entries", std::nan(""));
    const Eigen::Index n = a.rows();
    for (double tau : kJitterLadder) {
        Eigen::MatrixXd m = a;
        if (tau > 0.0) m.diagonal().array() += tau;
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() == Eigen::Success) return Factorization(std::move(m), std::move(llt), tau);
    }
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
    std::ostringstream msg;
    msg << "covariance of size " << n << " is not positive definite with jitter up to "
        << kJitterLadder.back() << " (min eigenvalue " << min_eig << ")";
    throw FactorizationError(msg.str(), min_eig);
}

inline bool needs_symmetrization(const KernelSpec& kernel) {
    return kernel.kind == KernelKind::AenRbf && kernel.alpha != 0.5;
}

/// Prior covariance of the training points. AEN-RBF Gram matrices with
/// alpha != 0.5 are replaced by (K + K^T) / 2.
inline Eigen::MatrixXd training_covariance(const KernelSpec& kernel, const PointSet& X) {
    if (!needs_symmetrization(kernel)) return gram(kernel, X).matrix;
    kernel.validate();
    detail::check_point_sets(X, X);
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double v = detail::symmetrized_aen_unchecked(kernel, X.row(i), X.row(j));
            k(i, j) = v;
            k(j, i) = v;
        }
    return k;
}

/// Cap on the negative curvature a kernel matrix may have, relative to the
/// signal variance.
inline constexpr double kIndefiniteTolerance = 1e-4;

/// Floor on the eigenvalues of K + noise I, relative to the signal variance,
/// for kernels that may be indefinite.
inline constexpr double kConditionFloor = 1e-4;

namespace detail {

inline bool may_be_indefinite(const KernelSpec& kernel, const PointSet& X) {
    return kernel.kind == KernelKind::AenRbf && kernel.lambda != 0.0 && X.cols() >= 2 && X.rows() >= 2;
}

// K + s I must be positive definite with s = min(noise / 2, noise - floor * variance,
// tol * variance). Every eigenvalue of K + noise I then exceeds both noise / 2
// and floor * variance, and K itself has no eigenvalue below -tol * variance.
inline bool admissible_covariance(const Eigen::MatrixXd& k, double variance, double noise) {
    Eigen::MatrixXd m = k;
    m.diagonal().array() += std::min({0.5 * noise, noise - kConditionFloor * variance, kIndefiniteTolerance * variance});
    return m.allFinite() && Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success;
}

} // namespace detail

/// Whether the symmetrized kernel matrix K of `model` is nearly positive
/// semidefinite and K + noise I stays well conditioned: every eigenvalue of
/// K + noise I must exceed max(noise / 2, kConditionFloor * variance) and no eigenvalue
/// of K may fall below -1e-4 * variance. Only AEN-RBF with lambda > 0 in two or
/// more dimensions can fail. Without this the noise term can cancel negative
/// eigenvalues and leave a near-singular covariance whose predictions blow up.
inline bool admissible_kernel_matrix(const GpModel& model, const PointSet& X) {
    if (!detail::may_be_indefinite(model.kernel, X)) return true;
    return detail::admissible_covariance(training_covariance(model.kernel, X), model.kernel.variance,
                                         model.effective_noise());
}

/// Lenient factorization walks the jitter ladder. Strict factorization, used
/// while searching hyperparameters, rejects an inadmissible kernel matrix
/// (see admissible_kernel_matrix) and allows no jitter, so neither the noise
/// term nor hidden jitter can mask an indefinite or singular covariance.
enum class Strictness { Lenient, Strict };

inline Factorization factorize(const GpModel& model, const PointSet& X, Strictness mode = Strictness::Lenient) {
    if (X.rows() < 1) throw DimensionError("cannot factorize an empty point set");
    Eigen::MatrixXd k = training_covariance(model.kernel, X);
    if (mode == Strictness::Lenient) {
        k.diagonal().array() += model.effective_noise();
        return factorize_symmetric(k);
    }
    if (detail::may_be_indefinite(model.kernel, X) && !detail::admissible_covariance(k, model.kernel.variance, model.effective_noise()))
        throw FactorizationError("kernel matrix is too indefinite for its noise level", std::nan(""));
    k.diagonal().array() += model.effective_noise();
    if (!k.allFinite()) throw FactorizationError("covariance matrix has non-finite entries", std::nan(""));
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success)
        throw FactorizationError("covariance is not positive definite without jitter", std::nan(""));
    return Factorization(std::move(k), std::move(llt), 0.0);
}

struct LmlResult {
    double value = 0.0;
    /// Gradient over model.hypers(), i.e. kernel hyperparameters then noise.
    Eigen::VectorXd gradient;
    std::vector<Hyper> hypers;
};

namespace detail {

inline double lml_from_factor(const Factorization& f, const Eigen::VectorXd& resid, Eigen::VectorXd& weights) {
    weights = f.solve_vec(resid);
    const double n = static_cast<double>(resid.size());
    return -0.5 * resid.dot(weights) - 0.5 * f.log_det() - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

} // namespace detail

inline double log_marginal_likelihood(const GpModel& model, const Dataset& data, Strictness mode = Strictness::Lenient) {
    data.validate();
    const Factorization f = factorize(model, data.X, mode);
    const Eigen::VectorXd resid = data.y.array() - model.mean_const;
    Eigen::VectorXd w;
    return detail::lml_from_factor(f, resid, w);
}

/// Log marginal likelihood and its gradient from one factorization:
/// d/dtheta = 1/2 tr[(a a^T - A^{-1}) dA/dtheta] with a = A^{-1}(y - m).
inline LmlResult lml_and_gradient(const GpModel& model, const Dataset& data, Strictness mode = Strictness::Lenient) {
    data.validate();
    const Factorization f = factorize(model, data.X, mode);
    const Eigen::VectorXd resid = data.y.array() - model.mean_const;
    LmlResult out;
    Eigen::VectorXd a;
    out.value = detail::lml_from_factor(f, resid, a);
    out.hypers = model.hypers();

    const Eigen::Index n = data.size();
    Eigen::MatrixXd w = -f.solve(Eigen::MatrixXd::Identity(n, n));
    w.noalias() += a * a.transpose();
    // W is symmetric, so tr(W dK_sym) = tr(W dK) and the raw slices suffice.
    const auto slices = gram_grad(model.kernel, data.X);
    out.gradient.resize(static_cast<Eigen::Index>(out.hypers.size()));
    for (std::size_t h = 0; h < slices.size(); ++h)
        out.gradient(static_cast<Eigen::Index>(h)) = 0.5 * w.cwiseProduct(slices[h]).sum();
    // Below the floor the noise no longer moves the likelihood.
    out.gradient(out.gradient.size() - 1) = model.noise >= kNoiseFloor ? 0.5 * w.trace() : 0.0;
    return out;
}

inline Eigen::VectorXd lml_gradient(const GpModel& model, const Dataset& data) {
    return lml_and_gradient(model, data).gradient;
}

/// A model conditioned on data: the factorization and the weight vector
/// (K_sym + noise I)^{-1} (y - m) are computed once and shared by every query.
class ConditionedGp {
public:
    ConditionedGp(GpModel model, Dataset data)
        : model_(std::move(model)), data_(std::move(data)), factor_((data_.validate(), factorize(model_, data_.X))) {
        weights_ = factor_.solve_vec((data_.y.array() - model_.mean_const).matrix());
    }

    [[nodiscard]] const GpModel& model() const { return model_; }
    [[nodiscard]] const Dataset& data() const { return data_; }
    [[nodiscard]] const Factorization& factor() const { return factor_; }

    /// Predictive mean and standard deviation of f at one point.
    template <class A>
    [[nodiscard]] std::pair<double, double> predict_point(const Eigen::MatrixBase<A>& xq) const {
        if (xq.size() != data_.dim()) throw DimensionError("query point has wrong dimension");
        const Eigen::Index n = data_.size();
        Eigen::VectorXd kstar(n);
        const bool sym = symmetric_cross();
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto xi = data_.X.row(i);
            kstar(i) = sym ? detail::symmetrized_aen_unchecked(model_.kernel, xq, xi)
                           : detail::kernel_unchecked(model_.kernel, xq, xi);
        }
        const double mean = model_.mean_const + kstar.dot(weights_);
        const Eigen::VectorXd v = factor_.half_solve(kstar);
        const double var = detail::kernel_unchecked(model_.kernel, xq, xq) - v.squaredNorm();
        return {mean, std::sqrt(std::max(var, 0.0))};
    }

    /// Full posterior at a set of query points.
    [[nodiscard]] Posterior predict(const PointSet& xq) const {
        if (xq.cols() != data_.dim())
            throw DimensionError("query points have dimension " + std::to_string(xq.cols()) + ", data has " +
                                 std::to_string(data_.dim()));
        Eigen::MatrixXd kqx = gram(model_.kernel, xq, data_.X).matrix;
        if (symmetric_cross()) kqx = (0.5 * (kqx + gram(model_.kernel, data_.X, xq).matrix.transpose())).eval();
        Posterior post;
        post.mean = (kqx * weights_).array() + model_.mean_const;
        const Eigen::MatrixXd v = factor_.half_solve(kqx.transpose());
        post.cov = training_covariance(model_.kernel, xq);
        post.cov.noalias() -= v.transpose() * v;
        post.cov = (0.5 * (post.cov + post.cov.transpose())).eval();
        for (Eigen::Index i = 0; i < post.cov.rows(); ++i)
            if (post.cov(i, i) < 0.0) post.cov(i, i) = 0.0;
        return post;
    }

private:
    [[nodiscard]] bool symmetric_cross() const {
        return model_.cross == CrossCovariance::Symmetrized && needs_symmetrization(model_.kernel);
    }

    GpModel model_;
    Dataset data_;
    Factorization factor_;
    Eigen::VectorXd weights_;
};

inline Posterior posterior_predict(const GpModel& model, const Dataset& data, const PointSet& xq) {
    return ConditionedGp(model, data).predict(xq);
}

} // namespace aenbo

#endif // AENBO_GP_HPP
