#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "aenbo/hyperopt.hpp"

using namespace aenbo;

namespace {

// Draws y from a zero-mean RBF GP at n uniform inputs in [0, 1].
Dataset sample_rbf_gp(int n, double lengthscale, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g;
    Dataset d;
    d.X.resize(n, 1);
    for (int i = 0; i < n; ++i) d.X(i, 0) = u(rng);
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double r = d.X(i, 0) - d.X(j, 0);
            K(i, j) = std::exp(-0.5 * r * r / (lengthscale * lengthscale));
        }
    K.diagonal().array() += noise;
    const Eigen::MatrixXd L = K.llt().matrixL();
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = g(rng);
    d.y = L * z;
    return d;
}

Dataset smooth_2d(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dataset d;
    d.X.resize(n, 2);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        d.X(i, 0) = u(rng);
        d.X(i, 1) = u(rng);
        d.y(i) = std::sin(4 * d.X(i, 0)) * std::cos(3 * d.X(i, 1));
    }
    return d;
}

} // namespace

TEST(Transform, LambdaMidpointMapsToZero) {
    GpModel m{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 1e-3};
    m.kernel.lambda = 0.5;
    const ParamBox box;
    const Eigen::VectorXd v = to_unconstrained(m, box);
    // Order: variance, lengthscale, lambda, alpha, noise.
    EXPECT_NEAR(v(2), 0.0, 1e-12);
    EXPECT_NEAR(v(3), 0.0, 1e-12);
}

TEST(Transform, RoundTrip) {
    const ParamBox box;
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        const GpModel m = random_start(GpModel{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 1e-3}, box, rng());
        const GpModel back = from_unconstrained(to_unconstrained(m, box), box, m);
        EXPECT_LE(std::abs(back.kernel.lambda - m.kernel.lambda), 1e-12);
        EXPECT_LE(std::abs(back.kernel.alpha - m.kernel.alpha), 1e-12);
        // Log-scale parameters span twelve decades; compare relatively.
        EXPECT_LE(std::abs(back.kernel.variance / m.kernel.variance - 1.0), 1e-12);
        EXPECT_LE(std::abs(back.kernel.lengthscale / m.kernel.lengthscale - 1.0), 1e-12);
        EXPECT_LE(std::abs(back.noise / m.noise - 1.0), 1e-12);
    }
}

TEST(Transform, RoundTripAbsoluteForUnitScaleValues) {
    ParamBox box;
    GpModel m{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 0.01};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        m.kernel.variance = 0.1 + u(rng);
        m.kernel.lengthscale = 0.1 + u(rng);
        m.kernel.lambda = 0.1 + 0.8 * u(rng);
        m.kernel.alpha = 0.25 + 0.5 * u(rng);
        m.noise = 0.01 * u(rng) + 1e-6;
        const GpModel back = from_unconstrained(to_unconstrained(m, box), box, m);
        for (Hyper h : m.hypers()) EXPECT_LE(std::abs(back.get(h) - m.get(h)), 1e-12) << to_string(h);
    }
}

TEST(Transform, AlphaSaturatesAtLowerBound) {
    const ParamBox box;
    GpModel m{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 1e-3};
    Eigen::VectorXd v = to_unconstrained(m, box);
    v(3) = -40.0;
    EXPECT_NEAR(from_unconstrained(v, box, m).kernel.alpha, 0.25, 1e-6);
}

TEST(Transform, OutOfBoxValuesThrow) {
    const ParamBox box;
    GpModel m{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 1e-3};
    m.kernel.lambda = 0.95;
    EXPECT_THROW(to_unconstrained(m, box), ParamError);
    m.kernel.lambda = 0.5;
    m.kernel.variance = 1e7;
    EXPECT_THROW(to_unconstrained(m, box), ParamError);
}

TEST(Transform, BoundaryValuesAreInsetNotRejected) {
    const ParamBox box;
    GpModel m{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 1e-3};
    m.kernel.alpha = 0.75;
    const Eigen::VectorXd v = to_unconstrained(m, box);
    EXPECT_TRUE(std::isfinite(v(3)));
    EXPECT_NEAR(from_unconstrained(v, box, m).kernel.alpha, 0.75, 1e-8);
}

TEST(Transform, PinnedParametersLeaveTheSearchVector) {
    ParamBox box;
    box.fixed_lambda = 0.0;
    box.fixed_alpha = 0.5;
    EXPECT_EQ(free_hypers(KernelKind::AenRbf, box), (std::vector<Hyper>{Hyper::Variance, Hyper::Lengthscale, Hyper::Noise}));
    GpModel m{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 1e-3};
    const GpModel back = from_unconstrained(to_unconstrained(m, box), box, m);
    EXPECT_EQ(back.kernel.lambda, 0.0);
    EXPECT_EQ(back.kernel.alpha, 0.5);
}

TEST(FitMle, RecoversLengthscaleOfGenerativeGp) {
    const double truth = 0.2;
    int hits = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Dataset d = sample_rbf_gp(30, truth, 1e-2, 100 + s);
        const FitReport fit = fit_mle(GpModel{KernelSpec::defaults(KernelKind::Rbf), 0.0, 0.1}, d, 5, s);
        const double l = fit.model.kernel.lengthscale;
        if (l >= truth / 2 && l <= truth * 2) ++hits;
    }
    EXPECT_GE(hits, 16);
}

TEST(FitMle, NeverWorseThanTheStart) {
    for (KernelKind kind : {KernelKind::Rbf, KernelKind::AenRbf, KernelKind::Matern52}) {
        const Dataset d = smooth_2d(15, 3);
        GpModel init{KernelSpec::defaults(kind), 0.0, 0.01};
        init.kernel.lengthscale = 0.2;
        if (kind == KernelKind::AenRbf) init.kernel.lambda = 0.1;
        const double lml0 = log_marginal_likelihood(init, d, Strictness::Strict);
        const FitReport fit = fit_mle(init, d, 3, 4);
        EXPECT_GE(fit.lml, lml0 - 1e-9) << to_string(kind);
        EXPECT_TRUE(within_box(fit.model, ParamBox{}));
        EXPECT_TRUE(std::isfinite(fit.lml));
        EXPECT_NEAR(fit.lml, log_marginal_likelihood(fit.model, d, Strictness::Strict), 1e-9);
    }
}

TEST(FitMle, Deterministic) {
    const Dataset d = smooth_2d(12, 5);
    const GpModel init{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 0.01};
    EXPECT_EQ(fit_mle(init, d, 4, 6), fit_mle(init, d, 4, 6));
}

TEST(FitMle, StationaryAtTheOptimum) {
    const Dataset d = sample_rbf_gp(25, 0.3, 1e-2, 7);
    FitOptions opt;
    opt.lbfgs.f_tol = 0.0;
    opt.lbfgs.step_tol = 0.0;
    const FitReport fit = fit_mle(GpModel{KernelSpec::defaults(KernelKind::Rbf), 0.0, 0.1}, d, 3, 8, opt);
    EXPECT_LE(fit.gradient_norm, 1e-4 * (1.0 + std::abs(fit.lml)));
    EXPECT_TRUE(fit.converged);
}

TEST(FitMle, RespectsPins) {
    const Dataset d = smooth_2d(12, 9);
    FitOptions opt;
    opt.box.fixed_lambda = 0.0;
    opt.box.fixed_alpha = 0.5;
    const FitReport fit = fit_mle(GpModel{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 0.01}, d, 3, 10, opt);
    EXPECT_EQ(fit.model.kernel.lambda, 0.0);
    EXPECT_EQ(fit.model.kernel.alpha, 0.5);
}

TEST(FitMle, StrictModeKeepsTheKernelMatrixAdmissible) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Dataset d = smooth_2d(20, 20 + s);
        const FitReport fit = fit_mle(GpModel{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 0.01}, d, 3, s);
        EXPECT_TRUE(admissible_kernel_matrix(fit.model, d.X));
    }
}

TEST(FitMle, RepairMovesInfeasibleStartIntoFeasibleSet) {
    const Dataset d = smooth_2d(20, 30);
    GpModel start{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 1e-8};
    start.kernel.lambda = 0.9;
    start.kernel.lengthscale = 2.0;
    ASSERT_FALSE(admissible_kernel_matrix(start, d.X));
    const ParamBox box;
    ASSERT_TRUE(repair_start(start, d, box));
    EXPECT_NO_THROW((void)factorize(start, d.X, Strictness::Strict));
    EXPECT_TRUE(within_box(start, box));
}

TEST(FitMle, RejectsBadArguments) {
    const Dataset d = smooth_2d(5, 40);
    EXPECT_THROW(fit_mle(GpModel{}, d, 0, 0), ParamError);
    Dataset bad = d;
    bad.y(0) = std::nan("");
    EXPECT_THROW(fit_mle(GpModel{}, bad, 1, 0), ParamError);
}
