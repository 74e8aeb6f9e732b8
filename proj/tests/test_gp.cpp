#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "aenbo/gp.hpp"

using namespace aenbo;

namespace {

PointSet random_points(int n, int p, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    PointSet X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = u(rng);
    return X;
}

Dataset make_data(int n, int p, std::uint64_t seed) {
    Dataset d;
    d.X = random_points(n, p, seed);
    d.y.resize(n);
    std::mt19937_64 rng(seed + 1000);
    std::normal_distribution<double> g(0.0, 0.1);
    for (int i = 0; i < n; ++i) d.y(i) = std::sin(3.0 * d.X(i, 0)) + (p > 1 ? d.X(i, 1) * d.X(i, 1) : 0.0) + g(rng);
    return d;
}

GpModel model_of(KernelKind kind, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GpModel m;
    m.kernel = KernelSpec::defaults(kind);
    m.kernel.variance = 0.5 + u(rng);
    m.kernel.lengthscale = 0.3 + 0.7 * u(rng);
    if (kind == KernelKind::AenRbf) {
        m.kernel.lambda = 0.1 + 0.8 * u(rng);
        m.kernel.alpha = 0.25 + 0.5 * u(rng);
    }
    m.mean_const = u(rng) - 0.5;
    m.noise = 0.05 + 0.2 * u(rng);
    return m;
}

// Halves lambda until the kernel matrix on X is admissible, the region MLE searches.
GpModel admissible_model(KernelKind kind, std::uint64_t seed, const PointSet& X) {
    GpModel m = model_of(kind, seed);
    while (!admissible_kernel_matrix(m, X)) m.kernel.lambda *= 0.5;
    return m;
}

// Symmetrized pairwise covariance built from single kernel evaluations.
double sym_k(const KernelSpec& k, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 0.5 * (eval_kernel(k, a, b) + eval_kernel(k, b, a));
}

Eigen::MatrixXd naive_cov(const KernelSpec& k, const PointSet& A, const PointSet& B) {
    Eigen::MatrixXd out(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < B.rows(); ++j) out(i, j) = sym_k(k, A.row(i).transpose(), B.row(j).transpose());
    return out;
}

double naive_lml(const GpModel& m, const Dataset& d) {
    Eigen::MatrixXd A = naive_cov(m.kernel, d.X, d.X);
    A.diagonal().array() += m.noise;
    const Eigen::VectorXd r = d.y.array() - m.mean_const;
    const double n = static_cast<double>(d.size());
    return -0.5 * r.dot(A.inverse() * r) - 0.5 * std::log(A.determinant()) - 0.5 * n * std::log(2 * std::numbers::pi);
}

} // namespace

TEST(Factorize, SinglePoint) {
    GpModel m{KernelSpec::defaults(KernelKind::Rbf), 0.0, 0.01};
    PointSet X(1, 2);
    X << 0.3, 0.7;
    const Factorization f = factorize(m, X);
    EXPECT_NEAR(f.covariance()(0, 0), 1.01, 1e-15);
    EXPECT_NEAR(f.lower()(0, 0), std::sqrt(1.01), 1e-15);
    EXPECT_EQ(f.jitter(), 0.0);
}

TEST(Factorize, DuplicatePointsNeedAtMostSmallJitter) {
    GpModel m{KernelSpec::defaults(KernelKind::Rbf), 0.0, 0.0};
    PointSet X(3, 1);
    X << 0.5, 0.5, 0.5;
    const Factorization f = factorize(m, X);
    EXPECT_LE(f.jitter(), 1e-8);
}

TEST(Factorize, AsymmetricKernelReconstructsSymmetrizedMatrix) {
    GpModel m{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 1e-2};
    m.kernel.alpha = 0.6;
    m.kernel.lambda = 0.3;
    m.kernel.lengthscale = 0.4;
    const PointSet X = random_points(10, 2, 1);
    const Factorization f = factorize(m, X);
    Eigen::MatrixXd oracle = naive_cov(m.kernel, X, X);
    oracle.diagonal().array() += m.noise + f.jitter();
    EXPECT_LE((f.reconstruct() - oracle).norm() / oracle.norm(), 1e-10);
    EXPECT_LE((f.covariance() - oracle).norm() / oracle.norm(), 1e-14);
}

TEST(Factorize, GivesUpPastJitterCap) {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 2.0, 2.0, 1.0;
    try {
        (void)factorize_symmetric(a);
        FAIL() << "expected FactorizationError";
    } catch (const FactorizationError& e) {
        EXPECT_NEAR(e.min_eigenvalue(), -1.0, 1e-12);
    }
}

TEST(Factorize, StrictModeRefusesIndefiniteKernelMatrix) {
    GpModel m{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 1e-6};
    m.kernel.lambda = 0.9;
    m.kernel.lengthscale = 1.0;
    const PointSet X = random_points(20, 2, 2);
    EXPECT_FALSE(admissible_kernel_matrix(m, X));
    EXPECT_THROW((void)factorize(m, X, Strictness::Strict), FactorizationError);
    m.kernel.lambda = 0.0;
    EXPECT_TRUE(admissible_kernel_matrix(m, X));
}

TEST(Factorize, AdmissibilityFollowsTheEigenvalueBounds) {
    GpModel m{KernelSpec::defaults(KernelKind::AenRbf), 0.0, 0.0};
    m.kernel.lambda = 0.5;
    m.kernel.lengthscale = 0.5;
    m.kernel.variance = 2.0;
    const PointSet X = random_points(25, 2, 3);
    const auto min_eig = [&] {
        return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(naive_cov(m.kernel, X, X)).eigenvalues().minCoeff();
    };
    while (min_eig() < -0.25 * kIndefiniteTolerance * m.kernel.variance) m.kernel.lambda *= 0.5;
    const double lo = min_eig();
    ASSERT_LT(lo, -1e-9);
    ASSERT_GT(lo, -kIndefiniteTolerance * m.kernel.variance);
    // Eigenvalues of K + noise I must clear max(noise / 2, floor * variance).
    const double floor = kConditionFloor * m.kernel.variance;
    m.noise = -lo + 0.9 * floor;
    EXPECT_FALSE(admissible_kernel_matrix(m, X));
    m.noise = -2.2 * lo + 2.0 * floor;
    EXPECT_TRUE(admissible_kernel_matrix(m, X));
    m.noise = -1.8 * lo;
    EXPECT_FALSE(admissible_kernel_matrix(m, X));
}

TEST(Factorize, ReconstructionErrorSmallForEveryKind) {
    for (KernelKind kind : {KernelKind::AenRbf, KernelKind::Rbf, KernelKind::Matern52, KernelKind::Linear,
                            KernelKind::Polynomial}) {
        const GpModel m = model_of(kind, 3);
        const PointSet X = random_points(15, 2, 4);
        const Factorization f = factorize(m, X);
        EXPECT_LE((f.reconstruct() - f.covariance()).norm() / f.covariance().norm(), 1e-10) << to_string(kind);
    }
}

TEST(Lml, OnePointAtTheMean) {
    GpModel m{KernelSpec::defaults(KernelKind::Rbf), 0.0, 0.3};
    m.kernel.variance = 0.7;
    Dataset d{PointSet::Constant(1, 1, 0.2), Eigen::VectorXd::Zero(1)};
    EXPECT_NEAR(log_marginal_likelihood(m, d), -0.5 * std::log(2 * std::numbers::pi * 1.0), 1e-12);
}

TEST(Lml, StandardNormalAtOne) {
    GpModel m{KernelSpec::defaults(KernelKind::Rbf), 0.0, 1e-10};
    m.kernel.variance = 1.0 - 1e-10;
    Dataset d{PointSet::Constant(1, 1, 0.2), Eigen::VectorXd::Ones(1)};
    EXPECT_NEAR(log_marginal_likelihood(m, d), -1.4189385332, 1e-9);
}

TEST(Lml, MatchesDenseInverse) {
    for (KernelKind kind : {KernelKind::AenRbf, KernelKind::Rbf, KernelKind::Matern52}) {
        for (std::uint64_t s = 0; s < 5; ++s) {
            const GpModel m = model_of(kind, 10 + s);
            const Dataset d = make_data(3, 2, 20 + s);
            EXPECT_NEAR(log_marginal_likelihood(m, d), naive_lml(m, d), 1e-10) << to_string(kind);
        }
    }
}

TEST(Lml, PermutationInvariant) {
    const GpModel m = model_of(KernelKind::AenRbf, 30);
    const Dataset d = make_data(12, 2, 31);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(12);
    perm.setIdentity();
    std::mt19937_64 rng(32);
    std::shuffle(perm.indices().data(), perm.indices().data() + 12, rng);
    const Dataset p{perm * d.X, perm * d.y};
    EXPECT_NEAR(log_marginal_likelihood(m, d), log_marginal_likelihood(m, p), 1e-10);
}

class LmlGradientTest : public ::testing::TestWithParam<KernelKind> {};

TEST_P(LmlGradientTest, MatchesCentralDifferences) {
    const KernelKind kind = GetParam();
    const double h = 1e-6;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const int n = 5 + static_cast<int>(s % 20);
        const Dataset d = make_data(n, 1 + static_cast<int>(s % 3), 200 + s);
        const GpModel m = admissible_model(kind, 100 + s, d.X);
        const LmlResult g = lml_and_gradient(m, d);
        ASSERT_EQ(g.hypers, m.hypers());
        for (std::size_t i = 0; i < g.hypers.size(); ++i) {
            GpModel up = m;
            GpModel down = m;
            up.set(g.hypers[i], m.get(g.hypers[i]) + h);
            down.set(g.hypers[i], m.get(g.hypers[i]) - h);
            const double fd = (log_marginal_likelihood(up, d) - log_marginal_likelihood(down, d)) / (2 * h);
            const double an = g.gradient(static_cast<Eigen::Index>(i));
            EXPECT_LE(std::abs(an - fd), 1e-4 * std::max(1.0, std::abs(fd)))
                << to_string(kind) << " seed " << s << " " << to_string(g.hypers[i]) << ": " << an << " vs " << fd;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, LmlGradientTest,
                         ::testing::Values(KernelKind::AenRbf, KernelKind::Rbf, KernelKind::Matern52, KernelKind::Linear,
                                           KernelKind::Polynomial),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(LmlGradient, DoublingYAgainstFiniteDifferences) {
    const GpModel m = model_of(KernelKind::AenRbf, 40);
    Dataset d = make_data(10, 2, 41);
    d.y.array() -= m.mean_const;
    Dataset d2 = d;
    d2.y *= 2.0;
    GpModel m0 = m;
    m0.mean_const = 0.0;
    const LmlResult g1 = lml_and_gradient(m0, d);
    const LmlResult g2 = lml_and_gradient(m0, d2);
    const double h = 1e-6;
    for (std::size_t i = 0; i < g1.hypers.size(); ++i) {
        GpModel up = m0;
        GpModel down = m0;
        up.set(g1.hypers[i], m0.get(g1.hypers[i]) + h);
        down.set(g1.hypers[i], m0.get(g1.hypers[i]) - h);
        const auto fd = [&](const Dataset& dd) {
            return (log_marginal_likelihood(up, dd) - log_marginal_likelihood(down, dd)) / (2 * h);
        };
        // The complexity term is y-free, so the change is 3x the data-fit part.
        const double delta_fd = fd(d2) - fd(d);
        const double delta_an = g2.gradient(static_cast<Eigen::Index>(i)) - g1.gradient(static_cast<Eigen::Index>(i));
        EXPECT_LE(std::abs(delta_an - delta_fd), 1e-4 * std::max(1.0, std::abs(delta_fd)));
    }
}

TEST(Posterior, MatchesDenseInverseOneDimension) {
    const GpModel m = model_of(KernelKind::AenRbf, 50);
    const Dataset d = make_data(4, 1, 51);
    const PointSet q = random_points(6, 1, 52, -0.5, 1.5);
    const Posterior post = posterior_predict(m, d, q);
    Eigen::MatrixXd A = naive_cov(m.kernel, d.X, d.X);
    A.diagonal().array() += m.noise;
    const Eigen::MatrixXd Ainv = A.inverse();
    const Eigen::MatrixXd kq = naive_cov(m.kernel, q, d.X);
    const Eigen::VectorXd mean = (kq * Ainv * (d.y.array() - m.mean_const).matrix()).array() + m.mean_const;
    const Eigen::MatrixXd cov = naive_cov(m.kernel, q, q) - kq * Ainv * kq.transpose();
    EXPECT_LE((post.mean - mean).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((post.cov - cov).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Posterior, MatchesDenseInverseRandomProblems) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const KernelKind kind = s % 2 ? KernelKind::AenRbf : KernelKind::Rbf;
        const Dataset d = make_data(8 + static_cast<int>(s), 2, 80 + s);
        const GpModel m = admissible_model(kind, 60 + s, d.X);
        const PointSet q = random_points(5, 2, 90 + s);
        const Posterior post = posterior_predict(m, d, q);
        Eigen::MatrixXd A = naive_cov(m.kernel, d.X, d.X);
        A.diagonal().array() += m.noise;
        const Eigen::MatrixXd Ainv = A.inverse();
        const Eigen::MatrixXd kq = naive_cov(m.kernel, q, d.X);
        const Eigen::VectorXd mean = (kq * Ainv * (d.y.array() - m.mean_const).matrix()).array() + m.mean_const;
        const Eigen::MatrixXd cov = naive_cov(m.kernel, q, q) - kq * Ainv * kq.transpose();
        EXPECT_LE((post.mean - mean).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LE((post.cov - cov).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Posterior, NoiselessInterpolation) {
    for (KernelKind kind : {KernelKind::Rbf, KernelKind::AenRbf}) {
        GpModel m{KernelSpec::defaults(kind), 0.2, 0.0};
        m.kernel.lengthscale = 0.1;
        if (kind == KernelKind::AenRbf) m.kernel.alpha = 0.7;
        Dataset d = make_data(8, 1, 100);
        for (int i = 0; i < 8; ++i) d.X(i, 0) = i / 7.0;
        const Posterior post = posterior_predict(m, d, d.X);
        EXPECT_LE((post.mean - d.y).cwiseAbs().maxCoeff(), 1e-6) << to_string(kind);
        EXPECT_LE(post.cov.diagonal().maxCoeff(), 1e-6) << to_string(kind);
    }
}

TEST(Posterior, PriorRecoveryFarFromData) {
    GpModel m{KernelSpec::defaults(KernelKind::Rbf), 1.5, 0.01};
    m.kernel.variance = 2.0;
    m.kernel.lengthscale = 0.05;
    const Dataset d = make_data(10, 2, 110);
    const PointSet q = PointSet::Constant(1, 2, 50.0);
    const Posterior post = posterior_predict(m, d, q);
    EXPECT_NEAR(post.mean(0), 1.5, 1e-12);
    EXPECT_NEAR(post.cov(0, 0), 2.0, 1e-12);
}

TEST(Posterior, VarianceBelowPrior) {
    for (KernelKind kind : {KernelKind::Rbf, KernelKind::Matern52, KernelKind::AenRbf}) {
        const GpModel m = model_of(kind, 120);
        const Dataset d = make_data(15, 2, 121);
        const Posterior post = posterior_predict(m, d, random_points(30, 2, 122));
        EXPECT_LE(post.cov.diagonal().maxCoeff(), m.kernel.variance + 1e-8) << to_string(kind);
    }
}

TEST(Posterior, AddingAPointNeverIncreasesVariance) {
    GpModel m{KernelSpec::defaults(KernelKind::Rbf), 0.0, 0.0};
    m.kernel.lengthscale = 0.4;
    const Dataset d = make_data(6, 2, 130);
    Dataset more = d;
    more.X.conservativeResize(7, Eigen::NoChange);
    more.X.row(6) << 0.55, 0.45;
    more.y.conservativeResize(7);
    more.y(6) = 0.1;
    const PointSet q = random_points(40, 2, 131);
    const Eigen::VectorXd v0 = posterior_predict(m, d, q).cov.diagonal();
    const Eigen::VectorXd v1 = posterior_predict(m, more, q).cov.diagonal();
    EXPECT_LE((v1 - v0).maxCoeff(), 1e-8);
}

TEST(Posterior, HalfAlphaUnaffectedBySymmetrization) {
    GpModel m = model_of(KernelKind::AenRbf, 140);
    m.kernel.alpha = 0.5;
    const Dataset d = make_data(10, 2, 141);
    const PointSet q = random_points(5, 2, 142);
    GpModel raw = m;
    raw.cross = CrossCovariance::Raw;
    const Posterior a = posterior_predict(m, d, q);
    const Posterior b = posterior_predict(raw, d, q);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.cov, b.cov);
    EXPECT_EQ(training_covariance(m.kernel, d.X), gram(m.kernel, d.X).matrix);
}

TEST(Posterior, PointAndBatchPredictionsAgree) {
    const GpModel m = model_of(KernelKind::AenRbf, 150);
    const Dataset d = make_data(12, 2, 151);
    const ConditionedGp gp(m, d);
    const PointSet q = random_points(8, 2, 152);
    const Posterior post = gp.predict(q);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const auto [mu, sd] = gp.predict_point(q.row(i).transpose());
        EXPECT_NEAR(mu, post.mean(i), 1e-12);
        EXPECT_NEAR(sd, std::sqrt(std::max(post.cov(i, i), 0.0)), 1e-7);
    }
}

TEST(Posterior, DimensionMismatchThrows) {
    const GpModel m = model_of(KernelKind::Rbf, 160);
    const Dataset d = make_data(5, 2, 161);
    EXPECT_THROW(posterior_predict(m, d, random_points(2, 3, 162)), DimensionError);
    Dataset bad = d;
    bad.y.resize(4);
    EXPECT_THROW(log_marginal_likelihood(m, bad), DimensionError);
}
