#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

#include "aenbo/experiments.hpp"

using namespace aenbo;

namespace {

ExperimentConfig small(FunctionName f, int reps, int n, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.function = f;
    cfg.repetitions = reps;
    cfg.evaluations = n;
    cfg.seed = seed;
    cfg.bo.quiet = true;
    return cfg;
}

const KernelChoice kRbf{KernelKind::Rbf, {}, {}};
const KernelChoice kReducedAen{KernelKind::AenRbf, 0.0, 0.5};

} // namespace

TEST(KernelChoiceParsing, Forms) {
    EXPECT_EQ(parse_kernel_choice("rbf"), kRbf);
    EXPECT_EQ(parse_kernel_choice("aenrbf:lambda=0:alpha=0.5"), kReducedAen);
    const KernelChoice c = parse_kernel_choice("aenrbf:alpha=0.3");
    EXPECT_FALSE(c.lambda.has_value());
    EXPECT_EQ(*c.alpha, 0.3);
    EXPECT_EQ(parse_kernel_list("rbf, aenrbf").size(), 2u);
    EXPECT_EQ(parse_kernel_choice(kReducedAen.label()), kReducedAen);
    EXPECT_THROW(parse_kernel_choice("rbf:lambda=0.2"), ParamError);
    EXPECT_THROW(parse_kernel_choice("aenrbf:gamma=1"), ParamError);
    EXPECT_THROW(parse_kernel_choice("aenrbf:alpha=x"), ParamError);
    EXPECT_THROW(parse_kernel_list(""), ParamError);
}

TEST(Experiment, ConstantObjectiveRmseIsTheOffset) {
    ExperimentConfig cfg = small(FunctionName::Branin, 1, 6, 0);
    cfg.objective = [](const Eigen::VectorXd&) { return 2.0; };
    const ExperimentResult r = run_experiment(cfg);
    for (const KernelOutcome& k : r.kernels) EXPECT_NEAR(k.rmse, std::abs(2.0 - r.y_global), 1e-12);
}

TEST(Experiment, KernelsShareInitialDesigns) {
    const ExperimentResult r = run_experiment(small(FunctionName::SixHumpCamel, 3, 8, 20));
    ASSERT_EQ(r.kernels.size(), 2u);
    for (int rep = 0; rep < 3; ++rep) {
        const PointSet& a = r.kernels[0].reps[rep].points;
        const PointSet& b = r.kernels[1].reps[rep].points;
        EXPECT_EQ(a.topRows(5), b.topRows(5));
        EXPECT_EQ(r.kernels[0].reps[rep].seed, r.kernels[1].reps[rep].seed);
    }
}

TEST(Experiment, WorkerCountDoesNotChangeResults) {
    ExperimentConfig cfg = small(FunctionName::McCormick, 4, 8, 3);
    const ExperimentResult one = run_experiment(cfg);
    cfg.workers = 3;
    const ExperimentResult three = run_experiment(cfg);
    for (std::size_t k = 0; k < one.kernels.size(); ++k) {
        EXPECT_EQ(one.kernels[k].rmse, three.kernels[k].rmse);
        for (std::size_t r = 0; r < one.kernels[k].reps.size(); ++r) {
            EXPECT_EQ(one.kernels[k].reps[r].y_star, three.kernels[k].reps[r].y_star);
            EXPECT_EQ(one.kernels[k].reps[r].trace, three.kernels[k].reps[r].trace);
        }
    }
}

TEST(Experiment, RmseMatchesOwnOutcomes) {
    const ExperimentResult r = run_experiment(small(FunctionName::Rosenbrock, 3, 8, 7));
    for (const KernelOutcome& k : r.kernels) {
        double s = 0.0;
        for (const auto& rep : k.reps) s += (rep.y_star - r.y_global) * (rep.y_star - r.y_global);
        EXPECT_NEAR(k.rmse, std::sqrt(s), 1e-12);
        EXPECT_NEAR(k.rmse_normalized, std::sqrt(s / 3), 1e-12);
        EXPECT_EQ(k.failures, 0);
    }
    EXPECT_FALSE(r.partial());
}

TEST(Experiment, WidenedScenarioUsesTheActiveDomain) {
    ExperimentConfig cfg = small(FunctionName::Branin, 1, 7, 1);
    cfg.scenario = Scenario::Widen5;
    const ExperimentResult r = run_experiment(cfg);
    EXPECT_EQ(r.domain, scenario_domain(FunctionName::Branin, Scenario::Widen5));
    for (const auto& k : r.kernels)
        for (Eigen::Index i = 0; i < k.reps[0].points.rows(); ++i)
            EXPECT_TRUE(r.domain.contains(k.reps[0].points.row(i).transpose()));
}

TEST(Experiment, InvalidConfig) {
    ExperimentConfig cfg = small(FunctionName::Branin, 0, 8, 0);
    EXPECT_THROW(run_experiment(cfg), ParamError);
}

TEST(Convergence, TraceShapeAndMonotone) {
    const ConvergenceResult c = convergence_trace(FunctionName::SixHumpCamel, {kRbf, KernelChoice{}}, 12, 4);
    ASSERT_EQ(c.traces.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        ASSERT_EQ(c.traces[k].size(), 12u);
        for (std::size_t i = 1; i < 12; ++i) EXPECT_LE(c.traces[k][i], c.traces[k][i - 1]);
        EXPECT_NEAR(c.final_gap[k], std::abs(c.traces[k].back() - c.y_global), 1e-15);
    }
    EXPECT_THROW(convergence_trace(FunctionName::Branin, {kRbf}, 5, 0), ParamError);
}

TEST(Timing, ReportShape) {
    const TimingReport t = timing_profile(FunctionName::Branin, {kRbf, KernelChoice{}}, 8, 1, 0, {}, {20, 40, 80}, 2);
    EXPECT_EQ(t.mean_seconds_per_iter.size(), 2u);
    for (double s : t.mean_seconds_per_iter) EXPECT_GT(s, 0.0);
    EXPECT_EQ(t.growth.sizes, (std::vector<int>{20, 40, 80}));
    EXPECT_EQ(t.growth.seconds.size(), 3u);
    EXPECT_TRUE(std::isfinite(t.growth.exponent));
}

TEST(Timing, LoglogSlopeOfExactPowerLaw) {
    const std::vector<int> n{10, 20, 40, 80};
    std::vector<double> s;
    for (int v : n) s.push_back(3e-9 * std::pow(v, 3.0));
    EXPECT_NEAR(loglog_slope(n, s), 3.0, 1e-12);
    EXPECT_THROW(loglog_slope({10}, {1.0}), ParamError);
}

TEST(Mspe, ReducedAenMatchesRbf) {
    MspeOptions opt;
    opt.aen = kReducedAen;
    for (MspeSetting setting : {MspeSetting::Symmetric, MspeSetting::Asymmetric}) {
        opt.setting = setting;
        for (std::uint64_t s = 0; s < 3; ++s) {
            const MspeTrialData d = mspe_data(s, opt);
            const double a = mspe_fit_predict(kReducedAen, d, 2, s);
            const double b = mspe_fit_predict(kRbf, d, 2, s);
            EXPECT_NEAR(a, b, 1e-8);
        }
    }
}

TEST(Mspe, DataShapesAndDeterminism) {
    MspeOptions opt;
    const MspeTrialData d = mspe_data(5, opt);
    EXPECT_EQ(d.train.X.rows(), 30);
    EXPECT_EQ(d.test.rows(), 50);
    EXPECT_EQ(d.truth.size(), 50);
    EXPECT_EQ(mspe_data(5, opt).train.y, d.train.y);
    for (Eigen::Index i = 0; i < d.test.rows(); ++i) EXPECT_EQ(d.truth(i), mspe_truth(d.test(i, 0), d.test(i, 1)));
}

TEST(Mspe, CompareReport) {
    const MspeReport r = mspe_compare(0, 3);
    EXPECT_EQ(r.trial_aen.size(), 3u);
    double wins = 0;
    for (int t = 0; t < 3; ++t) wins += r.trial_aen[t] < r.trial_rbf[t];
    EXPECT_DOUBLE_EQ(r.win_rate, wins / 3);
    EXPECT_THROW(mspe_compare(0, 0), ParamError);
}

TEST(Demo1d, NoOutliersReducedAenMatchesRbf) {
    Demo1dOptions opt;
    opt.fraction = 0.0;
    const Demo1dResult r = demo1d({kRbf, kReducedAen}, 1, opt);
    EXPECT_TRUE(r.outliers.empty());
    ASSERT_EQ(r.bands.size(), 2u);
    EXPECT_LE((r.bands[0].mean - r.bands[1].mean).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((r.bands[0].upper - r.bands[1].upper).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Demo1d, BandsBracketTheMean) {
    const Demo1dResult r = demo1d({kRbf, KernelChoice{}}, 2);
    EXPECT_EQ(r.outliers.size(), 3u);
    EXPECT_EQ(r.grid.size(), 200);
    for (const auto& b : r.bands) {
        EXPECT_TRUE((b.lower.array() <= b.mean.array()).all());
        EXPECT_TRUE((b.mean.array() <= b.upper.array()).all());
        EXPECT_GT(b.mean_width(), 0.0);
    }
    EXPECT_THROW(demo1d({kRbf}, 0, Demo1dOptions{0.7}), ParamError);
}

TEST(Validation, PrintedValuesAgreeWithGrids) {
    const ValidationReport v = validation_report(801);
    ASSERT_EQ(v.functions.size(), 4u);
    for (const FunctionCheck& f : v.functions) EXPECT_NEAR(f.grid_min, f.printed_min, 2e-2) << to_string(f.name);
    ASSERT_EQ(v.domains.size(), 8u);
    for (const DomainCheck& d : v.domains) {
        EXPECT_GE(d.max_deviation_from_rule, 0.0);
        if (d.name == FunctionName::McCormick) {
            EXPECT_TRUE(d.encloses_nominal);
        }
    }
}
