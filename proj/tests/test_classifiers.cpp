#include <gtest/gtest.h>

#include "srlda/classifiers.hpp"
#include "srlda/model_io.hpp"
#include "test_support.hpp"

using namespace srlda;
using srlda::testing::gaussian_clouds;
using srlda::testing::spiked_classes;

namespace {

TrainedClassifier toy_spectral_model(Index p, int spikes, GammaPair g, Rng& rng) {
    std::normal_distribution<double> z;
    MatrixXd a(p, p);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = z(rng);
    const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(a).householderQ();
    TrainedClassifier m;
    m.kind = ClassifierKind::srlda;
    m.mean0 = VectorXd::Zero(p);
    m.mean1 = VectorXd::Zero(p);
    m.spike_basis = q.leftCols(spikes);
    for (int k = 0; k < spikes; ++k) {
        const bool pos = k % 2 == 0;
        m.spike_index.push_back(pos ? k / 2 + 1 : -(k / 2 + 1));
        m.spike_group.push_back(pos ? SpikeGroup::positive : SpikeGroup::negative);
        m.spike_lambda.push_back(pos ? 3.0 + 4.0 * k : -0.3 - 0.1 * k);
    }
    m.gamma = g;
    return m;
}

Dataset spiked_problem(Index p, Index n_per_class, std::uint64_t seed) {
    Rng rng(seed);
    VectorXd mu = VectorXd::Zero(p);
    mu(0) = 0.8;
    mu(5) = 0.6;
    return spiked_classes(p, n_per_class, n_per_class, {{0, 15}, {1, 6}}, mu, rng);
}

} // namespace

TEST(ApplyHTilde, ZeroGammaIsIdentity) {
    Rng rng(1);
    const auto m = toy_spectral_model(6, 3, GammaPair{0, 0}, rng);
    const VectorXd v = VectorXd::LinSpaced(6, -1, 2);
    EXPECT_TRUE(apply_h_tilde(v, m).isApprox(v, 1e-15));
}

TEST(ApplyHTilde, OrthogonalVectorUntouched) {
    Rng rng(2);
    const auto m = toy_spectral_model(6, 3, GammaPair{0.7, 1.3}, rng);
    VectorXd v = VectorXd::LinSpaced(6, -1, 2);
    v -= m.spike_basis * (m.spike_basis.transpose() * v);
    EXPECT_LE((apply_h_tilde(v, m) - v).norm(), 1e-14);
}

TEST(ApplyHTilde, MatchesDenseInverse) {
    for (Index p : {4, 6, 10}) {
        Rng rng{std::uint64_t(p)};
        const auto m = toy_spectral_model(p, 3, GammaPair{0.37, 1.9}, rng);
        MatrixXd a = MatrixXd::Identity(p, p);
        for (std::size_t k = 0; k < m.spike_lambda.size(); ++k) {
            const double g = m.spike_group[k] == SpikeGroup::positive ? m.gamma.gamma1 : m.gamma.gamma2;
            a += g * m.spike_lambda[k] * m.spike_basis.col(Index(k)) * m.spike_basis.col(Index(k)).transpose();
        }
        const MatrixXd inv = a.inverse();
        for (int t = 0; t < 5; ++t) {
            const VectorXd v = VectorXd::Random(p);
            EXPECT_LE((apply_h_tilde(v, m) - inv * v).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(FitSrlda, WhiteNoiseFallsBackToIdentity) {
    Rng rng(3);
    const Index p = 40;
    const auto d = gaussian_clouds(p, 200, VectorXd::Constant(p, 0.3), VectorXd::Constant(p, -0.3), rng);
    const auto m = fit_srlda(d);
    EXPECT_EQ(m.retained_spikes.r1 + m.retained_spikes.r2, 0);
    EXPECT_FALSE(m.warnings.empty());
    EXPECT_TRUE(m.direction.isApprox((m.mean0 - m.mean1) / m.sigma2, 1e-14));
}

TEST(FitSrlda, PopulationInjectionMatchesSurfaceOptimum) {
    const Dataset d = spiked_problem(60, 150, 5);
    const auto pooled = pooled_covariance(d);
    const auto eig = symmetric_eigen(pooled);
    SurfaceParams sp;
    const double J = 60.0 / 300.0;
    sp.spikes = {{15, angle_factor(15, J), 0.64, SpikeGroup::positive}, {6, angle_factor(6, J), 0.0, SpikeGroup::positive}};
    sp.alpha = 1.0 / 4.0;
    sp.J0 = sp.J1 = 0.4;
    sp.pi0 = 0.5;
    const GridSpec grid;
    const auto m = assemble_srlda(ClassifierKind::srlda, pooled, eig, 1.0, sp, {1, 2}, grid);
    const auto opt = optimize_omega(sp, grid);
    EXPECT_EQ(m.gamma.gamma1, opt.gamma.gamma1);
    EXPECT_EQ(m.surface_value, opt.value);
    EXPECT_EQ(m.retained_spikes.r1, 2);
}

TEST(FitOiSrlda, BalancedCoincidesWithSrlda) {
    const Dataset d = spiked_problem(50, 120, 6);
    FitConfig cfg;
    cfg.pi0 = 0.5;
    const auto a = fit_srlda(d, cfg);
    const auto b = fit_oi_srlda(d, cfg);
    EXPECT_EQ(b.intercept, 0.0);
    EXPECT_NEAR(a.intercept, 0.0, 1e-15);
    EXPECT_EQ(a.gamma.gamma1, b.gamma.gamma1);
    EXPECT_EQ(predict(a, d.features).labels, predict(b, d.features).labels);
}

TEST(FitLda, LowDimensionalClouds) {
    Rng rng(7);
    VectorXd m0(2), m1(2);
    m0 << 2, 0;
    m1 << -2, 0;
    const auto train = gaussian_clouds(2, 100, m0, m1, rng);
    const auto test = gaussian_clouds(2, 2000, m0, m1, rng);
    const auto m = fit_lda(train);
    EXPECT_LT(predict(m, test).empirical_error, 0.05);
}

TEST(FitLda, SingularCovarianceRaises) {
    Rng rng(8);
    const auto d = gaussian_clouds(30, 10, VectorXd::Zero(30), VectorXd::Ones(30), rng);
    try {
        fit_lda(d);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::singular_matrix);
    }
}

TEST(FitLda, EqualMeansGiveChance) {
    Rng rng(9);
    const auto train = gaussian_clouds(3, 200, VectorXd::Zero(3), VectorXd::Zero(3), rng);
    const auto test = gaussian_clouds(3, 5000, VectorXd::Zero(3), VectorXd::Zero(3), rng);
    EXPECT_NEAR(predict(fit_lda(train, 0.5), test).empirical_error, 0.5, 0.05);
}

TEST(FitRlda, LargeGammaIsNearestCentroid) {
    Rng rng(10);
    const auto d = gaussian_clouds(5, 50, VectorXd::Constant(5, 1), VectorXd::Constant(5, -1), rng);
    const auto m = fit_rlda(d, 0.5, 1e9);
    const VectorXd centroid = (m.mean0 - m.mean1).normalized();
    EXPECT_GT(m.direction.normalized().dot(centroid), 1 - 1e-9);
}

TEST(FitRlda, CrossValidatedGammaOnGrid) {
    const Dataset d = spiked_problem(40, 60, 11);
    const auto m = fit_rlda(d);
    const auto grid = rlda_gamma_grid();
    EXPECT_NE(std::find(grid.begin(), grid.end(), m.rlda_gamma), grid.end());
}

TEST(Predict, MidpointTieGoesToClassOne) {
    Rng rng(12);
    const auto d = gaussian_clouds(3, 40, VectorXd::Constant(3, 1), VectorXd::Constant(3, -1), rng);
    for (const auto& m : {fit_lda(d, 0.5), fit_rlda(d, 0.5, 1.0)}) {
        const VectorXd mid = 0.5 * (m.mean0 + m.mean1);
        EXPECT_EQ(m.score(mid), 0.0);
        EXPECT_EQ(m.label(m.score(mid)), 1);
        EXPECT_EQ(m.label(m.score(m.mean0 + 10 * (m.mean0 - m.mean1))), 0);
    }
}

TEST(Predict, SeparableTrainingSetHasZeroError) {
    Rng rng(13);
    VectorXd m0(4), m1(4);
    m0 << 10, 10, 0, 0;
    m1 << -10, -10, 0, 0;
    const auto d = gaussian_clouds(4, 25, m0, m1, rng);
    for (auto kind : {ClassifierKind::lda, ClassifierKind::rlda, ClassifierKind::srlda, ClassifierKind::oi_srlda}) {
        const auto m = fit(kind, d);
        EXPECT_EQ(predict(m, d).empirical_error, 0.0) << to_string(kind);
    }
}

TEST(Predict, DimensionMismatch) {
    Rng rng(14);
    const auto d = gaussian_clouds(3, 20, VectorXd::Constant(3, 1), VectorXd::Constant(3, -1), rng);
    const auto m = fit_lda(d);
    try {
        predict(m, MatrixXd::Zero(4, 5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::dimension_mismatch);
    }
}

TEST(Predict, PriorWeightedError) {
    Rng rng(15);
    const auto d = gaussian_clouds(3, 20, VectorXd::Constant(3, 0.3), VectorXd::Constant(3, -0.3), rng);
    const auto r = predict(fit_lda(d), d, 0.25);
    ASSERT_TRUE(r.total_error.has_value());
    EXPECT_DOUBLE_EQ(*r.total_error, 0.25 * r.error0 + 0.75 * r.error1);
}

TEST(Properties, LabelSwapNegatesScores) {
    Rng rng(16);
    auto d = gaussian_clouds(4, 30, VectorXd::Constant(4, 0.5), VectorXd::Constant(4, -0.5), rng);
    const auto a = fit_lda(d, 0.3);
    for (auto& l : d.labels) l = 1 - l;
    const auto b = fit_lda(d, 0.7);
    const auto sa = predict(a, d.features).scores, sb = predict(b, d.features).scores;
    for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_NEAR(sa[i], -sb[i], 1e-10);
}

TEST(Properties, ShiftInvariance) {
    const Dataset d = spiked_problem(30, 80, 17);
    Dataset shifted = d;
    const VectorXd t = VectorXd::LinSpaced(30, -3, 5);
    shifted.features.rowwise() += t.transpose();
    for (auto kind : {ClassifierKind::lda, ClassifierKind::srlda, ClassifierKind::oi_srlda}) {
        const auto sa = predict(fit(kind, d), d.features).scores;
        const auto sb = predict(fit(kind, shifted), shifted.features).scores;
        for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_NEAR(sa[i], sb[i], 1e-8) << to_string(kind);
    }
}

TEST(Properties, ScoreIsAffineInX) {
    const Dataset d = spiked_problem(30, 80, 18);
    const auto m = fit_srlda(d);
    const VectorXd x = d.features.row(0).transpose(), y = d.features.row(1).transpose();
    const double t = 0.3;
    EXPECT_NEAR(m.score(t * x + (1 - t) * y), t * m.score(x) + (1 - t) * m.score(y), 1e-10);
}

TEST(ModelIo, RoundTripIsBitExact) {
    const Dataset d = spiked_problem(30, 80, 19);
    for (auto kind : {ClassifierKind::lda, ClassifierKind::rlda, ClassifierKind::srlda, ClassifierKind::oi_srlda}) {
        const auto m = fit(kind, d);
        const auto back = deserialize_model(serialize_model(m));
        EXPECT_EQ(predict(m, d.features).scores, predict(back, d.features).scores) << to_string(kind);
        EXPECT_EQ(serialize_model(back), serialize_model(m));
    }
}

TEST(ModelIo, VersionMismatch) {
    const Dataset d = spiked_problem(10, 20, 20);
    auto j = nlohmann::json::parse(serialize_model(fit_lda(d)));
    j["version"] = 99;
    try {
        deserialize_model(j.dump());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::version_mismatch);
    }
    EXPECT_THROW(deserialize_model("{not json"), Error);
}

TEST(ClassifierKind, ParseAndPrint) {
    for (auto k : {ClassifierKind::lda, ClassifierKind::rlda, ClassifierKind::srlda, ClassifierKind::oi_srlda})
        EXPECT_EQ(parse_classifier_kind(to_string(k)), k);
    EXPECT_EQ(to_string(ClassifierKind::oi_srlda), "oi-srlda");
    EXPECT_THROW(parse_classifier_kind("qda"), Error);
}
