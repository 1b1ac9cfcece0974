#include <gtest/gtest.h>

#include <cmath>

#include "spre/core.hpp"
#include "spre/sysid.hpp"
#include "support.hpp"

using namespace spre;
using spre::test::DeltaData;

namespace {

Eigen::VectorXd vec3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }

std::vector<Eigen::VectorXd> prbs_inputs(std::uint64_t seed, int r, std::size_t n) {
    std::vector<std::vector<double>> ch;
    for (int i = 0; i < r; ++i) ch.push_back(filtered_prbs(derive_seed(seed, static_cast<std::uint64_t>(i)), 1.0, 5.0, 0.05, n));
    std::vector<Eigen::VectorXd> u(n, Eigen::VectorXd(r));
    for (std::size_t k = 0; k < n; ++k) {
        for (int i = 0; i < r; ++i) u[k](i) = ch[static_cast<std::size_t>(i)][k];
    }
    return u;
}

MarkovEstimate run_rls(const DeltaData& d, int p, double ridge, double gamma) {
    MarkovEstimate e = init_markov(p, static_cast<int>(d.phi.front().size()) / p - 3, 3, ridge, gamma);
    for (std::size_t k = 0; k < d.phi.size(); ++k) rls_update(e, d.phi[k], d.dy[k]);
    return e;
}

}  // namespace

TEST(PeriodicBuffer, WarmsUpForOnePeriod) {
    PeriodicBuffer b(5, 2, 3, 3);
    for (int k = 0; k < 5; ++k) EXPECT_FALSE(b.push(vec3(k, 0, 0), vec3(0, k, 0)).has_value());
    EXPECT_TRUE(b.push(vec3(5, 0, 0), vec3(0, 5, 0)).has_value());
}

TEST(PeriodicBuffer, PeriodicStreamIsAnnihilated) {
    const int P = 7;
    PeriodicBuffer b(P, 3, 3, 3);
    for (int k = 0; k < 5 * P; ++k) {
        const double s = std::sin(0.3 + kTwoPi * (k % P) / P) * 1.7;
        auto d = b.push(vec3(s, 2 * s, -s), vec3(s * s, 1.0, s));
        if (k >= P) {
            ASSERT_TRUE(d);
            EXPECT_TRUE(d->du.isZero(0.0));
            EXPECT_TRUE(d->dy.isZero(0.0));
        }
    }
}

TEST(PeriodicBuffer, ConstantStreamIsAnnihilated) {
    PeriodicBuffer b(4, 2, 3, 3);
    for (int k = 0; k < 20; ++k) {
        auto d = b.push(vec3(1.5, -2, 3), vec3(0.1, 0.2, 0.3));
        if (d) {
            EXPECT_TRUE(d->du.isZero(0.0));
            EXPECT_TRUE(d->dy.isZero(0.0));
        }
    }
}

TEST(PeriodicBuffer, RampDifferencesToSlopeTimesPeriod) {
    const int P = 6;
    const double c = 0.25;
    PeriodicBuffer b(P, 2, 3, 3);
    for (int k = 0; k < 30; ++k) {
        auto d = b.push(vec3(c * k, 2 * c * k, 0), vec3(0, 0, c * k));
        if (k >= P) {
            ASSERT_TRUE(d);
            EXPECT_DOUBLE_EQ(d->du(0), c * P);
            EXPECT_DOUBLE_EQ(d->du(1), 2 * c * P);
            EXPECT_DOUBLE_EQ(d->dy(2), c * P);
        }
    }
}

TEST(PeriodicBuffer, RejectsNonFiniteAndWrongSize) {
    PeriodicBuffer b(4, 2, 3, 3);
    EXPECT_THROW(b.push(vec3(NAN, 0, 0), vec3(0, 0, 0)), std::invalid_argument);
    EXPECT_THROW(b.push(vec3(0, 0, 0), vec3(0, INFINITY, 0)), std::invalid_argument);
    EXPECT_THROW(b.push(Eigen::VectorXd::Zero(2), vec3(0, 0, 0)), std::invalid_argument);
    EXPECT_THROW(PeriodicBuffer(3, 4, 3, 3), std::invalid_argument);
}

TEST(Regressor, SingleBlockWindow) {
    PeriodicBuffer b(3, 1, 3, 3);
    std::vector<Eigen::VectorXd> us, ys;
    for (int k = 0; k < 8; ++k) {
        us.push_back(vec3(k * k, k + 1, -k));
        ys.push_back(vec3(2 * k * k, 3 - k, k * 0.5));
        b.push(us.back(), ys.back());
    }
    ASSERT_TRUE(b.regressor_ready());
    const Eigen::VectorXd phi = b.regressor();
    ASSERT_EQ(phi.size(), 6);
    const int k = 7;
    EXPECT_TRUE(phi.head(3).isApprox(us[k - 1] - us[k - 1 - 3]));
    EXPECT_TRUE(phi.tail(3).isApprox(ys[k - 1] - ys[k - 1 - 3]));
}

TEST(Regressor, ZeroHistoryGivesZero) {
    PeriodicBuffer b(4, 3, 3, 3);
    for (int k = 0; k < 20; ++k) b.push(vec3(1, 2, 3), vec3(4, 5, 6));
    EXPECT_TRUE(b.regressor().isZero(0.0));
}

TEST(Regressor, OldestBlockFirst) {
    const int P = 5, p = 3;
    const int n = 14;
    auto fill = [&](double bump) {
        PeriodicBuffer b(P, p, 3, 3);
        for (int k = 0; k < n; ++k) {
            const double e = k == n - 1 - p ? bump : 0.0;
            b.push(vec3(std::sin(k) + e, std::cos(k) + e, k + e), vec3(k * 0.1 + e, -k + e, 1.0 + e));
        }
        return b.regressor();
    };
    const Eigen::VectorXd a = fill(0.0), b = fill(1.0);
    const Eigen::VectorXd diff = b - a;
    for (int i = 0; i < diff.size(); ++i) {
        const bool first_u = i < 3;
        const bool first_y = i >= 3 * p && i < 3 * p + 3;
        if (first_u || first_y) {
            EXPECT_NEAR(diff(i), 1.0, 1e-12) << i;
        } else {
            EXPECT_EQ(diff(i), 0.0) << i;
        }
    }
}

TEST(Regressor, InsufficientHistoryThrows) {
    PeriodicBuffer b(4, 2, 3, 3);
    for (int k = 0; k < 6; ++k) b.push(vec3(k, 0, 0), vec3(0, 0, 0));
    EXPECT_FALSE(b.regressor_ready());
    EXPECT_THROW(b.regressor(), std::logic_error);
}

TEST(InitMarkov, FreshEstimatePredictsZero) {
    const MarkovEstimate e = init_markov(4, 3, 3, 1e-4);
    EXPECT_EQ(e.xi.rows(), 3);
    EXPECT_EQ(e.xi.cols(), 24);
    EXPECT_TRUE(e.predict(Eigen::VectorXd::LinSpaced(24, -3, 5)).isZero(0.0));
    EXPECT_TRUE(e.sqrt_info.isApprox(1e-2 * Eigen::MatrixXd::Identity(24, 24)));
}

TEST(InitMarkov, LargerRidgeAdaptsSlower) {
    const auto g = test::random_generator(3);
    const auto tr = test::simulate(g, test::random_inputs(4, 3, 200), 0.0, 5);
    const DeltaData d = test::delta_pairs(tr, 20, 4);
    MarkovEstimate small = init_markov(4, 3, 3, 1e-4), big = init_markov(4, 3, 3, 1e2);
    rls_update(small, d.phi[0], d.dy[0]);
    rls_update(big, d.phi[0], d.dy[0]);
    EXPECT_LT(big.xi.norm(), small.xi.norm());
}

TEST(InitMarkov, RejectsBadArguments) {
    EXPECT_THROW(init_markov(4, 3, 3, 0.0), std::invalid_argument);
    EXPECT_THROW(init_markov(4, 3, 3, -1.0), std::invalid_argument);
    EXPECT_THROW(init_markov(4, 3, 3, 1e-4, 1.2), std::invalid_argument);
    EXPECT_NO_THROW(init_markov(4, 3, 3, 1e-4));
    SimConfig c;
    EXPECT_EQ(c.rls_ridge, 1e-4);
    EXPECT_NO_THROW(validate_config(c));
}

TEST(RlsUpdate, MatchesBatchLeastSquares) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
        const auto g = test::random_generator(seed);
        const auto tr = test::simulate(g, test::random_inputs(seed + 10, 3, 2000 + 24), 0.05, seed + 20);
        DeltaData d = test::delta_pairs(tr, 20, 4);
        d.phi.resize(2000);
        d.dy.resize(2000);
        const MarkovEstimate e = run_rls(d, 4, 1e-4, 1.0);
        EXPECT_LT(test::rel_fro(e.xi, test::batch_markov(d, 1e-4, 1.0)), 1e-8) << "seed " << seed;
    }
}

TEST(RlsUpdate, MatchesWeightedBatchWithForgetting) {
    const auto g = test::random_generator(8);
    const auto tr = test::simulate(g, test::random_inputs(9, 3, 1500), 0.05, 10);
    const DeltaData d = test::delta_pairs(tr, 20, 4);
    const MarkovEstimate e = run_rls(d, 4, 1e-2, 0.995);
    EXPECT_LT(test::rel_fro(e.xi, test::batch_markov(d, 1e-2, 0.995)), 1e-8);
}

TEST(RlsUpdate, RecoversMarkovBlocksUnderPrbs) {
    const int p = 4, P = 20;
    const auto g = test::nilpotent_generator(21);
    ASSERT_LT((g.at + g.l * g.c).eigenvalues().cwiseAbs().maxCoeff(), 1.0);
    const auto tr = test::simulate(g, prbs_inputs(22, 3, 5000 + P + p), 0.05, 23);
    DeltaData d = test::delta_pairs(tr, P, p);
    d.phi.resize(5000);
    d.dy.resize(5000);
    const MarkovEstimate e = run_rls(d, p, 1e-4, 0.9999);
    const Eigen::MatrixXd truth = g.xi(p);
    for (int i = 0; i < p; ++i) {
        const auto bu = truth.block(0, 3 * i, 3, 3), eu = e.xi.block(0, 3 * i, 3, 3);
        const auto by = truth.block(0, 3 * p + 3 * i, 3, 3), ey = e.xi.block(0, 3 * p + 3 * i, 3, 3);
        EXPECT_LT((eu - bu).norm() / bu.norm(), 0.05) << "input block " << i;
        EXPECT_LT((ey - by).norm() / by.norm(), 0.05) << "output block " << i;
    }
}

TEST(RlsUpdate, ZeroRegressorLeavesEstimateUnchanged) {
    const auto g = test::random_generator(4);
    const auto tr = test::simulate(g, test::random_inputs(5, 3, 300), 0.0, 6);
    const DeltaData d = test::delta_pairs(tr, 20, 4);
    MarkovEstimate e = run_rls(d, 4, 1e-4, 1.0);
    const Eigen::MatrixXd before = e.xi;
    for (int k = 0; k < 50; ++k) rls_update(e, Eigen::VectorXd::Zero(24), vec3(k, -k, 1.0));
    EXPECT_EQ(e.xi, before);
}

TEST(RlsUpdate, FactorStaysUpperTriangularWithNonnegativeDiagonal) {
    const auto g = test::random_generator(12);
    const auto tr = test::simulate(g, test::random_inputs(13, 3, 600), 0.1, 14);
    const DeltaData d = test::delta_pairs(tr, 20, 4);
    MarkovEstimate e = init_markov(4, 3, 3, 1e-4, 0.999);
    for (std::size_t k = 0; k < d.phi.size(); ++k) {
        rls_update(e, d.phi[k], d.dy[k]);
        const Eigen::MatrixXd lower = e.sqrt_info.triangularView<Eigen::StrictlyLower>();
        ASSERT_TRUE(lower.isZero(0.0));
        ASSERT_GE(e.sqrt_info.diagonal().minCoeff(), 0.0);
        ASSERT_TRUE(e.xi.allFinite());
    }
}

TEST(RlsUpdate, RejectsNonFinite) {
    MarkovEstimate e = init_markov(2, 3, 3, 1e-4);
    Eigen::VectorXd phi = Eigen::VectorXd::Ones(12);
    phi(3) = NAN;
    EXPECT_THROW(rls_update(e, phi, vec3(0, 0, 0)), std::invalid_argument);
    EXPECT_THROW(rls_update(e, Eigen::VectorXd::Ones(5), vec3(0, 0, 0)), std::invalid_argument);
}

TEST(RlsUpdate, PeriodicDisturbanceLeavesEstimateBitIdentical) {
    // Outputs and disturbance on a dyadic grid so the additions are exact.
    const int P = 16, p = 4;
    const double q = std::ldexp(1.0, -20);
    const auto g = test::random_generator(31);
    auto tr = test::simulate(g, test::random_inputs(32, 3, 800), 0.05, 33);
    for (auto& y : tr.y) y = (y / q).array().round() * q;
    auto disturbed = tr;
    std::mt19937_64 rng(34);
    std::uniform_int_distribution<int> di(-(1 << 20), 1 << 20);
    std::vector<Eigen::VectorXd> d(P, Eigen::VectorXd(3));
    for (auto& v : d) v << di(rng) * q, di(rng) * q, di(rng) * q;
    for (std::size_t k = 0; k < tr.y.size(); ++k) disturbed.y[k] += d[k % P];

    const DeltaData a = test::delta_pairs(tr, P, p), b = test::delta_pairs(disturbed, P, p);
    MarkovEstimate ea = init_markov(p, 3, 3, 1e-4, 0.9999), eb = ea;
    for (std::size_t k = 0; k < a.phi.size(); ++k) {
        rls_update(ea, a.phi[k], a.dy[k]);
        rls_update(eb, b.phi[k], b.dy[k]);
    }
    EXPECT_EQ(ea.xi, eb.xi);
    EXPECT_EQ(ea.sqrt_info, eb.sqrt_info);
}

TEST(RlsUpdate, PredictionResidualApproachesInnovation) {
    // With At^p negligible the one-step residual is the differenced innovation,
    // e_k - e_{k-P}, of variance 2 sigma^2.
    const int P = 20, p = 6;
    const double sigma = 0.1;
    const auto g = test::nilpotent_generator(41);
    Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 0; i < p; ++i) pw = g.at * pw;
    ASSERT_LT(pw.norm(), 1e-3);
    const auto tr = test::simulate(g, test::random_inputs(42, 3, 12000), sigma, 43);
    const DeltaData d = test::delta_pairs(tr, P, p);
    MarkovEstimate e = init_markov(p, 3, 3, 1e-4, 1.0);
    double s2 = 0.0;
    long n = 0;
    for (std::size_t k = 0; k < d.phi.size(); ++k) {
        if (k > 6000) {
            s2 += (d.dy[k] - e.predict(d.phi[k])).squaredNorm();
            n += 3;
        }
        rls_update(e, d.phi[k], d.dy[k]);
    }
    EXPECT_NEAR(s2 / static_cast<double>(n), 2.0 * sigma * sigma, 0.1 * 2.0 * sigma * sigma);
}
