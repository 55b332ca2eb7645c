#include "recind/stats.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "recind/exact_oracle.hpp"

using namespace recind;

namespace {

JointPmf<double> random_double_pmf(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    JointPmf<double> pmf;
    pmf.n = n;
    double total = 0.0;
    for (std::uint64_t i = 0; i < outcome_count(n); ++i) {
        pmf.probs.push_back(u(rng) + 1e-3);
        total += pmf.probs.back();
    }
    for (auto& p : pmf.probs) p /= total;
    return pmf;
}

}  // namespace

TEST(ProductOfMarginals, Examples) {
    // Half mass on (1,1), half on (0,0): marginals are 1/2 each.
    JointPmf<Rational> pmf;
    pmf.n = 3;
    pmf.probs = {Rational(1, 2), Rational(0), Rational(0), Rational(1, 2)};
    const auto product = product_of_marginals(pmf);
    EXPECT_EQ(product.probs[3], Rational(1, 4));
    EXPECT_EQ(product.probs[0], Rational(1, 4));

    // The exact iid law is already a product: fixed point.
    const auto oracle = joint_pmf_iid(4, 1, SemanticsMode::Chain);
    EXPECT_EQ(product_of_marginals(oracle).probs, oracle.probs);

    // Idempotence on arbitrary tables.
    std::mt19937 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_double_pmf(rng, 2 + trial % 4);
        const auto once = product_of_marginals(p, 1e-6);
        const auto twice = product_of_marginals(once, 1e-6);
        for (std::size_t i = 0; i < once.probs.size(); ++i) {
            EXPECT_NEAR(once.probs[i], twice.probs[i], 1e-12);
        }
    }
}

TEST(TvDistance, ExamplesAndMetricProperties) {
    JointPmf<Rational> a;
    a.n = 3;
    a.probs = {Rational(1), Rational(0), Rational(0), Rational(0)};
    JointPmf<Rational> b;
    b.n = 3;
    b.probs = {Rational(0), Rational(0), Rational(1), Rational(0)};
    EXPECT_EQ(tv_distance(a, a), Rational(0));
    EXPECT_EQ(tv_distance(a, b), Rational(1));

    JointPmf<Rational> other;
    other.n = 2;
    other.probs = {Rational(1), Rational(0)};
    EXPECT_THROW(tv_distance(a, other), InputError);

    std::mt19937 rng(59);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 4;
        const auto p = random_double_pmf(rng, n);
        const auto q = random_double_pmf(rng, n);
        const auto r = random_double_pmf(rng, n);
        const double pq = tv_distance(p, q);
        EXPECT_GE(pq, 0.0);
        EXPECT_LE(pq, 1.0);
        EXPECT_DOUBLE_EQ(pq, tv_distance(q, p));
        EXPECT_LE(pq, tv_distance(p, r) + tv_distance(r, q) + 1e-15);
    }
}

TEST(TvDistance, ExactZeroForIidOracle) {
    for (int n = 2; n <= 6; ++n) {
        const auto pmf = joint_pmf_iid(n, 1, SemanticsMode::Chain);
        const auto product = product_of_marginals(pmf);
        EXPECT_EQ(tv_distance(pmf, product), Rational(0));
        // Zero TV forces zero pairwise covariances.
        for (const auto& entry : pairwise_covariances(pmf)) {
            EXPECT_EQ(entry.covariance, Rational(0));
        }
    }
}

TEST(ChiSquareTail, ClosedForms) {
    for (const double g : {0.5, 1.0, 2.5, 7.0, 15.0}) {
        EXPECT_NEAR(chi_square_tail(g, 2), std::exp(-g / 2.0), 1e-12);
        EXPECT_NEAR(chi_square_tail(g, 4), std::exp(-g / 2.0) * (1.0 + g / 2.0), 1e-12);
        EXPECT_NEAR(chi_square_tail(g, 1), std::erfc(std::sqrt(g / 2.0)), 1e-12);
    }
    EXPECT_THROW(chi_square_tail(1.0, 0), InputError);
}

TEST(GTest, ProportionalCountsGiveZero) {
    // Counts exactly proportional to a product law: marginals 1/2 and 1/2,
    // every cell 100 of 400.
    EmpiricalJointPmf emp;
    emp.replicates = 400;
    emp.counts = {100, 100, 100, 100};
    emp.pmf.n = 3;
    emp.pmf.source = PmfSource::Empirical;
    emp.pmf.probs = {0.25, 0.25, 0.25, 0.25};
    const auto g = g_test(emp);
    EXPECT_TRUE(g.applicable);
    EXPECT_EQ(g.dof, 1);
    EXPECT_NEAR(g.gstat, 0.0, 1e-9);
    EXPECT_NEAR(g.pvalue, 1.0, 1e-9);
}

TEST(GTest, DegreesOfFreedomConvention) {
    EmpiricalJointPmf n2;
    n2.replicates = 10;
    n2.counts = {5, 5};
    n2.pmf.n = 2;
    n2.pmf.probs = {0.5, 0.5};
    const auto g2 = g_test(n2);
    EXPECT_FALSE(g2.applicable);  // dof = 0: single indicator
    EXPECT_EQ(g2.dof, 0);
    EXPECT_TRUE(std::isnan(g2.pvalue));

    EmpiricalJointPmf n4;
    n4.replicates = 8;
    n4.counts.assign(8, 1);
    n4.pmf.n = 4;
    n4.pmf.probs.assign(8, 0.125);
    EXPECT_EQ(g_test(n4).dof, 4);  // 8 - 1 - 3
}

TEST(GTest, DetectsStrongDependence) {
    // Mass only on (0,0,0) and (1,1,1): marginals 1/2 but nothing factors.
    EmpiricalJointPmf emp;
    emp.replicates = 1000;
    emp.counts = {500, 0, 0, 0, 0, 0, 0, 500};
    emp.pmf.n = 4;
    emp.pmf.probs = {0.5, 0, 0, 0, 0, 0, 0, 0.5};
    const auto g = g_test(emp);
    EXPECT_TRUE(g.applicable);
    EXPECT_GT(g.gstat, 100.0);
    EXPECT_LT(g.pvalue, 1e-10);
}

TEST(Covariances, Examples) {
    JointPmf<Rational> pmf;
    pmf.n = 3;
    pmf.probs = {Rational(1, 2), Rational(0), Rational(0), Rational(1, 2)};
    const auto cov = pairwise_covariances(pmf);
    ASSERT_EQ(cov.size(), 1u);
    EXPECT_EQ(cov[0].j, 2);
    EXPECT_EQ(cov[0].jp, 3);
    EXPECT_EQ(cov[0].covariance, Rational(1, 4));

    const auto product = product_of_marginals(pmf);
    for (const auto& entry : pairwise_covariances(product)) {
        EXPECT_EQ(entry.covariance, Rational(0));
    }
}

TEST(Covariances, ChainD2IsCorrelated) {
    // Chain records in d = 2 are uncorrelated no more: the n = 3 joint law
    // has Cov(zeta_2, zeta_3) = 1/36 - (1/4)(1/6) = -1/72.
    const auto pmf = joint_pmf_iid(3, 2, SemanticsMode::Chain);
    const auto cov = pairwise_covariances(pmf);
    ASSERT_EQ(cov.size(), 1u);
    EXPECT_EQ(cov[0].covariance, Rational(-1, 72));
    const double corr = max_abs_correlation(pmf);
    EXPECT_GT(corr, 0.0);
    EXPECT_LE(corr, 1.0);
}

TEST(IndependenceReport, BundlesTheDiagnostics) {
    const auto pmf = to_double_pmf(joint_pmf_iid(4, 1, SemanticsMode::Chain));
    const auto report = make_independence_report(pmf);
    EXPECT_EQ(report.n, 4);
    EXPECT_NEAR(report.tv, 0.0, 1e-15);
    EXPECT_NEAR(report.max_abs_corr, 0.0, 1e-12);
    EXPECT_EQ(report.covariances.size(), 3u);
    EXPECT_FALSE(report.g.applicable);  // no counts supplied
}
