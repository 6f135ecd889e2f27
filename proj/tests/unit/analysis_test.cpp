#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cli/keygen.hpp"
#include "phobic/analysis.hpp"

namespace phobic::analysis {
namespace {

std::vector<double> random_decreasing(std::mt19937_64& rng, size_t k) {
    std::uniform_real_distribution<double> unit(0.05, 0.999);
    std::vector<double> p(k);
    for (;;) {
        for (auto& x : p) x = unit(rng);
        std::sort(p.rbegin(), p.rend());
        if (std::adjacent_find(p.begin(), p.end()) == p.end()) return p;
    }
}

TEST(CostBounds, Example) {
    auto b = cost_bounds(CostQuery{2, 0.5, 1'000'000});
    EXPECT_DOUBLE_EQ(b.lower, 4.0);
    EXPECT_NEAR(b.upper, 8.000032000096, 1e-9);
    auto one = cost_bounds(CostQuery{1, 0.0, 10});
    EXPECT_EQ(one.lower, 1.0);
    EXPECT_EQ(one.upper, 1.0);
    EXPECT_THROW(cost_bounds(CostQuery{3, 0.99, 100}), std::domain_error);
    EXPECT_THROW(cost_bounds(CostQuery{0, 0.1, 100}), std::domain_error);
}

TEST(CouponWork, Example) {
    EXPECT_NEAR(coupon_work(3, 100), 550.0 / 3.0, 1e-12);
    EXPECT_EQ(coupon_work(0, 100), 0.0);
    EXPECT_THROW(coupon_work(5, 4), std::invalid_argument);
}

TEST(ChainWork, Examples) {
    std::vector<double> a{0.9, 0.9, 0.9};
    EXPECT_NEAR(chain_work(a), 3.7174211248285322, 1e-14);
    std::vector<double> b{0.5, 0.5};
    EXPECT_DOUBLE_EQ(chain_work(b), 6.0);
    std::vector<double> c{1.0, 1.0, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(chain_work(c), 4.0);
    std::vector<double> bad{0.5, 0.0};
    EXPECT_THROW(chain_work(bad), std::invalid_argument);
    EXPECT_THROW(chain_work({}), std::invalid_argument);
}

TEST(ChainWork, LogSpaceAgreesWithDirectSum) {
    std::vector<double> tenth(100, 0.1);
    EXPECT_NEAR(std::log(chain_work(tenth)), 100 * std::log(10.0) - std::log(0.9), 1e-9);
    // 2^-1010 is below the switch-over point, the sum 2^1011 - 2 is still finite.
    std::vector<double> half(1010, 0.5);
    EXPECT_NEAR(chain_work(half) / std::ldexp(1.0, 1011), 1.0, 1e-9);
}

TEST(ChainSimulate, MatchesFormula) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unit(0.3, 1.0);
    int outside = 0;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> p(1 + rng() % 5);
        for (auto& x : p) x = unit(rng);
        auto est = chain_simulate(p, 20'000, rng());
        outside += std::abs(est.mean - chain_work(p)) > 3 * est.standard_error;
    }
    EXPECT_LE(outside, 2);
}

TEST(ChainSimulate, DeterministicChain) {
    std::vector<double> p{1.0, 1.0, 1.0};
    auto est = chain_simulate(p, 100, 3);
    EXPECT_EQ(est.mean, 3.0);
    EXPECT_EQ(est.standard_error, 0.0);
    EXPECT_THROW(chain_simulate(p, 0, 3), std::invalid_argument);
}

TEST(SwapInequality, Example) {
    std::vector<double> p{0.9, 0.8, 0.7, 0.6, 0.5};
    EXPECT_TRUE(lemma17_check(p, 1));
    // Both sides, computed independently.
    double lhs = chain_work(std::span(p).first(4)) + chain_work(std::span(p).subspan(4));
    double rhs = chain_work(std::span(p).first(1)) + chain_work(std::span(p).subspan(1));
    EXPECT_NEAR(lhs, 12.330687830687831, 1e-12);
    EXPECT_NEAR(rhs, 17.158730158730158, 1e-12);
    std::vector<double> three{0.9, 0.5, 0.1};
    EXPECT_TRUE(lemma17_check(three, 1));
}

TEST(SwapInequality, Preconditions) {
    std::vector<double> p{0.9, 0.8, 0.7, 0.6};
    EXPECT_THROW(lemma17_check(p, 2), std::invalid_argument);
    EXPECT_THROW(lemma17_check(p, 0), std::invalid_argument);
    std::vector<double> flat{0.9, 0.9, 0.7};
    EXPECT_THROW(lemma17_check(flat, 1), std::invalid_argument);
    std::vector<double> one{1.0, 0.9, 0.7};
    EXPECT_THROW(lemma17_check(one, 1), std::invalid_argument);
}

TEST(SwapInequality, RandomInstances) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 1000; ++t) {
        size_t k = 3 + rng() % 10;
        auto p = random_decreasing(rng, k);
        size_t i = 1 + rng() % ((k - 1) / 2);
        ASSERT_TRUE(lemma17_check(p, i)) << "k=" << k << " i=" << i;
    }
}

TEST(ProcessingOrder, LargestFirstBeatsPermutations) {
    std::mt19937_64 rng(3);
    std::poisson_distribution<uint64_t> size(3.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<uint64_t> sizes(20);
        for (auto& s : sizes) s = size(rng);
        std::sort(sizes.rbegin(), sizes.rend());
        double best = processing_order_work(sizes);
        for (int perm = 0; perm < 100; ++perm) {
            auto shuffled = sizes;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            ASSERT_LE(best, processing_order_work(shuffled) * (1 + 1e-12));
        }
    }
}

TEST(ProcessingOrder, Singletons) {
    // k singletons into an empty table of size k: coupon collector work.
    std::vector<uint64_t> ones(50, 1);
    EXPECT_NEAR(processing_order_work(ones), coupon_work(50, 50), 1e-9);
}

TEST(ExpectedSizes, SumToN) {
    for (auto spec : {AssignmentSpec{AssignmentKind::uniform, 0}, AssignmentSpec{AssignmentKind::beta_eps, 0.032}}) {
        AssignmentTable t(spec);
        auto sizes = expected_bucket_sizes(t, 2500, BucketCount{313});
        double sum = 0;
        for (double s : sizes) sum += s;
        EXPECT_NEAR(sum, 2500.0, 2500e-6);
    }
    AssignmentTable uniform(AssignmentSpec{AssignmentKind::uniform, 0});
    auto flat = expected_bucket_sizes(uniform, 1000, BucketCount{10});
    for (double s : flat) EXPECT_NEAR(s, 100.0, 1e-6);
}

TEST(EliasDelta, Lengths) {
    EXPECT_EQ(elias_delta_length(1), 1u);
    EXPECT_EQ(elias_delta_length(2), 4u);
    EXPECT_EQ(elias_delta_length(3), 7u);
    EXPECT_EQ(elias_delta_length(4), 7u);
    EXPECT_EQ(elias_delta_length(5), 8u);
    EXPECT_THROW(elias_delta_length(0), std::invalid_argument);
    std::vector<uint64_t> seeds{0, 1};
    EXPECT_EQ(elias_delta_bits(seeds), 5u);
}

TEST(MeasureWork, ReportsAndCsv) {
    auto owned = cli::gen_keys(5000, 4);
    std::vector<std::string_view> keys(owned.begin(), owned.end());
    std::vector<WorkVariant> variants;
    for (auto kind : {AssignmentKind::uniform, AssignmentKind::beta_eps}) {
        BuildConfig c;
        c.lambda = 4;
        c.partition_size = 1000;
        c.assignment = kind;
        variants.push_back(WorkVariant{"", c, EncoderPreset::ic_r()});
    }
    auto reports = measure_work(keys, variants);
    ASSERT_EQ(reports.size(), 2u);
    EXPECT_EQ(reports[0].name, "uniform");
    EXPECT_EQ(reports[1].name, "beta-eps");
    for (const auto& r : reports) {
        EXPECT_EQ(r.n, 5000u);
        EXPECT_EQ(r.partition_trials.size(), 5u);
        EXPECT_GT(r.trials_per_key, 1.0);
        EXPECT_GT(r.bits_per_key, 0.0);
    }
    EXPECT_EQ(work_csv_header(), "gamma,lambda,partition_size,trials_per_key,bits_per_key,wall_seconds");
    auto row = work_csv_row(reports[1]);
    EXPECT_EQ(row.rfind("beta-eps,4,1000,", 0), 0u);
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 5);
}

} // namespace
} // namespace phobic::analysis
