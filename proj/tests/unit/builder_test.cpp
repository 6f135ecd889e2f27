#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "phobic/builder.hpp"
#include "phobic/errors.hpp"
#include "phobic/partitioner.hpp"
#include "test_util.hpp"

namespace phobic {
namespace {

// Smallest p whose placement is free and self-collision free, by plain enumeration.
uint64_t brute_force_seed(std::span<const MasterHash> keys, const SlotSet& slots, uint64_t limit) {
    const uint64_t m = slots.size();
    for (uint64_t p = 0; p < limit; ++p) {
        std::set<uint64_t> seen;
        bool ok = true;
        for (const auto& h : keys) {
            uint64_t q = slot_for(h, p, m);
            if (slots.occupied(q) || !seen.insert(q).second) {
                ok = false;
                break;
            }
        }
        if (ok) return p;
    }
    return limit;
}

MasterHash hash_with_base(uint64_t base, uint64_t m, uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (;;) {
        MasterHash h{rng(), rng()};
        if (position_hash(h, 0, m) == base) return h;
    }
}

void expect_bijection(std::span<const MasterHash> keys, const PartitionSeeds& seeds, const AssignmentTable& table,
                      BucketCount b) {
    const uint64_t m = keys.size();
    std::vector<bool> hit(m, false);
    for (const auto& h : keys) {
        uint32_t bucket = table.bucket_for_hash(normalized_hash(h), b);
        uint64_t q = slot_for(h, seeds.seeds[bucket - 1], m);
        ASSERT_LT(q, m);
        ASSERT_FALSE(hit[q]) << "slot " << q << " used twice";
        hit[q] = true;
    }
}

TEST(Config, Validation) {
    BuildConfig c;
    EXPECT_NO_THROW(c.validate());
    c.lambda = 0;
    EXPECT_THROW(c.validate(), InvalidConfig);
    c = {};
    c.partition_size = 0.5;
    EXPECT_THROW(c.validate(), InvalidConfig);
    c = {};
    c.epsilon = 1.0;
    EXPECT_THROW(c.validate(), InvalidConfig);
    c = {};
    c.seed_cap = 100;
    EXPECT_THROW(c.validate(), InvalidConfig);
    c = {};
    EXPECT_EQ(c.buckets().value, 313u);
    EXPECT_NEAR(c.assignment_spec().epsilon, 0.032, 1e-15);
    c.epsilon = 0.1;
    EXPECT_EQ(c.assignment_spec().epsilon, 0.1);
    c.assignment = AssignmentKind::skew;
    EXPECT_EQ(c.assignment_spec().epsilon, 0.0);
}

TEST(AssignBuckets, UniformExample) {
    AssignmentTable uniform(AssignmentSpec{AssignmentKind::uniform, 0});
    std::vector<MasterHash> keys;
    std::mt19937_64 rng(1);
    // One key in each quarter of (0, 1].
    for (double lo : {0.1, 0.3, 0.6, 0.9}) {
        for (;;) {
            MasterHash h{rng(), rng()};
            double x = normalized_hash(h);
            if (x > lo - 0.05 && x < lo + 0.05) {
                keys.push_back(h);
                break;
            }
        }
    }
    auto bp = assign_buckets(keys, uniform, BucketCount{4});
    for (uint32_t i = 1; i <= 4; ++i) {
        EXPECT_EQ(bp.bucket_size(i), 1u);
        EXPECT_EQ(bp.bucket(i).keys[0], keys[i - 1]);
    }
}

TEST(AssignBuckets, EmptyPartition) {
    AssignmentTable uniform(AssignmentSpec{AssignmentKind::uniform, 0});
    auto bp = assign_buckets({}, uniform, BucketCount{5});
    EXPECT_EQ(bp.num_buckets(), 5u);
    EXPECT_EQ(bp.num_keys(), 0u);
    EXPECT_TRUE(order_buckets(bp).empty());
}

TEST(AssignBuckets, FirstBucketLargerOnAverage) {
    AssignmentTable beps(AssignmentSpec{AssignmentKind::beta_eps, default_epsilon(8, 2500)});
    BucketCount b = BucketCount::for_partition(2500, 8);
    uint64_t first = 0;
    uint64_t last = 0;
    for (int t = 0; t < 1000; ++t) {
        auto keys = testing::random_hashes(2500, 1000 + t);
        auto bp = assign_buckets(keys, beps, b);
        ASSERT_EQ(bp.num_keys(), 2500u);
        first += bp.bucket_size(1);
        last += bp.bucket_size(b.value);
    }
    EXPECT_GT(first, last);
}

TEST(OrderBuckets, Example) {
    // Sizes by index [3, 5, 5, 1].
    std::vector<MasterHash> keys(14);
    BucketedPartition bp(keys, {0, 3, 8, 13, 14});
    EXPECT_EQ(order_buckets(bp), (std::vector<uint32_t>{3, 2, 1, 4}));
    EXPECT_EQ(order_buckets(bp, BucketOrder::decreasing_expected_size), (std::vector<uint32_t>{2, 3, 1, 4}));
}

TEST(OrderBuckets, TiesAndSingle) {
    std::vector<MasterHash> keys(4);
    BucketedPartition equal(keys, {0, 1, 2, 3, 4});
    EXPECT_EQ(order_buckets(equal), (std::vector<uint32_t>{4, 3, 2, 1}));
    BucketedPartition single(std::vector<MasterHash>(2), {0, 0, 2, 2});
    EXPECT_EQ(order_buckets(single), (std::vector<uint32_t>{2}));
}

TEST(SlotSet, NextFreeWraps) {
    SlotSet s(70);
    for (uint64_t q = 5; q < 70; ++q) s.mark(q);
    EXPECT_EQ(s.free_count(), 5u);
    EXPECT_EQ(s.next_free(10), 0u);
    EXPECT_EQ(s.next_free(3), 3u);
    s.mark(0);
    EXPECT_EQ(s.next_free(69), 1u);
}

TEST(SearchBucket, SingletonExample) {
    const uint64_t m = 20;
    MasterHash h = hash_with_base(7, m, 3);
    SlotSet slots(m);
    slots.mark(7);
    slots.mark(8);
    SlotSet copy = slots;
    EXPECT_EQ(search_bucket(Bucket{1, std::span(&h, 1)}, slots, 1000).p, 2u);
    EXPECT_TRUE(slots.occupied(9));
    EXPECT_EQ(search_singleton_fast(h, copy).p, 2u);
}

TEST(SearchSingleton, Examples) {
    const uint64_t m = 20;
    MasterHash h = hash_with_base(7, m, 4);
    SlotSet slots(m);
    EXPECT_EQ(search_singleton_fast(h, slots).p, 0u);

    MasterHash last = hash_with_base(m - 1, m, 5);
    SlotSet full(m);
    for (uint64_t q = 1; q < m; ++q) full.mark(q);
    EXPECT_EQ(search_singleton_fast(last, full).p, 1u);
    EXPECT_EQ(full.free_count(), 0u);
}

TEST(SearchBucket, FullBucketFillsTable) {
    auto keys = testing::random_hashes(6, 6);
    SlotSet slots(6);
    search_bucket(Bucket{1, keys}, slots, uint64_t(1) << 40);
    EXPECT_EQ(slots.free_count(), 0u);
}

TEST(SearchBucket, IdenticalHashesExhaust) {
    std::vector<MasterHash> keys(2, MasterHash{1, 2});
    SlotSet slots(10);
    EXPECT_THROW(search_bucket(Bucket{1, keys}, slots, uint64_t(1) << 40), SeedExhausted);
}

TEST(SearchBucket, SeedCap) {
    auto keys = testing::random_hashes(12, 7);
    SlotSet slots(12);
    // Only s = 0 fits under the cap and its 12 positions are almost surely not distinct.
    EXPECT_THROW(search_bucket(Bucket{1, keys}, slots, 11), SeedExhausted);
}

TEST(SearchBucket, MinimalAgainstBruteForce) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 300; ++t) {
        uint64_t m = 1 + rng() % 64;
        SlotSet slots(m);
        uint64_t occupy = rng() % m;
        for (uint64_t q = 0; q < m && slots.size() - slots.free_count() < occupy; ++q) {
            if (rng() % 2) slots.mark(q);
        }
        uint64_t k = 1 + rng() % std::min<uint64_t>(4, slots.free_count());
        auto keys = testing::random_hashes(k, rng());
        uint64_t expected = brute_force_seed(keys, slots, 20'000'000);
        ASSERT_LT(expected, 20'000'000u);
        SlotSet copy = slots;
        SeedSearcher searcher(copy, uint64_t(1) << 40);
        EXPECT_EQ(searcher.search_bucket(keys).p, expected) << "m=" << m << " k=" << k;
        EXPECT_EQ(copy.free_count(), slots.free_count() - k);
    }
}

TEST(SearchSingleton, EquivalentToGenericSearch) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10'000; ++t) {
        uint64_t m = 1 + rng() % 300;
        SlotSet slots(m);
        uint64_t q0 = rng() % m;
        for (uint64_t q = 0; q < m; ++q) {
            if (q != q0 && rng() % 4 != 0) slots.mark(q);
        }
        MasterHash h{rng(), rng()};
        SlotSet a = slots;
        SlotSet b = slots;
        SeedSearcher fast(a, uint64_t(1) << 40);
        SeedSearcher generic(b, uint64_t(1) << 40);
        ASSERT_EQ(fast.search_singleton(h).p, generic.search_bucket(std::span(&h, 1)).p);
        ASSERT_EQ(fast.trials(), generic.trials());
    }
}

TEST(BuildPartition, SingleKey) {
    auto keys = testing::random_hashes(1, 10);
    BuildConfig config;
    AssignmentTable table(config.assignment_spec());
    auto seeds = build_partition(keys, config, table, config.buckets());
    EXPECT_EQ(seeds.seeds.size(), 313u);
    uint32_t bucket = table.bucket_for_hash(normalized_hash(keys[0]), config.buckets());
    EXPECT_EQ(slot_for(keys[0], seeds.seeds[bucket - 1], 1), 0u);
    EXPECT_EQ(seeds.trial_count, 1u);
}

TEST(BuildPartition, BijectionAndDeterminism) {
    auto keys = testing::random_hashes(2500, 11);
    std::sort(keys.begin(), keys.end());
    BuildConfig config;
    AssignmentTable table(config.assignment_spec());
    auto a = build_partition(keys, config, table, config.buckets());
    expect_bijection(keys, a, table, config.buckets());
    auto b = build_partition(keys, config, table, config.buckets());
    EXPECT_EQ(a.seeds, b.seeds);
    EXPECT_EQ(a.trial_count, b.trial_count);
    uint64_t sum = 0;
    for (uint64_t t : a.bucket_trials) sum += t;
    EXPECT_EQ(sum, a.trial_count);
}

TEST(BuildPartition, FastPathDoesNotChangeSeeds) {
    auto keys = testing::random_hashes(1000, 12);
    std::sort(keys.begin(), keys.end());
    BuildConfig config;
    config.lambda = 5;
    config.partition_size = 1000;
    AssignmentTable table(config.assignment_spec());
    auto a = build_partition(keys, config, table, config.buckets());
    config.singleton_fast_path = false;
    auto b = build_partition(keys, config, table, config.buckets());
    EXPECT_EQ(a.seeds, b.seeds);
    EXPECT_EQ(a.trial_count, b.trial_count);
}

TEST(BuildPartition, SeedsMinimalOnSmallPartitions) {
    std::mt19937_64 rng(13);
    BuildConfig config;
    config.lambda = 4;
    config.partition_size = 64;
    AssignmentTable table(config.assignment_spec());
    BucketCount b = config.buckets();
    for (int t = 0; t < 100; ++t) {
        uint64_t m = 1 + rng() % 64;
        auto keys = testing::random_hashes(m, rng());
        std::sort(keys.begin(), keys.end());
        auto result = build_partition(keys, config, table, b);
        expect_bijection(keys, result, table, b);
        auto bp = assign_buckets(keys, table, b);
        SlotSet slots(m);
        for (uint32_t index : order_buckets(bp)) {
            auto bucket = bp.bucket(index);
            uint64_t expected = brute_force_seed(bucket.keys, slots, 200'000'000);
            ASSERT_EQ(result.seeds[index - 1], expected) << "partition " << t << " bucket " << index;
            for (const auto& h : bucket.keys) slots.mark(slot_for(h, expected, m));
        }
        for (uint32_t i = 1; i <= b.value; ++i) {
            if (bp.bucket_size(i) == 0) {
                ASSERT_EQ(result.seeds[i - 1], 0u);
            }
        }
    }
}

TEST(BuildPartition, LargestFirstNeedsFewerTrials) {
    // Small uniform partitions keep the smallest-first order affordable.
    AssignmentTable table(AssignmentSpec{AssignmentKind::uniform, 0});
    BucketCount b{20};
    const uint64_t m = 30;
    double largest = 0;
    double smallest = 0;
    for (int t = 0; t < 200; ++t) {
        auto keys = testing::random_hashes(m, 5000 + t);
        std::sort(keys.begin(), keys.end());
        auto bp = assign_buckets(keys, table, b);
        auto order = order_buckets(bp);
        for (bool reverse : {false, true}) {
            if (reverse) std::reverse(order.begin(), order.end());
            SlotSet slots(m);
            SeedSearcher searcher(slots, uint64_t(1) << 40);
            for (uint32_t index : order) searcher.search_bucket(bp.bucket(index).keys);
            (reverse ? smallest : largest) += static_cast<double>(searcher.trials());
        }
    }
    EXPECT_LE(largest / 200, smallest / 200);
}

TEST(BuildPartitions, ThreadCountDoesNotMatter) {
    auto hashes = testing::random_hashes(20'000, 14);
    BuildConfig config;
    config.lambda = 5;
    config.partition_size = 1000;
    auto parts = partition(hashes, config.partition_size);
    AssignmentTable table(config.assignment_spec());
    auto one = build_partitions(parts.keys, config, table, config.buckets());
    config.threads = 4;
    auto four = build_partitions(parts.keys, config, table, config.buckets());
    ASSERT_EQ(one.size(), four.size());
    for (size_t j = 0; j < one.size(); ++j) {
        EXPECT_EQ(one[j].seeds, four[j].seeds);
        EXPECT_EQ(one[j].trial_count, four[j].trial_count);
    }
    auto matrix = seed_matrix(one);
    EXPECT_EQ(matrix.size(), one.size() * config.buckets().value);
    EXPECT_EQ(matrix[config.buckets().value + 2], one[1].seeds[2]);
}

TEST(BuildPartitions, WorkCorridorAtLambdaFive) {
    auto hashes = testing::random_hashes(50'000, 15);
    BuildConfig config;
    config.lambda = 5;
    auto parts = partition(hashes, config.partition_size);
    AssignmentTable table(config.assignment_spec());
    auto seeds = build_partitions(parts.keys, config, table, config.buckets());
    uint64_t trials = 0;
    for (const auto& s : seeds) trials += s.trial_count;
    double per_key = static_cast<double>(trials) / hashes.size();
    EXPECT_GE(per_key, std::exp(0.8 * 5));
    EXPECT_LE(per_key, std::exp(1.6 * 5));
}

} // namespace
} // namespace phobic
