#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "phobic/partitioner.hpp"
#include "test_util.hpp"

namespace phobic {
namespace {

TEST(PartitionCount, Rounding) {
    EXPECT_EQ(partition_count(10'000, 2500), 4u);
    EXPECT_EQ(partition_count(1, 2500), 1u);
    EXPECT_EQ(partition_count(3749, 2500), 1u);
    EXPECT_EQ(partition_count(3750, 2500), 2u);
    EXPECT_EQ(partition_count(1'000'000, 2500), 400u);
}

TEST(Layout, ExampleDeltas) {
    std::vector<uint64_t> sizes{2510, 2480, 2505, 2505};
    auto layout = PartitionLayout::from_sizes(sizes);
    EXPECT_EQ(layout.n(), 10'000u);
    EXPECT_EQ(layout.num_partitions(), 4u);
    EXPECT_EQ(layout.deltas(), (std::vector<int64_t>{0, 10, -10, -5}));
    EXPECT_EQ(layout.offset(2), 4990u);
    EXPECT_EQ(layout.offset(4), 10'000u);
    EXPECT_EQ(layout.delta_width(), 5u);
    for (uint64_t j = 0; j < 4; ++j) EXPECT_EQ(layout.partition_size(j), sizes[j]);
    EXPECT_THROW(layout.offset(5), std::out_of_range);
}

TEST(Layout, ZeroWidthWhenExact) {
    std::vector<uint64_t> sizes{100, 100, 100};
    auto layout = PartitionLayout::from_sizes(sizes);
    EXPECT_EQ(layout.delta_width(), 0u);
    EXPECT_EQ(layout.packed_deltas().size(), 0u);
    EXPECT_EQ(layout.offset(2), 200u);
}

TEST(Layout, ExpectedOffsetRoundsHalfUp) {
    std::vector<uint64_t> sizes{1, 1, 1, 2};
    auto layout = PartitionLayout::from_sizes(sizes);
    // 5 / 4 * j: 0, 1.25, 2.5, 3.75, 5
    EXPECT_EQ(layout.expected_offset(1), 1u);
    EXPECT_EQ(layout.expected_offset(2), 3u);
    EXPECT_EQ(layout.expected_offset(3), 4u);
    for (uint64_t j = 0; j <= 4; ++j) EXPECT_EQ(layout.offset(j), std::min<uint64_t>(j, 3) + (j == 4 ? 2 : 0));
}

TEST(Layout, RandomSizesRoundTrip) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<uint64_t> sizes(1 + rng() % 50);
        for (auto& s : sizes) s = rng() % 5000;
        sizes[0] += 1;
        auto layout = PartitionLayout::from_sizes(sizes);
        uint64_t acc = 0;
        for (uint64_t j = 0; j < sizes.size(); ++j) {
            ASSERT_EQ(layout.offset(j), acc);
            ASSERT_EQ(layout.offset_unchecked(j), acc);
            acc += sizes[j];
        }
        ASSERT_EQ(layout.offset(sizes.size()), acc);
        auto rebuilt = PartitionLayout::from_packed(layout.n(), layout.num_partitions(), layout.delta_width(),
                                                    layout.packed_deltas());
        ASSERT_EQ(rebuilt, layout);
        // The width is the smallest two's complement width holding every delta.
        int64_t max_abs = 0;
        for (int64_t d : layout.deltas()) max_abs = std::max(max_abs, d < 0 ? -d : d);
        unsigned expected = max_abs == 0 ? 0 : std::bit_width(static_cast<uint64_t>(max_abs)) + 1;
        ASSERT_EQ(layout.delta_width(), expected);
    }
}

TEST(Partition, SortedGroupsAndCounts) {
    auto hashes = testing::random_hashes(100'000, 21);
    auto result = partition(hashes, 2500);
    EXPECT_EQ(result.keys.num_partitions(), 40u);
    EXPECT_EQ(result.keys.size(), hashes.size());
    for (uint64_t j = 0; j < 40; ++j) {
        auto part = result.keys.partition(j);
        EXPECT_TRUE(std::is_sorted(part.begin(), part.end()));
        EXPECT_EQ(part.size(), result.layout.partition_size(j));
        for (const auto& h : part) ASSERT_EQ(partition_of(h, 40), j);
    }
    auto sizes = result.keys.sizes();
    EXPECT_EQ(std::accumulate(sizes.begin(), sizes.end(), uint64_t(0)), hashes.size());
}

TEST(Partition, SizesAreBinomial) {
    auto hashes = testing::random_hashes(100'000, 22);
    auto result = partition(hashes, 2500);
    std::vector<uint64_t> sizes = result.keys.sizes();
    EXPECT_LT(testing::chi_square(sizes, 2500.0), testing::chi_square_99(39));
}

TEST(Partition, IndependentOfInputOrder) {
    auto hashes = testing::random_hashes(20'000, 23);
    auto a = partition(hashes, 1000);
    std::shuffle(hashes.begin(), hashes.end(), std::mt19937_64(1));
    auto b = partition(hashes, 1000);
    EXPECT_EQ(a.layout, b.layout);
    for (uint64_t j = 0; j < a.keys.num_partitions(); ++j) {
        auto pa = a.keys.partition(j);
        auto pb = b.keys.partition(j);
        ASSERT_TRUE(std::equal(pa.begin(), pa.end(), pb.begin(), pb.end()));
    }
}

TEST(Partition, Errors) {
    std::vector<MasterHash> none;
    EXPECT_THROW(partition(none, 2500), std::invalid_argument);
    auto hashes = testing::random_hashes(10, 1);
    EXPECT_THROW(partition(hashes, 0.5), std::invalid_argument);
}

TEST(Partition, SingleKey) {
    auto hashes = testing::random_hashes(1, 1);
    auto result = partition(hashes, 2500);
    EXPECT_EQ(result.layout.num_partitions(), 1u);
    EXPECT_EQ(result.layout.offset(1), 1u);
}

} // namespace
} // namespace phobic
