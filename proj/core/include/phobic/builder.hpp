#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phobic/bucket_assignment.hpp"
#include "phobic/hashing.hpp"
#include "phobic/partitioner.hpp"

namespace phobic {

/// Tie-break among buckets of equal actual size. Buckets are always processed
/// largest first; the tie-break decides the secondary order.
enum class BucketOrder : uint8_t {
    /// Higher bucket index (smaller expected size) first. The default.
    increasing_expected_size,
    /// Lower bucket index (larger expected size) first.
    decreasing_expected_size,
};

struct BuildConfig {
    double lambda = 8.0;
    double partition_size = 2500.0;
    AssignmentKind assignment = AssignmentKind::beta_eps;
    /// Overrides lambda / (5 sqrt(P)) for beta_eps.
    std::optional<double> epsilon;
    uint64_t seed_cap = uint64_t(1) << 40;
    GlobalSeed global_seed{};
    BucketOrder order = BucketOrder::increasing_expected_size;
    bool singleton_fast_path = true;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 1;

    AssignmentSpec assignment_spec() const;
    BucketCount buckets() const { return BucketCount::for_partition(partition_size, lambda); }
    /// Throws InvalidConfig.
    void validate() const;
};

struct SeedValue {
    uint64_t p = 0;

    uint64_t seed_counter(uint64_t m) const { return p / m; }
    uint64_t displacement(uint64_t m) const { return p % m; }
};

/// Final slot of a key inside its partition: (h(x, p / m) + p) mod m.
inline uint64_t slot_for(const MasterHash& h, uint64_t p, uint64_t m) {
    uint64_t s = p / m;
    uint64_t pos = position_hash(h, s, m) + (p - s * m);
    return pos >= m ? pos - m : pos;
}

struct Bucket {
    uint32_t index = 0; // 1-based
    std::span<const MasterHash> keys;
};

/// A partition's keys grouped by bucket, in key order inside each bucket.
class BucketedPartition {
public:
    BucketedPartition() = default;
    BucketedPartition(std::vector<MasterHash> keys, std::vector<uint32_t> starts)
        : keys_(std::move(keys)), starts_(std::move(starts)) {}

    uint32_t num_buckets() const { return static_cast<uint32_t>(starts_.size() - 1); }
    uint32_t bucket_size(uint32_t index) const { return starts_[index] - starts_[index - 1]; }
    Bucket bucket(uint32_t index) const {
        return Bucket{index, std::span(keys_).subspan(starts_[index - 1], bucket_size(index))};
    }
    uint64_t num_keys() const { return keys_.size(); }

private:
    std::vector<MasterHash> keys_;
    std::vector<uint32_t> starts_{0};
};

BucketedPartition assign_buckets(std::span<const MasterHash> partition, const AssignmentTable& table,
                                 BucketCount buckets);

/// Non-empty bucket indices, largest first, ties resolved by `order`.
std::vector<uint32_t> order_buckets(const BucketedPartition& buckets,
                                    BucketOrder order = BucketOrder::increasing_expected_size);

/// Occupancy of the m slots of one partition. Bits past m are kept set so
/// that word scans never report them as free.
class SlotSet {
public:
    explicit SlotSet(uint64_t m);

    uint64_t size() const { return m_; }
    uint64_t free_count() const { return free_; }
    bool occupied(uint64_t slot) const { return (words_[slot >> 6] >> (slot & 63)) & 1; }
    void mark(uint64_t slot) {
        words_[slot >> 6] |= uint64_t(1) << (slot & 63);
        --free_;
    }

    /// First free slot at or after `from`, wrapping around. Requires free_count() > 0.
    uint64_t next_free(uint64_t from) const;

private:
    std::vector<uint64_t> words_;
    uint64_t m_;
    uint64_t free_;
};

/// Seed search over one partition table. Trials count candidate-position
/// evaluations: one per key checked against the table per tested (s, d).
/// A counter s whose positions already collide inside the bucket is skipped
/// without testing any displacement.
class SeedSearcher {
public:
    SeedSearcher(SlotSet& slots, uint64_t seed_cap) : slots_(slots), seed_cap_(seed_cap) {}

    /// Smallest p = s * m + d placing every key on a free slot; marks the slots.
    /// Throws SeedExhausted when no p <= seed_cap works.
    SeedValue search_bucket(std::span<const MasterHash> keys);

    /// Direct displacement to the first free slot at or after h(x, 0).
    SeedValue search_singleton(const MasterHash& key);

    uint64_t trials() const { return trials_; }

private:
    SlotSet& slots_;
    uint64_t seed_cap_;
    uint64_t trials_ = 0;
    std::vector<uint64_t> positions_;
    std::vector<uint64_t> scratch_;
    std::vector<MasterHash> sorted_;
};

inline SeedValue search_bucket(const Bucket& bucket, SlotSet& slots, uint64_t seed_cap) {
    return SeedSearcher(slots, seed_cap).search_bucket(bucket.keys);
}

inline SeedValue search_singleton_fast(const MasterHash& key, SlotSet& slots) {
    return SeedSearcher(slots, ~uint64_t(0)).search_singleton(key);
}

struct PartitionSeeds {
    std::vector<uint64_t> seeds;         // one per bucket, 0 for empty buckets
    std::vector<uint64_t> bucket_trials; // per bucket index
    uint64_t trial_count = 0;
};

/// Places all keys of one partition. `keys` must be sorted for canonical output.
PartitionSeeds build_partition(std::span<const MasterHash> keys, const BuildConfig& config,
                               const AssignmentTable& table, BucketCount buckets);

/// Builds every partition, in parallel when config.threads != 1. The result
/// is identical for any thread count.
std::vector<PartitionSeeds> build_partitions(const PartitionedKeys& keys, const BuildConfig& config,
                                             const AssignmentTable& table, BucketCount buckets);

/// Partition-major seed matrix, the input of the seed encoders.
std::vector<uint64_t> seed_matrix(std::span<const PartitionSeeds> partitions);

} // namespace phobic
