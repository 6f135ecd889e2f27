#include "phobic/builder.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "phobic/errors.hpp"

namespace phobic {

AssignmentSpec BuildConfig::assignment_spec() const {
    AssignmentSpec spec{assignment, 0.0};
    if (assignment == AssignmentKind::beta_eps) {
        spec.epsilon = epsilon.value_or(default_epsilon(lambda, partition_size));
    }
    return spec;
}

void BuildConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidConfig("lambda must be > 0");
    if (!(partition_size >= 1.0) || !std::isfinite(partition_size)) {
        throw InvalidConfig("partition size must be >= 1");
    }
    if (epsilon && !(*epsilon >= 0.0 && *epsilon < 1.0)) throw InvalidConfig("epsilon must be in [0, 1)");
    if (static_cast<double>(seed_cap) < partition_size) {
        throw InvalidConfig("seed cap must allow a full displacement sweep (seed_cap >= P)");
    }
    if (partition_size / lambda > 4294967295.0) throw InvalidConfig("too many buckets per partition");
}

BucketedPartition assign_buckets(std::span<const MasterHash> partition, const AssignmentTable& table,
                                 BucketCount buckets) {
    std::vector<uint32_t> index(partition.size());
    std::vector<uint32_t> starts(buckets.value + 1, 0);
    for (size_t k = 0; k < partition.size(); ++k) {
        index[k] = table.bucket_for_hash(normalized_hash(partition[k]), buckets);
        ++starts[index[k]];
    }
    for (uint32_t i = 1; i <= buckets.value; ++i) starts[i] += starts[i - 1];
    std::vector<MasterHash> grouped(partition.size());
    std::vector<uint32_t> cursor(starts.begin(), starts.end() - 1);
    for (size_t k = 0; k < partition.size(); ++k) grouped[cursor[index[k] - 1]++] = partition[k];
    return BucketedPartition(std::move(grouped), std::move(starts));
}

std::vector<uint32_t> order_buckets(const BucketedPartition& buckets, BucketOrder order) {
    std::vector<uint32_t> out;
    out.reserve(buckets.num_buckets());
    for (uint32_t i = 1; i <= buckets.num_buckets(); ++i) {
        if (buckets.bucket_size(i) > 0) out.push_back(i);
    }
    const bool high_index_first = order == BucketOrder::increasing_expected_size;
    std::sort(out.begin(), out.end(), [&](uint32_t a, uint32_t b) {
        uint32_t sa = buckets.bucket_size(a);
        uint32_t sb = buckets.bucket_size(b);
        if (sa != sb) return sa > sb;
        return high_index_first ? a > b : a < b;
    });
    return out;
}

SlotSet::SlotSet(uint64_t m) : words_((m + 63) / 64, 0), m_(m), free_(m) {
    if (m == 0) throw std::invalid_argument("SlotSet needs at least one slot");
    if (m & 63) words_.back() = ~uint64_t(0) << (m & 63);
}

uint64_t SlotSet::next_free(uint64_t from) const {
    uint64_t block = from >> 6;
    uint64_t w = ~words_[block] & (~uint64_t(0) << (from & 63));
    while (w == 0) {
        if (++block == words_.size()) block = 0;
        w = ~words_[block];
    }
    return (block << 6) + static_cast<uint64_t>(std::countr_zero(w));
}

SeedValue SeedSearcher::search_bucket(std::span<const MasterHash> keys) {
    const size_t k = keys.size();
    const uint64_t m = slots_.size();
    if (k == 0) throw std::invalid_argument("search_bucket: empty bucket");
    if (slots_.free_count() < k) throw std::invalid_argument("search_bucket: not enough free slots");

    sorted_.assign(keys.begin(), keys.end());
    std::sort(sorted_.begin(), sorted_.end());
    if (std::adjacent_find(sorted_.begin(), sorted_.end()) != sorted_.end()) {
        throw SeedExhausted("bucket contains identical master hashes");
    }

    positions_.resize(k);
    for (uint64_t s = 0;; ++s) {
        const auto base128 = static_cast<unsigned __int128>(s) * m;
        if (base128 > seed_cap_) throw SeedExhausted("no seed up to the seed cap places the bucket");
        const auto base = static_cast<uint64_t>(base128);

        for (size_t j = 0; j < k; ++j) positions_[j] = position_hash(keys[j], s, m);
        if (k > 1) {
            // A shift by d keeps distinct positions distinct and equal ones equal,
            // so self-collisions are decided once per s.
            scratch_.resize((m + 63) / 64, 0);
            size_t marked = 0;
            for (; marked < k; ++marked) {
                uint64_t q = positions_[marked];
                uint64_t bit = uint64_t(1) << (q & 63);
                if (scratch_[q >> 6] & bit) break;
                scratch_[q >> 6] |= bit;
            }
            for (size_t j = 0; j < marked; ++j) scratch_[positions_[j] >> 6] = 0;
            if (marked < k) continue;
        }

        const uint64_t first = positions_[0];
        uint64_t d = 0;
        while (d < m) {
            uint64_t q0 = first + d;
            if (q0 >= m) q0 -= m;
            uint64_t free = slots_.next_free(q0);
            uint64_t dist = free >= q0 ? free - q0 : free + m - q0;
            if (d + dist >= m) {
                trials_ += m - d;
                break;
            }
            trials_ += dist + 1;
            d += dist;
            if (base + d > seed_cap_) throw SeedExhausted("no seed up to the seed cap places the bucket");

            bool ok = true;
            for (size_t j = 1; j < k; ++j) {
                uint64_t q = positions_[j] + d;
                if (q >= m) q -= m;
                ++trials_;
                if (slots_.occupied(q)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                for (size_t j = 0; j < k; ++j) {
                    uint64_t q = positions_[j] + d;
                    slots_.mark(q >= m ? q - m : q);
                }
                return SeedValue{base + d};
            }
            ++d;
        }
    }
}

SeedValue SeedSearcher::search_singleton(const MasterHash& key) {
    const uint64_t m = slots_.size();
    if (slots_.free_count() == 0) throw std::invalid_argument("search_singleton: no free slot");
    uint64_t start = position_hash(key, 0, m);
    uint64_t free = slots_.next_free(start);
    uint64_t d = free >= start ? free - start : free + m - start;
    trials_ += d + 1;
    if (d > seed_cap_) throw SeedExhausted("no seed up to the seed cap places the bucket");
    slots_.mark(free);
    return SeedValue{d};
}

PartitionSeeds build_partition(std::span<const MasterHash> keys, const BuildConfig& config,
                               const AssignmentTable& table, BucketCount buckets) {
    PartitionSeeds out;
    out.seeds.assign(buckets.value, 0);
    out.bucket_trials.assign(buckets.value, 0);
    const uint64_t m = keys.size();
    if (m == 0) return out;

    BucketedPartition bucketed = assign_buckets(keys, table, buckets);
    SlotSet slots(m);
    SeedSearcher searcher(slots, config.seed_cap);
    for (uint32_t index : order_buckets(bucketed, config.order)) {
        uint64_t before = searcher.trials();
        Bucket bucket = bucketed.bucket(index);
        SeedValue seed = bucket.keys.size() == 1 && config.singleton_fast_path
                             ? searcher.search_singleton(bucket.keys[0])
                             : searcher.search_bucket(bucket.keys);
        out.seeds[index - 1] = seed.p;
        out.bucket_trials[index - 1] = searcher.trials() - before;
    }
    out.trial_count = searcher.trials();
    return out;
}

std::vector<PartitionSeeds> build_partitions(const PartitionedKeys& keys, const BuildConfig& config,
                                             const AssignmentTable& table, BucketCount buckets) {
    const uint64_t num = keys.num_partitions();
    std::vector<PartitionSeeds> out(num);
    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = static_cast<unsigned>(std::min<uint64_t>(threads, num));

    if (threads <= 1) {
        for (uint64_t j = 0; j < num; ++j) out[j] = build_partition(keys.partition(j), config, table, buckets);
        return out;
    }

    std::atomic<uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (uint64_t j; !failed.load(std::memory_order_relaxed) && (j = next.fetch_add(1)) < num;) {
            try {
                out[j] = build_partition(keys.partition(j), config, table, buckets);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return out;
}

std::vector<uint64_t> seed_matrix(std::span<const PartitionSeeds> partitions) {
    std::vector<uint64_t> out;
    if (partitions.empty()) return out;
    out.reserve(partitions.size() * partitions[0].seeds.size());
    for (const auto& p : partitions) out.insert(out.end(), p.seeds.begin(), p.seeds.end());
    return out;
}

} // namespace phobic
