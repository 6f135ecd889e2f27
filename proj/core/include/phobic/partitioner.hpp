#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phobic/bit_vector.hpp"
#include "phobic/hashing.hpp"

namespace phobic {

/// Partition offsets stored as signed differences to their expectation
/// round(j * n / num_partitions), packed at one fixed bit width.
class PartitionLayout {
public:
    PartitionLayout() = default;

    /// Builds the layout from actual partition sizes (n is their sum).
    static PartitionLayout from_sizes(std::span<const uint64_t> sizes);

    /// Rebuilds a layout from its stored form; used by deserialization.
    static PartitionLayout from_packed(uint64_t n, uint64_t num_partitions, unsigned width,
                                       BitVector packed);

    uint64_t n() const { return n_; }
    uint64_t num_partitions() const { return num_partitions_; }
    unsigned delta_width() const { return width_; }
    const BitVector& packed_deltas() const { return packed_; }

    /// Global offset of partition j, 0 <= j <= num_partitions.
    uint64_t offset(uint64_t j) const;

    /// offset(j) for j < num_partitions without bounds checks.
    uint64_t offset_unchecked(uint64_t j) const {
        return expected_offset(j) + static_cast<uint64_t>(delta(j));
    }

    int64_t delta(uint64_t j) const {
        if (width_ == 0) return 0;
        uint64_t raw = packed_.get_bits(j * width_, width_);
        // Sign extension of a width-bit two's complement field.
        unsigned shift = 64 - width_;
        return static_cast<int64_t>(raw << shift) >> shift;
    }

    uint64_t expected_offset(uint64_t j) const {
        // Round half up of j * n / num_partitions.
        auto num = static_cast<unsigned __int128>(j) * n_ * 2 + num_partitions_;
        return static_cast<uint64_t>(num / (static_cast<unsigned __int128>(num_partitions_) * 2));
    }

    uint64_t partition_size(uint64_t j) const { return offset(j + 1) - offset(j); }

    std::vector<int64_t> deltas() const;

    friend bool operator==(const PartitionLayout&, const PartitionLayout&) = default;

private:
    uint64_t n_ = 0;
    uint64_t num_partitions_ = 0;
    unsigned width_ = 0;
    BitVector packed_;
};

/// max(1, round(n / P)).
uint64_t partition_count(uint64_t n, double partition_size);

/// Fixed-point partition selector floor(hi * num_partitions / 2^64).
inline uint64_t partition_of(const MasterHash& h, uint64_t num_partitions) {
    return detail::mul_high(h.hi, num_partitions);
}

/// Hashes grouped by partition in one flat array. Within a partition the
/// hashes are sorted, which makes everything downstream independent of input order.
class PartitionedKeys {
public:
    PartitionedKeys() = default;
    PartitionedKeys(std::vector<MasterHash> hashes, std::vector<uint64_t> starts)
        : hashes_(std::move(hashes)), starts_(std::move(starts)) {}

    uint64_t num_partitions() const { return starts_.size() - 1; }
    uint64_t size() const { return hashes_.size(); }

    std::span<const MasterHash> partition(uint64_t j) const {
        return std::span(hashes_).subspan(starts_[j], starts_[j + 1] - starts_[j]);
    }

    std::vector<uint64_t> sizes() const;

private:
    std::vector<MasterHash> hashes_;
    std::vector<uint64_t> starts_{0};
};

struct PartitionResult {
    PartitionedKeys keys;
    PartitionLayout layout;
};

/// Splits hashes into partitions of expected size P. Throws
/// std::invalid_argument for empty input or P < 1.
PartitionResult partition(std::span<const MasterHash> hashes, double partition_size);

} // namespace phobic
