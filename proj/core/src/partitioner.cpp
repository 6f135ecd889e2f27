#include "phobic/partitioner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace phobic {

PartitionLayout PartitionLayout::from_sizes(std::span<const uint64_t> sizes) {
    if (sizes.empty()) throw std::invalid_argument("layout needs at least one partition");
    PartitionLayout layout;
    layout.num_partitions_ = sizes.size();
    for (uint64_t s : sizes) layout.n_ += s;

    std::vector<int64_t> deltas(sizes.size());
    uint64_t offset = 0;
    uint64_t max_abs = 0;
    for (uint64_t j = 0; j < sizes.size(); ++j) {
        deltas[j] = static_cast<int64_t>(offset) - static_cast<int64_t>(layout.expected_offset(j));
        max_abs = std::max(max_abs, static_cast<uint64_t>(std::abs(deltas[j])));
        offset += sizes[j];
    }
    layout.width_ = max_abs == 0 ? 0 : static_cast<unsigned>(std::bit_width(max_abs)) + 1;
    layout.packed_ = BitVector(sizes.size() * layout.width_);
    for (uint64_t j = 0; j < sizes.size(); ++j) {
        layout.packed_.set_bits(j * layout.width_, static_cast<uint64_t>(deltas[j]), layout.width_);
    }
    return layout;
}

PartitionLayout PartitionLayout::from_packed(uint64_t n, uint64_t num_partitions, unsigned width,
                                             BitVector packed) {
    PartitionLayout layout;
    layout.n_ = n;
    layout.num_partitions_ = num_partitions;
    layout.width_ = width;
    layout.packed_ = std::move(packed);
    return layout;
}

uint64_t PartitionLayout::offset(uint64_t j) const {
    if (j > num_partitions_) throw std::out_of_range("partition index out of range");
    if (j == num_partitions_) return n_;
    return offset_unchecked(j);
}

std::vector<int64_t> PartitionLayout::deltas() const {
    std::vector<int64_t> out(num_partitions_);
    for (uint64_t j = 0; j < num_partitions_; ++j) out[j] = delta(j);
    return out;
}

uint64_t partition_count(uint64_t n, double partition_size) {
    double count = std::round(static_cast<double>(n) / partition_size);
    return count < 1.0 ? 1 : static_cast<uint64_t>(count);
}

std::vector<uint64_t> PartitionedKeys::sizes() const {
    std::vector<uint64_t> out(num_partitions());
    for (uint64_t j = 0; j < out.size(); ++j) out[j] = starts_[j + 1] - starts_[j];
    return out;
}

PartitionResult partition(std::span<const MasterHash> hashes, double partition_size) {
    if (hashes.empty()) throw std::invalid_argument("partition: no keys");
    if (!(partition_size >= 1.0)) throw std::invalid_argument("partition: P must be >= 1");

    const uint64_t n = hashes.size();
    const uint64_t num = partition_count(n, partition_size);

    std::vector<uint64_t> starts(num + 1, 0);
    for (const auto& h : hashes) ++starts[partition_of(h, num) + 1];
    std::vector<uint64_t> sizes(num);
    for (uint64_t j = 0; j < num; ++j) {
        sizes[j] = starts[j + 1];
        starts[j + 1] += starts[j];
    }
    if (num > n && std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) {
        throw std::invalid_argument("partition: more partitions than keys");
    }

    std::vector<MasterHash> grouped(n);
    std::vector<uint64_t> cursor(starts.begin(), starts.end() - 1);
    for (const auto& h : hashes) grouped[cursor[partition_of(h, num)]++] = h;
    for (uint64_t j = 0; j < num; ++j) {
        std::sort(grouped.begin() + starts[j], grouped.begin() + starts[j + 1]);
    }

    return PartitionResult{PartitionedKeys(std::move(grouped), std::move(starts)),
                           PartitionLayout::from_sizes(sizes)};
}

} // namespace phobic
