#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "phobic/bit_vector.hpp"
#include "phobic/byte_io.hpp"

namespace phobic {

/// Fixed-width packing; the width is the bit length of the largest value.
class CompactVector {
public:
    CompactVector() = default;

    static CompactVector encode(std::span<const uint64_t> values);
    /// Packs with an explicit width; every value must fit.
    static CompactVector encode(std::span<const uint64_t> values, unsigned width);
    static CompactVector from_payload(uint64_t count, unsigned width, BitVector payload);

    uint64_t get(uint64_t i) const { return payload_.get_bits(i * width_, width_); }
    uint64_t size() const { return count_; }
    unsigned width() const { return width_; }
    const BitVector& payload() const { return payload_; }

    friend bool operator==(const CompactVector&, const CompactVector&) = default;

private:
    BitVector payload_;
    uint64_t count_ = 0;
    unsigned width_ = 0;
};

/// b in [0, 64] minimising sum(b + (v >> b) + 1); ties go to the smaller b.
unsigned rice_parameter(std::span<const uint64_t> values);

/// Exact Golomb-Rice payload size sum(b + (v >> b) + 1) in bits.
uint64_t rice_payload_bits(std::span<const uint64_t> values, unsigned b);

/// Golomb-Rice coding: the low b bits are packed, the high part is unary
/// (zeros closed by a one) and located through a select structure.
class RiceVector {
public:
    RiceVector() = default;

    static RiceVector encode(std::span<const uint64_t> values, unsigned b);
    static RiceVector encode(std::span<const uint64_t> values) { return encode(values, rice_parameter(values)); }
    static RiceVector from_parts(CompactVector lows, BitVector highs, std::vector<uint64_t> samples);

    uint64_t get(uint64_t i) const {
        uint64_t start = i == 0 ? 0 : select_.select1(highs_, i - 1) + 1;
        auto words = highs_.words();
        uint64_t block = start >> 6;
        uint64_t w = words[block] >> (start & 63);
        uint64_t high;
        if (w != 0) {
            high = static_cast<uint64_t>(std::countr_zero(w));
        } else {
            high = 64 - (start & 63);
            while ((w = words[++block]) == 0) high += 64;
            high += static_cast<uint64_t>(std::countr_zero(w));
        }
        uint64_t hi_part = b_ == 64 ? 0 : high << b_;
        return hi_part | lows_.get(i);
    }

    uint64_t size() const { return lows_.size(); }
    unsigned parameter() const { return b_; }
    const CompactVector& lows() const { return lows_; }
    const BitVector& highs() const { return highs_; }
    const SelectIndex& select() const { return select_; }

private:
    CompactVector lows_;
    BitVector highs_;
    SelectIndex select_;
    unsigned b_ = 0;
};

enum class EncoderKind : uint8_t { compact = 0, rice = 1 };

/// One integer sequence stored either Compact or Rice.
class SequenceEncoder {
public:
    SequenceEncoder() = default;
    explicit SequenceEncoder(CompactVector v) : impl_(std::move(v)) {}
    explicit SequenceEncoder(RiceVector v) : impl_(std::move(v)) {}

    static SequenceEncoder encode(EncoderKind kind, std::span<const uint64_t> values);

    EncoderKind kind() const { return impl_.index() == 0 ? EncoderKind::compact : EncoderKind::rice; }

    uint64_t get(uint64_t i) const {
        if (const auto* c = std::get_if<CompactVector>(&impl_)) return c->get(i);
        return std::get<RiceVector>(impl_).get(i);
    }

    uint64_t size() const {
        return std::visit([](const auto& v) { return v.size(); }, impl_);
    }

    /// Width for Compact, b for Rice.
    unsigned parameter() const;

    /// Serialized size including the 10-byte header.
    uint64_t serialized_bits() const;

    /// Writes kind tag (`tag_base` + kind), parameter, count and payload.
    void serialize(ByteWriter& out, uint8_t tag_base = 0) const;
    static SequenceEncoder deserialize(ByteReader& in, uint8_t tag_base = 0);

private:
    std::variant<CompactVector, RiceVector> impl_;
};

/// B encoders; encoder i holds the seed of bucket i+1 from every partition.
/// The first `compact_prefix` encoders are Compact, the rest Rice.
class InterleavedSeeds {
public:
    InterleavedSeeds() = default;

    /// `seeds` is partition-major with `buckets` columns.
    static InterleavedSeeds build(std::span<const uint64_t> seeds, uint32_t buckets, uint32_t compact_prefix);

    /// Seed of 1-based bucket `i` in partition `j`; throws std::out_of_range.
    uint64_t seed_at(uint64_t j, uint32_t i) const;
    uint64_t seed_at_unchecked(uint64_t j, uint32_t i) const { return encoders_[i - 1].get(j); }

    uint32_t buckets() const { return static_cast<uint32_t>(encoders_.size()); }
    uint64_t num_partitions() const { return num_partitions_; }
    uint32_t compact_prefix() const { return compact_prefix_; }
    const std::vector<SequenceEncoder>& encoders() const { return encoders_; }

    /// Size of the encoder section (bucket count field plus every encoder).
    uint64_t total_bits() const;

    void serialize(ByteWriter& out) const;
    /// Reads `buckets` encoders after the bucket count was already consumed.
    static InterleavedSeeds deserialize(ByteReader& in, uint32_t buckets, uint64_t num_partitions);

private:
    std::vector<SequenceEncoder> encoders_;
    uint64_t num_partitions_ = 0;
    uint32_t compact_prefix_ = 0;
};

/// Every seed in one encoder, partition-major.
class MonoSeeds {
public:
    /// Wire tag offset that marks the single encoder as a mono layout.
    static constexpr uint8_t kTagBase = 2;

    MonoSeeds() = default;

    static MonoSeeds build(std::span<const uint64_t> seeds, uint32_t buckets, EncoderKind kind);

    uint64_t seed_at(uint64_t j, uint32_t i) const;
    uint64_t seed_at_unchecked(uint64_t j, uint32_t i) const {
        return encoder_.get(j * buckets_ + (i - 1));
    }

    uint32_t buckets() const { return buckets_; }
    uint64_t num_partitions() const { return buckets_ == 0 ? 0 : encoder_.size() / buckets_; }
    const SequenceEncoder& encoder() const { return encoder_; }

    uint64_t total_bits() const;

    void serialize(ByteWriter& out) const;
    static MonoSeeds deserialize(ByteReader& in, uint32_t buckets, uint64_t num_partitions);

private:
    SequenceEncoder encoder_;
    uint32_t buckets_ = 0;
};

} // namespace phobic
