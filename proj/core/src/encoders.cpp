#include "phobic/encoders.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace phobic {

namespace {

constexpr uint64_t kEncoderHeaderBits = 8 + 8 + 64;

uint64_t padded(uint64_t bits) { return (bits + 7) / 8 * 8; }

uint64_t shifted(uint64_t v, unsigned b) { return b >= 64 ? 0 : v >> b; }

// Length in bits of a Rice payload (lows followed by highs) starting at the
// reader's position: scans the unary part until `count` terminators were seen.
uint64_t scan_rice_payload(std::span<const uint8_t> data, uint64_t count, unsigned b) {
    uint64_t pos = count * b;
    uint64_t ones = 0;
    const uint64_t limit = static_cast<uint64_t>(data.size()) * 8;
    while (ones < count) {
        if (pos >= limit) throw FormatError("truncated Rice payload");
        uint8_t byte = data[pos / 8];
        unsigned bit = pos % 8;
        if (bit == 0 && byte == 0) {
            pos += 8;
            continue;
        }
        ones += (byte >> bit) & 1;
        ++pos;
    }
    return pos;
}

} // namespace

CompactVector CompactVector::encode(std::span<const uint64_t> values) {
    uint64_t max = 0;
    for (uint64_t v : values) max = std::max(max, v);
    return encode(values, static_cast<unsigned>(std::bit_width(max)));
}

CompactVector CompactVector::encode(std::span<const uint64_t> values, unsigned width) {
    if (width > 64) throw std::invalid_argument("compact width above 64");
    CompactVector out;
    out.count_ = values.size();
    out.width_ = width;
    out.payload_ = BitVector(out.count_ * width);
    for (uint64_t i = 0; i < values.size(); ++i) {
        if (width < 64 && (values[i] >> width) != 0) {
            throw std::invalid_argument("value does not fit compact width");
        }
        out.payload_.set_bits(i * width, values[i], width);
    }
    return out;
}

CompactVector CompactVector::from_payload(uint64_t count, unsigned width, BitVector payload) {
    CompactVector out;
    out.count_ = count;
    out.width_ = width;
    out.payload_ = std::move(payload);
    return out;
}

uint64_t rice_payload_bits(std::span<const uint64_t> values, unsigned b) {
    unsigned __int128 total = static_cast<unsigned __int128>(values.size()) * (b + 1);
    for (uint64_t v : values) total += shifted(v, b);
    return total > ~uint64_t(0) ? ~uint64_t(0) : static_cast<uint64_t>(total);
}

unsigned rice_parameter(std::span<const uint64_t> values) {
    unsigned best = 0;
    uint64_t best_bits = rice_payload_bits(values, 0);
    for (unsigned b = 1; b <= 64; ++b) {
        uint64_t bits = rice_payload_bits(values, b);
        if (bits < best_bits) {
            best_bits = bits;
            best = b;
        }
        // Once every high part is zero, larger b only adds low bits.
        if (bits == values.size() * static_cast<uint64_t>(b + 1)) break;
    }
    return best;
}

RiceVector RiceVector::encode(std::span<const uint64_t> values, unsigned b) {
    if (b > 64) throw std::invalid_argument("Rice parameter above 64");
    std::vector<uint64_t> lows(values.size());
    uint64_t low_mask = b == 64 ? ~uint64_t(0) : (uint64_t(1) << b) - 1;
    uint64_t highs_len = 0;
    for (uint64_t i = 0; i < values.size(); ++i) {
        lows[i] = values[i] & low_mask;
        highs_len += shifted(values[i], b) + 1;
    }
    RiceVector out;
    out.b_ = b;
    out.lows_ = CompactVector::encode(lows, b);
    out.highs_ = BitVector(highs_len);
    uint64_t pos = 0;
    for (uint64_t v : values) {
        pos += shifted(v, b);
        out.highs_.set(pos++);
    }
    out.select_ = SelectIndex(out.highs_);
    return out;
}

RiceVector RiceVector::from_parts(CompactVector lows, BitVector highs, std::vector<uint64_t> samples) {
    RiceVector out;
    out.b_ = lows.width();
    out.lows_ = std::move(lows);
    out.highs_ = std::move(highs);
    out.select_ = SelectIndex(out.highs_, std::move(samples));
    return out;
}

SequenceEncoder SequenceEncoder::encode(EncoderKind kind, std::span<const uint64_t> values) {
    if (kind == EncoderKind::compact) return SequenceEncoder(CompactVector::encode(values));
    return SequenceEncoder(RiceVector::encode(values));
}

unsigned SequenceEncoder::parameter() const {
    if (const auto* c = std::get_if<CompactVector>(&impl_)) return c->width();
    return std::get<RiceVector>(impl_).parameter();
}

uint64_t SequenceEncoder::serialized_bits() const {
    if (const auto* c = std::get_if<CompactVector>(&impl_)) {
        return kEncoderHeaderBits + padded(c->size() * c->width());
    }
    const auto& r = std::get<RiceVector>(impl_);
    uint64_t payload = r.size() * r.parameter() + r.highs().size();
    return kEncoderHeaderBits + padded(payload) + 64 * r.select().samples().size();
}

void SequenceEncoder::serialize(ByteWriter& out, uint8_t tag_base) const {
    out.u8(static_cast<uint8_t>(tag_base + static_cast<uint8_t>(kind())));
    out.u8(static_cast<uint8_t>(parameter()));
    out.u64(size());
    if (const auto* c = std::get_if<CompactVector>(&impl_)) {
        out.bits(c->payload(), c->size() * c->width());
        return;
    }
    const auto& r = std::get<RiceVector>(impl_);
    BitVector payload = r.lows().payload();
    payload.resize(r.size() * r.parameter());
    auto highs = r.highs().words();
    uint64_t remaining = r.highs().size();
    for (uint64_t w = 0; remaining > 0; ++w) {
        unsigned take = remaining < 64 ? static_cast<unsigned>(remaining) : 64;
        payload.append_bits(highs[w], take);
        remaining -= take;
    }
    out.bits(payload, payload.size());
    for (uint64_t s : r.select().samples()) out.u64(s);
}

SequenceEncoder SequenceEncoder::deserialize(ByteReader& in, uint8_t tag_base) {
    uint8_t tag = in.u8();
    if (tag < tag_base || tag - tag_base > 1) {
        throw FormatError("unknown encoder kind " + std::to_string(tag));
    }
    auto kind = static_cast<EncoderKind>(tag - tag_base);
    unsigned param = in.u8();
    if (param > 64) throw FormatError("encoder parameter above 64");
    uint64_t count = in.u64();

    if (kind == EncoderKind::compact) {
        if (param != 0 && count > (~uint64_t(0) >> 7) / param) throw FormatError("encoder too large");
        uint64_t nbits = count * param;
        in.need((nbits + 7) / 8);
        return SequenceEncoder(CompactVector::from_payload(count, param, in.bits(nbits)));
    }

    if (count > static_cast<uint64_t>(in.remaining()) * 8) throw FormatError("truncated Rice payload");
    uint64_t nbits = scan_rice_payload(in.rest(), count, param);
    BitVector payload = in.bits(nbits);
    uint64_t low_bits = count * param;
    BitVector lows(low_bits);
    for (uint64_t pos = 0; pos < low_bits; pos += 64) {
        unsigned take = low_bits - pos < 64 ? static_cast<unsigned>(low_bits - pos) : 64;
        lows.set_bits(pos, payload.get_bits(pos, take), take);
    }
    BitVector highs(nbits - low_bits);
    for (uint64_t pos = 0; pos < highs.size(); pos += 64) {
        unsigned take = highs.size() - pos < 64 ? static_cast<unsigned>(highs.size() - pos) : 64;
        highs.set_bits(pos, payload.get_bits(low_bits + pos, take), take);
    }
    uint64_t num_samples = count == 0 ? 0 : (count - 1) / SelectIndex::kSampleRate;
    in.need(num_samples * 8);
    std::vector<uint64_t> samples(num_samples);
    for (auto& s : samples) s = in.u64();
    if (samples != SelectIndex::compute_samples(highs)) throw FormatError("select samples mismatch");
    return SequenceEncoder(RiceVector::from_parts(CompactVector::from_payload(count, param, std::move(lows)),
                                                  std::move(highs), std::move(samples)));
}

InterleavedSeeds InterleavedSeeds::build(std::span<const uint64_t> seeds, uint32_t buckets,
                                         uint32_t compact_prefix) {
    if (buckets == 0 || seeds.size() % buckets != 0) {
        throw std::invalid_argument("seed matrix does not have the given bucket count");
    }
    InterleavedSeeds out;
    out.num_partitions_ = seeds.size() / buckets;
    out.compact_prefix_ = std::min(compact_prefix, buckets);
    out.encoders_.reserve(buckets);
    std::vector<uint64_t> column(out.num_partitions_);
    for (uint32_t i = 0; i < buckets; ++i) {
        for (uint64_t j = 0; j < out.num_partitions_; ++j) column[j] = seeds[j * buckets + i];
        auto kind = i < out.compact_prefix_ ? EncoderKind::compact : EncoderKind::rice;
        out.encoders_.push_back(SequenceEncoder::encode(kind, column));
    }
    return out;
}

uint64_t InterleavedSeeds::seed_at(uint64_t j, uint32_t i) const {
    if (i < 1 || i > encoders_.size() || j >= num_partitions_) {
        throw std::out_of_range("seed index out of range");
    }
    return seed_at_unchecked(j, i);
}

uint64_t InterleavedSeeds::total_bits() const {
    uint64_t bits = 32;
    for (const auto& e : encoders_) bits += e.serialized_bits();
    return bits;
}

void InterleavedSeeds::serialize(ByteWriter& out) const {
    out.u32(buckets());
    for (const auto& e : encoders_) e.serialize(out);
}

InterleavedSeeds InterleavedSeeds::deserialize(ByteReader& in, uint32_t buckets, uint64_t num_partitions) {
    InterleavedSeeds out;
    out.num_partitions_ = num_partitions;
    out.encoders_.reserve(buckets);
    bool in_prefix = true;
    for (uint32_t i = 0; i < buckets; ++i) {
        auto e = SequenceEncoder::deserialize(in);
        if (e.size() != num_partitions) throw FormatError("encoder length differs from partition count");
        if (e.kind() == EncoderKind::compact) {
            if (!in_prefix) throw FormatError("Compact encoder after a Rice encoder");
            ++out.compact_prefix_;
        } else {
            in_prefix = false;
        }
        out.encoders_.push_back(std::move(e));
    }
    return out;
}

MonoSeeds MonoSeeds::build(std::span<const uint64_t> seeds, uint32_t buckets, EncoderKind kind) {
    if (buckets == 0 || seeds.size() % buckets != 0) {
        throw std::invalid_argument("seed matrix does not have the given bucket count");
    }
    MonoSeeds out;
    out.buckets_ = buckets;
    out.encoder_ = SequenceEncoder::encode(kind, seeds);
    return out;
}

uint64_t MonoSeeds::seed_at(uint64_t j, uint32_t i) const {
    if (i < 1 || i > buckets_ || j >= num_partitions()) throw std::out_of_range("seed index out of range");
    return seed_at_unchecked(j, i);
}

uint64_t MonoSeeds::total_bits() const { return 32 + encoder_.serialized_bits(); }

void MonoSeeds::serialize(ByteWriter& out) const {
    out.u32(buckets_);
    encoder_.serialize(out, kTagBase);
}

MonoSeeds MonoSeeds::deserialize(ByteReader& in, uint32_t buckets, uint64_t num_partitions) {
    MonoSeeds out;
    out.buckets_ = buckets;
    out.encoder_ = SequenceEncoder::deserialize(in, kTagBase);
    if (out.encoder_.size() != static_cast<uint64_t>(buckets) * num_partitions) {
        throw FormatError("mono encoder length differs from bucket count times partitions");
    }
    return out;
}

} // namespace phobic
