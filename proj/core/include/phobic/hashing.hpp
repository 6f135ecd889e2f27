#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace phobic {

/// 128-bit key fingerprint. `hi` selects the partition and the bucket,
/// `lo` feeds the seeded position hash.
struct MasterHash {
    uint64_t hi = 0;
    uint64_t lo = 0;

    friend constexpr bool operator==(const MasterHash&, const MasterHash&) = default;
    friend constexpr auto operator<=>(const MasterHash&, const MasterHash&) = default;
};

struct GlobalSeed {
    uint64_t value = 0;

    friend constexpr bool operator==(const GlobalSeed&, const GlobalSeed&) = default;
};

namespace detail {

constexpr uint64_t fmix64(uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

// Remix constant separating the bucket hash from the partition selector.
constexpr uint64_t kBucketRemix = 0x9e3779b97f4a7c15ULL;
constexpr uint64_t kSeedMul = 0xd6e8feb86659fd93ULL;

inline uint64_t mul_high(uint64_t a, uint64_t b) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) >> 64);
}

} // namespace detail

/// MurmurHash3 x64/128 over the key bytes, seeded with the full 64-bit global seed.
MasterHash master_hash(std::span<const std::byte> key, GlobalSeed seed);

inline MasterHash master_hash(std::string_view key, GlobalSeed seed) {
    return master_hash(std::as_bytes(std::span(key.data(), key.size())), seed);
}

/// Bits used for bucket selection: `hi` remixed so that they are decorrelated
/// from the fixed-point partition selector that also reads `hi`.
constexpr uint64_t bucket_bits(const MasterHash& h) {
    return detail::fmix64(h.hi ^ detail::kBucketRemix);
}

/// (bits + 1) / 2^64, always in (0, 1].
inline double normalized_fraction(uint64_t bits) {
    // double(bits) rounds to at most 2^64, and adding 1 at that magnitude is absorbed.
    return (static_cast<double>(bits) + 1.0) * 0x1p-64;
}

inline double normalized_hash(const MasterHash& h) {
    return normalized_fraction(bucket_bits(h));
}

/// Seeded position in [0, m). Requires m >= 1.
inline uint64_t position_hash(const MasterHash& h, uint64_t s, uint64_t m) {
    uint64_t z = detail::fmix64(h.lo ^ (s * detail::kSeedMul + detail::kBucketRemix));
    return detail::mul_high(z, m);
}

} // namespace phobic
