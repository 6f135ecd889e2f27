#include "phobic/hashing.hpp"

#include <bit>
#include <cstring>

namespace phobic {

namespace {

constexpr uint64_t kC1 = 0x87c37b91114253d5ULL;
constexpr uint64_t kC2 = 0x4cf5ad432745937fULL;

inline uint64_t load64(const std::byte* p) {
    uint64_t v;
    std::memcpy(&v, p, sizeof v);
    if constexpr (std::endian::native == std::endian::big) {
        v = __builtin_bswap64(v);
    }
    return v;
}

} // namespace

MasterHash master_hash(std::span<const std::byte> key, GlobalSeed seed) {
    const std::byte* data = key.data();
    const size_t len = key.size();
    const size_t nblocks = len / 16;

    uint64_t h1 = seed.value;
    uint64_t h2 = seed.value ^ kC1;

    for (size_t i = 0; i < nblocks; ++i) {
        uint64_t k1 = load64(data + i * 16);
        uint64_t k2 = load64(data + i * 16 + 8);

        k1 *= kC1;
        k1 = std::rotl(k1, 31);
        k1 *= kC2;
        h1 ^= k1;
        h1 = std::rotl(h1, 27);
        h1 += h2;
        h1 = h1 * 5 + 0x52dce729;

        k2 *= kC2;
        k2 = std::rotl(k2, 33);
        k2 *= kC1;
        h2 ^= k2;
        h2 = std::rotl(h2, 31);
        h2 += h1;
        h2 = h2 * 5 + 0x38495ab5;
    }

    const std::byte* tail = data + nblocks * 16;
    uint64_t k1 = 0;
    uint64_t k2 = 0;
    const size_t rem = len & 15;
    for (size_t i = rem; i > 8; --i) {
        k2 ^= static_cast<uint64_t>(tail[i - 1]) << ((i - 9) * 8);
    }
    if (rem > 8) {
        k2 *= kC2;
        k2 = std::rotl(k2, 33);
        k2 *= kC1;
        h2 ^= k2;
    }
    for (size_t i = rem < 8 ? rem : 8; i > 0; --i) {
        k1 ^= static_cast<uint64_t>(tail[i - 1]) << ((i - 1) * 8);
    }
    if (rem > 0) {
        k1 *= kC1;
        k1 = std::rotl(k1, 31);
        k1 *= kC2;
        h1 ^= k1;
    }

    h1 ^= len;
    h2 ^= len;
    h1 += h2;
    h2 += h1;
    h1 = detail::fmix64(h1);
    h2 = detail::fmix64(h2);
    h1 += h2;
    h2 += h1;
    return MasterHash{h1, h2};
}

} // namespace phobic
