#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phobic/bucket_assignment.hpp"
#include "phobic/builder.hpp"
#include "phobic/encoders.hpp"
#include "phobic/hashing.hpp"
#include "phobic/partitioner.hpp"

namespace phobic {

enum class SeedLayout : uint8_t { interleaved, mono };

/// How seeds are stored. Interleaved presets keep `compact_prefix` leading
/// Compact encoders (clamped to B); mono stores all seeds in one encoder.
struct EncoderPreset {
    SeedLayout layout = SeedLayout::interleaved;
    uint32_t compact_prefix = 0;
    EncoderKind mono_kind = EncoderKind::rice;

    static EncoderPreset ic_r() { return {SeedLayout::interleaved, 0, EncoderKind::rice}; }
    static EncoderPreset ic_c() { return {SeedLayout::interleaved, UINT32_MAX, EncoderKind::compact}; }
    static EncoderPreset mixed(uint32_t t) { return {SeedLayout::interleaved, t, EncoderKind::rice}; }
    static EncoderPreset mono_r() { return {SeedLayout::mono, 0, EncoderKind::rice}; }
    static EncoderPreset mono_c() { return {SeedLayout::mono, 0, EncoderKind::compact}; }

    /// Accepts ic-r, ic-c, mixed:<t>, mono-r, mono-c.
    static EncoderPreset parse(std::string_view name);
    std::string name() const;
};

using SeedStore = std::variant<InterleavedSeeds, MonoSeeds>;

SeedStore encode_seeds(std::span<const uint64_t> seed_matrix, BucketCount buckets, const EncoderPreset& preset);

/// Instrumentation collected during a build.
struct BuildReport {
    uint64_t trials = 0;
    std::vector<uint64_t> bucket_trials;   // summed over partitions, per bucket index
    std::vector<uint64_t> size_histogram;  // number of buckets of each actual size
    std::vector<uint64_t> partition_trials;
    std::vector<uint64_t> seeds;           // partition-major seed matrix
    unsigned attempts = 0;
    double hash_seconds = 0;
    double search_seconds = 0;
    double encode_seconds = 0;
    double total_seconds = 0;
};

/// Minimal perfect hash function over a static key set, answering in [0, n).
class Mphf {
public:
    static constexpr uint32_t kVersion = 1;
    /// Magic, version and n; excluded from bits_per_key.
    static constexpr uint64_t kFixedHeaderBytes = 16;
    static constexpr unsigned kMaxAttempts = 4;

    Mphf() = default;

    /// Throws InvalidConfig, or DuplicateKeys once every retry with
    /// global_seed + 1, + 2, + 3 exhausted its seeds.
    static Mphf build(std::span<const std::string_view> keys, const BuildConfig& config = {},
                      const EncoderPreset& preset = EncoderPreset::ic_r(), BuildReport* report = nullptr);
    static Mphf build(std::span<const std::string> keys, const BuildConfig& config = {},
                      const EncoderPreset& preset = EncoderPreset::ic_r(), BuildReport* report = nullptr);

    /// Assembles an Mphf from parts. The caller guarantees consistency.
    static Mphf from_parts(GlobalSeed seed, double lambda, double partition_size, const AssignmentSpec& assignment,
                           PartitionLayout layout, BucketCount buckets, SeedStore seeds);

    uint64_t query(std::string_view key) const { return query(master_hash(key, global_seed_)); }
    uint64_t query(std::span<const std::byte> key) const { return query(master_hash(key, global_seed_)); }
    uint64_t query(const MasterHash& h) const;

    uint64_t size() const { return layout_.n(); }
    GlobalSeed global_seed() const { return global_seed_; }
    double lambda() const { return lambda_; }
    double partition_size() const { return partition_size_; }
    const PartitionLayout& layout() const { return layout_; }
    const AssignmentTable& table() const { return table_; }
    BucketCount buckets() const { return buckets_; }
    const SeedStore& seeds() const { return seeds_; }
    uint64_t seed_at(uint64_t partition, uint32_t bucket) const;
    std::string encoder_name() const;

    uint64_t serialized_bytes() const;
    double bits_per_key() const;

    std::vector<uint8_t> serialize() const;
    /// Throws FormatError for anything but a complete, checksummed file.
    static Mphf deserialize(std::span<const uint8_t> bytes);

    void save(const std::filesystem::path& path) const;
    static Mphf load(const std::filesystem::path& path);

private:
    GlobalSeed global_seed_{};
    double lambda_ = 0;
    double partition_size_ = 0;
    PartitionLayout layout_;
    AssignmentTable table_;
    BucketCount buckets_{};
    SeedStore seeds_;
};

} // namespace phobic
