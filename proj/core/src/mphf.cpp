#include "phobic/mphf.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "phobic/byte_io.hpp"
#include "phobic/errors.hpp"

namespace phobic {

namespace {

constexpr char kMagic[4] = {'P', 'H', 'O', 'B'};
// magic, version, n, num_partitions, lambda, P, kind, epsilon, global seed
constexpr uint64_t kPreambleBytes = 4 + 4 + 8 + 8 + 8 + 8 + 1 + 8 + 8;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

uint64_t checksum(std::span<const uint8_t> bytes) {
    return master_hash(std::as_bytes(bytes), GlobalSeed{0x5048'4f42'4353'554dULL}).hi;
}

} // namespace

EncoderPreset EncoderPreset::parse(std::string_view name) {
    if (name == "ic-r") return ic_r();
    if (name == "ic-c") return ic_c();
    if (name == "mono-r") return mono_r();
    if (name == "mono-c") return mono_c();
    constexpr std::string_view prefix = "mixed:";
    if (name.starts_with(prefix)) {
        std::string digits(name.substr(prefix.size()));
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("mixed encoder needs a non-negative integer: " + std::string(name));
        }
        unsigned long long t = std::stoull(digits);
        if (t > UINT32_MAX) throw std::invalid_argument("mixed prefix too large");
        return mixed(static_cast<uint32_t>(t));
    }
    throw std::invalid_argument("unknown encoder preset: " + std::string(name));
}

std::string EncoderPreset::name() const {
    if (layout == SeedLayout::mono) return mono_kind == EncoderKind::rice ? "mono-r" : "mono-c";
    if (compact_prefix == 0) return "ic-r";
    if (compact_prefix == UINT32_MAX) return "ic-c";
    return "mixed:" + std::to_string(compact_prefix);
}

SeedStore encode_seeds(std::span<const uint64_t> seed_matrix, BucketCount buckets, const EncoderPreset& preset) {
    if (preset.layout == SeedLayout::mono) return MonoSeeds::build(seed_matrix, buckets.value, preset.mono_kind);
    return InterleavedSeeds::build(seed_matrix, buckets.value, preset.compact_prefix);
}

Mphf Mphf::build(std::span<const std::string> keys, const BuildConfig& config, const EncoderPreset& preset,
                 BuildReport* report) {
    std::vector<std::string_view> views(keys.begin(), keys.end());
    return build(views, config, preset, report);
}

Mphf Mphf::build(std::span<const std::string_view> keys, const BuildConfig& config, const EncoderPreset& preset,
                 BuildReport* report) {
    config.validate();
    if (keys.empty()) throw InvalidConfig("cannot build over an empty key set");

    const auto start = Clock::now();
    const AssignmentSpec spec = config.assignment_spec();
    const AssignmentTable table(spec);
    const BucketCount buckets = config.buckets();

    std::vector<MasterHash> hashes(keys.size());
    for (unsigned attempt = 0; attempt < kMaxAttempts; ++attempt) {
        BuildConfig attempt_config = config;
        attempt_config.global_seed.value = config.global_seed.value + attempt;

        auto t0 = Clock::now();
        for (size_t k = 0; k < keys.size(); ++k) hashes[k] = master_hash(keys[k], attempt_config.global_seed);
        PartitionResult parts = partition(hashes, config.partition_size);
        double hash_seconds = seconds_since(t0);

        t0 = Clock::now();
        std::vector<PartitionSeeds> seeds;
        try {
            seeds = build_partitions(parts.keys, attempt_config, table, buckets);
        } catch (const SeedExhausted&) {
            continue;
        }
        double search_seconds = seconds_since(t0);

        t0 = Clock::now();
        std::vector<uint64_t> matrix = seed_matrix(seeds);
        SeedStore store = encode_seeds(matrix, buckets, preset);
        double encode_seconds = seconds_since(t0);

        Mphf f = from_parts(attempt_config.global_seed, config.lambda, config.partition_size, spec,
                            std::move(parts.layout), buckets, std::move(store));

        if (report) {
            *report = BuildReport{};
            report->attempts = attempt + 1;
            report->bucket_trials.assign(buckets.value, 0);
            report->partition_trials.reserve(seeds.size());
            BucketedPartition bucketed;
            for (uint64_t j = 0; j < seeds.size(); ++j) {
                report->trials += seeds[j].trial_count;
                report->partition_trials.push_back(seeds[j].trial_count);
                for (uint32_t i = 0; i < buckets.value; ++i) report->bucket_trials[i] += seeds[j].bucket_trials[i];
                bucketed = assign_buckets(parts.keys.partition(j), table, buckets);
                for (uint32_t i = 1; i <= buckets.value; ++i) {
                    uint32_t size = bucketed.bucket_size(i);
                    if (size >= report->size_histogram.size()) report->size_histogram.resize(size + 1, 0);
                    ++report->size_histogram[size];
                }
            }
            report->seeds = std::move(matrix);
            report->hash_seconds = hash_seconds;
            report->search_seconds = search_seconds;
            report->encode_seconds = encode_seconds;
            report->total_seconds = seconds_since(start);
        }
        return f;
    }
    throw DuplicateKeys("construction failed for " + std::to_string(kMaxAttempts) +
                        " global seeds; the key set most likely contains duplicates");
}

Mphf Mphf::from_parts(GlobalSeed seed, double lambda, double partition_size, const AssignmentSpec& assignment,
                      PartitionLayout layout, BucketCount buckets, SeedStore seeds) {
    Mphf f;
    f.global_seed_ = seed;
    f.lambda_ = lambda;
    f.partition_size_ = partition_size;
    f.layout_ = std::move(layout);
    f.table_ = AssignmentTable(assignment);
    f.buckets_ = buckets;
    f.seeds_ = std::move(seeds);
    return f;
}

uint64_t Mphf::seed_at(uint64_t partition, uint32_t bucket) const {
    return std::visit([&](const auto& s) { return s.seed_at(partition, bucket); }, seeds_);
}

uint64_t Mphf::query(const MasterHash& h) const {
    const uint64_t num = layout_.num_partitions();
    const uint64_t j = partition_of(h, num);
    const uint64_t begin = layout_.offset_unchecked(j);
    const uint64_t end = j + 1 == num ? layout_.n() : layout_.offset_unchecked(j + 1);
    const uint64_t m = end - begin;
    if (m == 0) return begin < layout_.n() ? begin : layout_.n() - 1;

    const uint32_t bucket = table_.bucket_for_hash(normalized_hash(h), buckets_);
    uint64_t p;
    if (const auto* il = std::get_if<InterleavedSeeds>(&seeds_)) {
        p = il->seed_at_unchecked(j, bucket);
    } else {
        p = std::get<MonoSeeds>(seeds_).seed_at_unchecked(j, bucket);
    }
    return begin + slot_for(h, p, m);
}

std::string Mphf::encoder_name() const {
    if (const auto* mono = std::get_if<MonoSeeds>(&seeds_)) {
        return mono->encoder().kind() == EncoderKind::rice ? "mono-r" : "mono-c";
    }
    const auto& il = std::get<InterleavedSeeds>(seeds_);
    if (il.compact_prefix() == 0) return "ic-r";
    if (il.compact_prefix() == il.buckets()) return "ic-c";
    return "mixed:" + std::to_string(il.compact_prefix());
}

uint64_t Mphf::serialized_bytes() const {
    uint64_t delta_bytes = 1 + (layout_.num_partitions() * layout_.delta_width() + 7) / 8;
    uint64_t seed_bits = std::visit([](const auto& s) { return s.total_bits(); }, seeds_);
    return kPreambleBytes + delta_bytes + seed_bits / 8 + 8;
}

double Mphf::bits_per_key() const {
    return static_cast<double>((serialized_bytes() - kFixedHeaderBytes) * 8) / static_cast<double>(size());
}

std::vector<uint8_t> Mphf::serialize() const {
    ByteWriter out;
    for (char c : kMagic) out.u8(static_cast<uint8_t>(c));
    out.u32(kVersion);
    out.u64(layout_.n());
    out.u64(layout_.num_partitions());
    out.f64(lambda_);
    out.f64(partition_size_);
    out.u8(static_cast<uint8_t>(table_.spec().kind));
    out.f64(table_.spec().epsilon);
    out.u64(global_seed_.value);
    out.u8(static_cast<uint8_t>(layout_.delta_width()));
    out.bits(layout_.packed_deltas(), layout_.num_partitions() * layout_.delta_width());
    std::visit([&](const auto& s) { s.serialize(out); }, seeds_);
    out.u64(checksum(out.bytes()));
    return std::move(out.bytes());
}

Mphf Mphf::deserialize(std::span<const uint8_t> bytes) {
    if (bytes.size() < kPreambleBytes + 1 + 4 + 8) throw FormatError("input too short");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic");

    ByteReader in(bytes.first(bytes.size() - 8));
    in.u32(); // magic
    if (uint32_t version = in.u32(); version != kVersion) {
        throw FormatError("unsupported version " + std::to_string(version));
    }
    ByteReader tail(bytes.last(8));
    if (tail.u64() != checksum(bytes.first(bytes.size() - 8))) throw FormatError("checksum mismatch");

    const uint64_t n = in.u64();
    const uint64_t num = in.u64();
    const double lambda = in.f64();
    const double partition_size = in.f64();
    const uint8_t kind = in.u8();
    const double epsilon = in.f64();
    const GlobalSeed seed{in.u64()};
    if (n == 0 || num == 0 || num > n) throw FormatError("invalid key or partition count");
    if (!(lambda > 0.0) || !std::isfinite(lambda) || !(partition_size >= 1.0) || !std::isfinite(partition_size)) {
        throw FormatError("invalid lambda or partition size");
    }
    if (kind > static_cast<uint8_t>(AssignmentKind::beta_eps)) throw FormatError("unknown assignment kind");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw FormatError("epsilon outside [0, 1)");

    const unsigned width = in.u8();
    if (width > 64) throw FormatError("delta width above 64");
    if (width != 0 && num > (~uint64_t(0) >> 7) / width) throw FormatError("delta section too large");
    in.need((num * width + 7) / 8);
    PartitionLayout layout = PartitionLayout::from_packed(n, num, width, in.bits(num * width));
    if (layout.delta(0) != 0) throw FormatError("first partition offset is not zero");
    uint64_t prev = 0;
    for (uint64_t j = 1; j <= num; ++j) {
        uint64_t off = j == num ? n : layout.offset_unchecked(j);
        if (off < prev || off > n) throw FormatError("partition offsets are not monotone");
        prev = off;
    }

    const uint32_t buckets = in.u32();
    if (buckets == 0) throw FormatError("zero buckets");
    SeedStore seeds;
    if (in.peek_u8() >= MonoSeeds::kTagBase) {
        if (static_cast<unsigned __int128>(buckets) * num > ~uint64_t(0)) throw FormatError("seed count overflow");
        seeds = MonoSeeds::deserialize(in, buckets, num);
    } else {
        if (static_cast<uint64_t>(buckets) * 10 > in.remaining()) throw FormatError("truncated encoder section");
        seeds = InterleavedSeeds::deserialize(in, buckets, num);
    }
    if (in.remaining() != 0) throw FormatError("trailing bytes before checksum");

    AssignmentSpec spec{static_cast<AssignmentKind>(kind), epsilon};
    return from_parts(seed, lambda, partition_size, spec, std::move(layout), BucketCount{buckets}, std::move(seeds));
}

void Mphf::save(const std::filesystem::path& path) const {
    std::vector<uint8_t> bytes = serialize();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

Mphf Mphf::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

} // namespace phobic
