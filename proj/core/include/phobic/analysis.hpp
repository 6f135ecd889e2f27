#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phobic/bucket_assignment.hpp"
#include "phobic/builder.hpp"
#include "phobic/mphf.hpp"

namespace phobic::analysis {

/// Placing a bucket of size s into a table of size n with load factor alpha.
struct CostQuery {
    uint64_t s = 1;
    double alpha = 0.0;
    uint64_t n = 1;
};

struct CostBounds {
    double lower = 0;
    double upper = 0;
};

/// (1 - alpha)^-s <= c_n(s, alpha) <= s (1 - alpha')^-s with alpha' = alpha + (s - 1) / n.
/// Throws std::domain_error if alpha' >= 1 or alpha < 0.
CostBounds cost_bounds(const CostQuery& q);

/// n * H_k: the expected work of placing k size-one buckets last.
double coupon_work(uint64_t k, uint64_t n);

/// Expected steps of the restart chain: sum_i 1 / (p_i * ... * p_k).
/// Probabilities must lie in (0, 1]; switches to log space on underflow.
double chain_work(std::span<const double> probs);

struct ChainEstimate {
    double mean = 0;
    double standard_error = 0;
};

/// Monte-Carlo estimate of chain_work by direct simulation.
ChainEstimate chain_simulate(std::span<const double> probs, uint64_t runs, uint64_t seed);

/// Both sides of the swap inequality for a strictly decreasing chain and
/// 1 <= i < k / 2; returns whether the left side is strictly smaller.
/// Throws std::invalid_argument on precondition violations.
bool lemma17_check(std::span<const double> probs, size_t i);

/// Expected work of placing buckets of the given sizes in the given order
/// into an initially empty table of size sum(sizes).
double processing_order_work(std::span<const uint64_t> sizes_in_order);

/// lambda_i = n (gamma^-1(i / B) - gamma^-1((i - 1) / B)) for i = 1..B.
std::vector<double> expected_bucket_sizes(const AssignmentTable& table, uint64_t n, BucketCount buckets);

/// Elias-delta code length of x >= 1: ceil(log2 x) + 2 ceil(log2(ceil(log2 x) + 1)) + 1.
uint64_t elias_delta_length(uint64_t x);

/// Total Elias-delta size of the seeds, each shifted by one.
uint64_t elias_delta_bits(std::span<const uint64_t> seeds);

struct WorkVariant {
    std::string name;
    BuildConfig config;
    EncoderPreset preset = EncoderPreset::ic_r();
};

struct WorkReport {
    std::string name;
    AssignmentKind assignment = AssignmentKind::beta_eps;
    double lambda = 0;
    double partition_size = 0;
    std::vector<uint64_t> bucket_trials;
    std::vector<uint64_t> partition_trials;
    std::vector<uint64_t> size_histogram;
    uint64_t total_trials = 0;
    uint64_t n = 0;
    double trials_per_key = 0;
    double bits_per_key = 0;
    double wall_seconds = 0;
};

/// Builds every variant over the same keys and reports its search work.
std::vector<WorkReport> measure_work(std::span<const std::string_view> keys, std::span<const WorkVariant> variants);

/// CSV header and rows: gamma,lambda,partition_size,trials_per_key,bits_per_key,wall_seconds.
std::string work_csv_header();
std::string work_csv_row(const WorkReport& report);

} // namespace phobic::analysis
