#include "phobic/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

namespace phobic::analysis {

namespace {

void check_probs(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("chain needs at least one probability");
    for (double p : probs) {
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("chain probabilities must lie in (0, 1]");
    }
}

uint64_t ceil_log2(uint64_t x) { return x <= 1 ? 0 : static_cast<uint64_t>(std::bit_width(x - 1)); }

} // namespace

CostBounds cost_bounds(const CostQuery& q) {
    if (q.s == 0 || q.n == 0) throw std::domain_error("cost_bounds: s and n must be positive");
    const double alpha_last = q.alpha + static_cast<double>(q.s - 1) / static_cast<double>(q.n);
    if (!(q.alpha >= 0.0) || !(alpha_last < 1.0)) throw std::domain_error("cost_bounds: placement infeasible");
    const double s = static_cast<double>(q.s);
    return CostBounds{std::pow(1.0 - q.alpha, -s), s * std::pow(1.0 - alpha_last, -s)};
}

double coupon_work(uint64_t k, uint64_t n) {
    if (k > n) throw std::invalid_argument("coupon_work: k exceeds n");
    double harmonic = 0.0;
    for (uint64_t i = k; i >= 1; --i) harmonic += 1.0 / static_cast<double>(i);
    return static_cast<double>(n) * harmonic;
}

double chain_work(std::span<const double> probs) {
    check_probs(probs);
    // Summand i is 1 / (p_i ... p_k); accumulate the suffix product right to left.
    double sum = 0.0;
    double product = 1.0;
    size_t i = probs.size();
    while (i > 0) {
        product *= probs[--i];
        if (product < 1e-300) {
            ++i;
            break;
        }
        sum += 1.0 / product;
    }
    if (product >= 1e-300) return sum;

    // Underflow: continue with log-suffix products and a log-sum-exp.
    double log_product = 0.0;
    for (size_t j = probs.size(); j > i; --j) log_product += std::log(probs[j - 1]);
    std::vector<double> terms;
    terms.push_back(std::log(sum));
    while (i > 0) {
        log_product += std::log(probs[--i]);
        terms.push_back(-log_product);
    }
    double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - top);
    return std::exp(top + std::log(acc));
}

ChainEstimate chain_simulate(std::span<const double> probs, uint64_t runs, uint64_t seed) {
    check_probs(probs);
    if (runs == 0) throw std::invalid_argument("chain_simulate: runs must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double mean = 0.0;
    double m2 = 0.0;
    for (uint64_t r = 1; r <= runs; ++r) {
        uint64_t steps = 0;
        size_t state = 0;
        while (state < probs.size()) {
            ++steps;
            state = unit(rng) < probs[state] ? state + 1 : 0;
        }
        double x = static_cast<double>(steps);
        double delta = x - mean;
        mean += delta / static_cast<double>(r);
        m2 += delta * (x - mean);
    }
    double variance = runs > 1 ? m2 / static_cast<double>(runs - 1) : 0.0;
    return ChainEstimate{mean, std::sqrt(variance / static_cast<double>(runs))};
}

bool lemma17_check(std::span<const double> probs, size_t i) {
    const size_t k = probs.size();
    check_probs(probs);
    if (probs[0] >= 1.0) throw std::invalid_argument("lemma17_check: p_1 must be below 1");
    for (size_t j = 1; j < k; ++j) {
        if (!(probs[j] < probs[j - 1])) throw std::invalid_argument("lemma17_check: probabilities must decrease");
    }
    if (i < 1 || 2 * i >= k) throw std::invalid_argument("lemma17_check: need 1 <= i < k / 2");
    double lhs = chain_work(probs.first(k - i)) + chain_work(probs.subspan(k - i));
    double rhs = chain_work(probs.first(i)) + chain_work(probs.subspan(i));
    return lhs < rhs;
}

double processing_order_work(std::span<const uint64_t> sizes_in_order) {
    uint64_t n = 0;
    for (uint64_t s : sizes_in_order) n += s;
    if (n == 0) return 0.0;
    const double dn = static_cast<double>(n);
    double total = 0.0;
    uint64_t placed = 0;
    std::vector<double> probs;
    for (uint64_t s : sizes_in_order) {
        if (s == 0) continue;
        probs.clear();
        for (uint64_t t = 0; t < s; ++t) probs.push_back(static_cast<double>(n - placed - t) / dn);
        total += chain_work(probs);
        placed += s;
    }
    return total;
}

std::vector<double> expected_bucket_sizes(const AssignmentTable& table, uint64_t n, BucketCount buckets) {
    std::vector<double> out(buckets.value);
    const double b = buckets.value;
    double prev = table.inverse(0.0);
    for (uint32_t i = 1; i <= buckets.value; ++i) {
        double cur = i == buckets.value ? table.inverse(1.0) : table.inverse(i / b);
        out[i - 1] = static_cast<double>(n) * (cur - prev);
        prev = cur;
    }
    return out;
}

uint64_t elias_delta_length(uint64_t x) {
    if (x == 0) throw std::invalid_argument("Elias-delta codes positive integers only");
    uint64_t l = ceil_log2(x);
    return l + 2 * ceil_log2(l + 1) + 1;
}

uint64_t elias_delta_bits(std::span<const uint64_t> seeds) {
    uint64_t total = 0;
    for (uint64_t s : seeds) {
        // 2^64 - 1 + 1 would wrap; its code length is that of 2^64.
        total += s == ~uint64_t(0) ? 64 + 2 * 7 + 1 : elias_delta_length(s + 1);
    }
    return total;
}

std::vector<WorkReport> measure_work(std::span<const std::string_view> keys, std::span<const WorkVariant> variants) {
    std::vector<WorkReport> out;
    out.reserve(variants.size());
    for (const auto& variant : variants) {
        BuildReport build;
        Mphf f = Mphf::build(keys, variant.config, variant.preset, &build);
        WorkReport r;
        r.name = variant.name.empty() ? std::string(to_string(variant.config.assignment)) : variant.name;
        r.assignment = variant.config.assignment;
        r.lambda = variant.config.lambda;
        r.partition_size = variant.config.partition_size;
        r.bucket_trials = std::move(build.bucket_trials);
        r.partition_trials = std::move(build.partition_trials);
        r.size_histogram = std::move(build.size_histogram);
        r.total_trials = build.trials;
        r.n = keys.size();
        r.trials_per_key = static_cast<double>(build.trials) / static_cast<double>(keys.size());
        r.bits_per_key = f.bits_per_key();
        r.wall_seconds = build.total_seconds;
        out.push_back(std::move(r));
    }
    return out;
}

std::string work_csv_header() { return "gamma,lambda,partition_size,trials_per_key,bits_per_key,wall_seconds"; }

std::string work_csv_row(const WorkReport& report) {
    std::ostringstream os;
    os << report.name << ',' << report.lambda << ',' << report.partition_size << ',' << std::setprecision(10)
       << report.trials_per_key << ',' << report.bits_per_key << ',' << std::setprecision(6) << report.wall_seconds;
    return os.str();
}

} // namespace phobic::analysis
