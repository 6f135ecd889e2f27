#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phobic/analysis.hpp"
#include "phobic/mphf.hpp"

namespace phobic::cli {

enum class OutputFormat { human, csv, json };

OutputFormat parse_output_format(const std::string& name);

struct BenchConfig {
    uint64_t n = 1'000'000;
    double lambda = 8.0;
    double partition_size = 2500.0;
    EncoderPreset encoder = EncoderPreset::ic_r();
    AssignmentKind assignment = AssignmentKind::beta_eps;
    std::optional<double> epsilon;
    unsigned threads = 1;
    uint64_t seed = 42;
    OutputFormat output = OutputFormat::human;
    std::string save_path;
    std::string load_path;

    /// Throws InvalidConfig.
    void validate() const;
    BuildConfig build_config() const;
};

struct BuildOutcome {
    uint64_t n = 0;
    double lambda = 0;
    double partition_size = 0;
    std::string encoder;
    std::string assignment;
    double epsilon = 0;
    uint64_t global_seed = 0;
    uint64_t serialized_bytes = 0;
    double bits_per_key = 0;
    double trials_per_key = 0;
    double construction_ns_per_key = 0;
    bool verified = false;
};

struct QueryOutcome {
    uint64_t n = 0;
    std::string encoder;
    double bits_per_key = 0;
    double ns_per_query = 0;
    bool verified = false;
};

/// True if the sorted query results over `keys` are exactly 0..n-1.
bool verify_bijection(const Mphf& f, const std::vector<std::string>& keys);

BuildOutcome cmd_build(const BenchConfig& config);
/// Verifies the structure before the single timed pass; throws std::runtime_error
/// if verification fails.
QueryOutcome cmd_query_bench(const BenchConfig& config);
/// gamma sweep over uniform, skew and beta-eps for every lambda.
std::vector<analysis::WorkReport> cmd_analyze(const BenchConfig& config, const std::vector<double>& lambdas);

void print_build(std::ostream& out, const BuildOutcome& r, OutputFormat format);
void print_query(std::ostream& out, const QueryOutcome& r, OutputFormat format);
void print_analysis(std::ostream& out, const std::vector<analysis::WorkReport>& rows, OutputFormat format);

/// Entry point of the phobic tool. Exit codes: 0 success, 2 invalid
/// arguments or config, 3 build failure, 1 other errors (I/O, bad files).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace phobic::cli
