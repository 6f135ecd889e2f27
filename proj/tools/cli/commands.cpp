#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <random>

#include "cli/keygen.hpp"
#include "phobic/errors.hpp"

namespace phobic::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string_view> views_of(const std::vector<std::string>& keys) {
    return {keys.begin(), keys.end()};
}

void print_kv(std::ostream& out, std::string_view key, const auto& value) {
    out << std::left << std::setw(26) << key << value << '\n';
}

} // namespace

OutputFormat parse_output_format(const std::string& name) {
    if (name == "human") return OutputFormat::human;
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw InvalidConfig("unknown output format: " + name);
}

void BenchConfig::validate() const {
    if (n < 1) throw InvalidConfig("--n must be at least 1");
    if (threads < 1) throw InvalidConfig("--threads must be at least 1");
    build_config().validate();
}

BuildConfig BenchConfig::build_config() const {
    BuildConfig c;
    c.lambda = lambda;
    c.partition_size = partition_size;
    c.assignment = assignment;
    c.epsilon = epsilon;
    c.threads = threads;
    c.global_seed = GlobalSeed{seed};
    return c;
}

bool verify_bijection(const Mphf& f, const std::vector<std::string>& keys) {
    if (f.size() != keys.size()) return false;
    std::vector<bool> hit(keys.size(), false);
    for (const auto& key : keys) {
        uint64_t v = f.query(key);
        if (v >= hit.size() || hit[v]) return false;
        hit[v] = true;
    }
    return true;
}

BuildOutcome cmd_build(const BenchConfig& config) {
    config.validate();
    std::vector<std::string> keys = gen_keys(config.n, config.seed);
    auto views = views_of(keys);

    BuildReport report;
    Mphf f = Mphf::build(views, config.build_config(), config.encoder, &report);

    BuildOutcome r;
    r.n = f.size();
    r.lambda = f.lambda();
    r.partition_size = f.partition_size();
    r.encoder = f.encoder_name();
    r.assignment = std::string(to_string(f.table().spec().kind));
    r.epsilon = f.table().spec().epsilon;
    r.global_seed = f.global_seed().value;
    r.serialized_bytes = f.serialized_bytes();
    r.bits_per_key = f.bits_per_key();
    r.trials_per_key = static_cast<double>(report.trials) / static_cast<double>(r.n);
    r.construction_ns_per_key = report.total_seconds * 1e9 / static_cast<double>(r.n);
    r.verified = verify_bijection(f, keys);
    if (!r.verified) throw std::runtime_error("constructed function is not a bijection");
    if (!config.save_path.empty()) f.save(config.save_path);
    return r;
}

QueryOutcome cmd_query_bench(const BenchConfig& config) {
    config.validate();
    std::vector<std::string> keys = gen_keys(config.n, config.seed);
    Mphf f;
    if (!config.load_path.empty()) {
        f = Mphf::load(config.load_path);
        if (f.size() != keys.size()) {
            throw InvalidConfig("loaded function covers " + std::to_string(f.size()) + " keys but --n is " +
                                std::to_string(keys.size()));
        }
    } else {
        auto views = views_of(keys);
        f = Mphf::build(views, config.build_config(), config.encoder);
    }

    QueryOutcome r;
    r.n = f.size();
    r.encoder = f.encoder_name();
    r.bits_per_key = f.bits_per_key();
    r.verified = verify_bijection(f, keys);
    if (!r.verified) throw std::runtime_error("function is not a bijection over the key corpus; not timing it");

    std::mt19937_64 rng(config.seed);
    std::shuffle(keys.begin(), keys.end(), rng);
    uint64_t sink = 0;
    auto start = Clock::now();
    for (const auto& key : keys) sink ^= f.query(key);
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    // Keeps the loop observable.
    if (sink == ~uint64_t(0)) r.verified = false;
    r.ns_per_query = seconds * 1e9 / static_cast<double>(keys.size());
    return r;
}

std::vector<analysis::WorkReport> cmd_analyze(const BenchConfig& config, const std::vector<double>& lambdas) {
    config.validate();
    std::vector<std::string> keys = gen_keys(config.n, config.seed);
    auto views = views_of(keys);
    std::vector<analysis::WorkVariant> variants;
    for (double lambda : lambdas) {
        for (auto kind : {AssignmentKind::uniform, AssignmentKind::skew, AssignmentKind::beta_eps}) {
            BenchConfig c = config;
            c.lambda = lambda;
            c.assignment = kind;
            c.validate();
            variants.push_back({std::string(to_string(kind)), c.build_config(), config.encoder});
        }
    }
    return analysis::measure_work(views, variants);
}

void print_build(std::ostream& out, const BuildOutcome& r, OutputFormat format) {
    switch (format) {
    case OutputFormat::json: {
        nlohmann::json j = {
            {"n", r.n},
            {"lambda", r.lambda},
            {"partition_size", r.partition_size},
            {"encoder", r.encoder},
            {"assignment", r.assignment},
            {"epsilon", r.epsilon},
            {"global_seed", r.global_seed},
            {"serialized_bytes", r.serialized_bytes},
            {"bits_per_key", r.bits_per_key},
            {"trials_per_key", r.trials_per_key},
            {"construction_ns_per_key", r.construction_ns_per_key},
            {"verified", r.verified},
        };
        out << j.dump(2) << '\n';
        break;
    }
    case OutputFormat::csv:
        out << "n,lambda,partition_size,encoder,assignment,epsilon,global_seed,serialized_bytes,bits_per_key,"
               "trials_per_key,construction_ns_per_key,verified\n";
        out << std::setprecision(10) << r.n << ',' << r.lambda << ',' << r.partition_size << ',' << r.encoder << ','
            << r.assignment << ',' << r.epsilon << ',' << r.global_seed << ',' << r.serialized_bytes << ','
            << r.bits_per_key << ',' << r.trials_per_key << ',' << r.construction_ns_per_key << ','
            << (r.verified ? "true" : "false") << '\n';
        break;
    case OutputFormat::human:
        print_kv(out, "keys", r.n);
        print_kv(out, "lambda", r.lambda);
        print_kv(out, "partition size", r.partition_size);
        print_kv(out, "encoder", r.encoder);
        print_kv(out, "assignment", r.assignment);
        print_kv(out, "epsilon", r.epsilon);
        print_kv(out, "bits/key", r.bits_per_key);
        print_kv(out, "trials/key", r.trials_per_key);
        print_kv(out, "construction ns/key", r.construction_ns_per_key);
        print_kv(out, "bijection verified", r.verified ? "yes" : "no");
        break;
    }
}

void print_query(std::ostream& out, const QueryOutcome& r, OutputFormat format) {
    switch (format) {
    case OutputFormat::json: {
        nlohmann::json j = {
            {"n", r.n},
            {"encoder", r.encoder},
            {"bits_per_key", r.bits_per_key},
            {"ns_per_query", r.ns_per_query},
            {"verified", r.verified},
        };
        out << j.dump(2) << '\n';
        break;
    }
    case OutputFormat::csv:
        out << "n,encoder,bits_per_key,ns_per_query,verified\n";
        out << std::setprecision(10) << r.n << ',' << r.encoder << ',' << r.bits_per_key << ',' << r.ns_per_query
            << ',' << (r.verified ? "true" : "false") << '\n';
        break;
    case OutputFormat::human:
        print_kv(out, "keys", r.n);
        print_kv(out, "encoder", r.encoder);
        print_kv(out, "bits/key", r.bits_per_key);
        print_kv(out, "query ns/query", r.ns_per_query);
        print_kv(out, "bijection verified", r.verified ? "yes" : "no");
        break;
    }
}

void print_analysis(std::ostream& out, const std::vector<analysis::WorkReport>& rows, OutputFormat format) {
    switch (format) {
    case OutputFormat::json: {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) {
            j.push_back({
                {"gamma", r.name},
                {"lambda", r.lambda},
                {"partition_size", r.partition_size},
                {"trials_per_key", r.trials_per_key},
                {"bits_per_key", r.bits_per_key},
                {"wall_seconds", r.wall_seconds},
            });
        }
        out << j.dump(2) << '\n';
        break;
    }
    case OutputFormat::csv:
        out << analysis::work_csv_header() << '\n';
        for (const auto& r : rows) out << analysis::work_csv_row(r) << '\n';
        break;
    case OutputFormat::human:
        out << std::left << std::setw(10) << "gamma" << std::setw(8) << "lambda" << std::setw(16) << "trials/key"
            << std::setw(12) << "bits/key" << "seconds\n";
        for (const auto& r : rows) {
            out << std::left << std::setw(10) << r.name << std::setw(8) << r.lambda << std::setw(16)
                << r.trials_per_key << std::setw(12) << r.bits_per_key << r.wall_seconds << '\n';
        }
        break;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Minimal perfect hashing with optimized bucket sizes and interleaved seed coding"};
    app.require_subcommand(1);

    BenchConfig config;
    std::string encoder = "ic-r";
    std::string assignment = "beta-eps";
    std::string output = "human";
    double epsilon = -1.0;
    std::vector<double> lambdas;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--n", config.n, "Number of keys")->capture_default_str();
        cmd->add_option("--partition-size", config.partition_size, "Expected partition size P")
            ->capture_default_str();
        cmd->add_option("--encoder", encoder, "ic-r, ic-c, mixed:<t>, mono-r or mono-c")->capture_default_str();
        cmd->add_option("--assignment", assignment, "uniform, skew or beta-eps")->capture_default_str();
        cmd->add_option("--epsilon", epsilon, "Override the beta-eps perturbation");
        cmd->add_option("--threads", config.threads, "Construction threads")->capture_default_str();
        cmd->add_option("--seed", config.seed, "Key generator and global hash seed")->capture_default_str();
        cmd->add_option("--output", output, "human, csv or json")->capture_default_str();
    };

    auto* build = app.add_subcommand("build", "Build over random keys and report space and construction time");
    add_common(build);
    build->add_option("--lambda", config.lambda, "Average bucket size")->capture_default_str();
    build->add_option("--save", config.save_path, "Write the function to this file");

    auto* query = app.add_subcommand("query-bench", "Query every key once in random order");
    add_common(query);
    query->add_option("--lambda", config.lambda, "Average bucket size")->capture_default_str();
    query->add_option("--load", config.load_path, "Read the function from this file instead of building");

    auto* analyze = app.add_subcommand("analyze", "Search work of uniform, skew and beta-eps assignment");
    add_common(analyze);
    analyze->add_option("--lambda", lambdas, "Average bucket sizes to sweep")->default_str("8");

    auto* keys = app.add_subcommand("gen-keys", "Print the random key corpus, one key per line");
    keys->add_option("--n", config.n, "Number of keys")->capture_default_str();
    keys->add_option("--seed", config.seed, "Generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        config.encoder = EncoderPreset::parse(encoder);
        config.assignment = parse_assignment_kind(assignment);
        config.output = parse_output_format(output);
        if (epsilon >= 0.0) config.epsilon = epsilon;
        else if (epsilon != -1.0) throw InvalidConfig("--epsilon must be in [0, 1)");

        if (*build) {
            print_build(out, cmd_build(config), config.output);
        } else if (*query) {
            print_query(out, cmd_query_bench(config), config.output);
        } else if (*analyze) {
            if (lambdas.empty()) lambdas.push_back(8.0);
            print_analysis(out, cmd_analyze(config, lambdas), config.output);
        } else if (*keys) {
            if (config.n < 1) throw InvalidConfig("--n must be at least 1");
            for (const auto& k : gen_keys(config.n, config.seed)) out << k << '\n';
        }
    } catch (const InvalidConfig& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const DuplicateKeys& e) {
        err << "build failed: " << e.what() << '\n';
        return 3;
    } catch (const SeedExhausted& e) {
        err << "build failed: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace phobic::cli
