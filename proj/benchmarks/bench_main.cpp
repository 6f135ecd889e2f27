#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "cli/keygen.hpp"
#include "phobic/builder.hpp"
#include "phobic/encoders.hpp"
#include "phobic/mphf.hpp"

namespace {

using namespace phobic;

const std::vector<std::string>& corpus() {
    static const auto keys = cli::gen_keys(1'000'000, 42);
    return keys;
}

void BM_Query(benchmark::State& state) {
    BuildConfig config;
    config.lambda = static_cast<double>(state.range(0)) / 10;
    auto preset = state.range(1) == 0 ? EncoderPreset::ic_r() : EncoderPreset::ic_c();
    const auto& keys = corpus();
    static std::vector<std::string> order;
    if (order.empty()) {
        order = keys;
        std::shuffle(order.begin(), order.end(), std::mt19937_64(1));
    }
    auto f = Mphf::build(keys, config, preset);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.query(order[i]));
        if (++i == order.size()) i = 0;
    }
    state.counters["bits_per_key"] = f.bits_per_key();
    state.SetLabel(preset.name());
}
BENCHMARK(BM_Query)->Args({45, 0})->Args({65, 0})->Args({39, 1});

void BM_BuildPartition(benchmark::State& state) {
    BuildConfig config;
    config.lambda = static_cast<double>(state.range(0));
    AssignmentTable table(config.assignment_spec());
    std::mt19937_64 rng(7);
    std::vector<MasterHash> keys(2500);
    for (auto& h : keys) h = MasterHash{rng(), rng()};
    std::sort(keys.begin(), keys.end());
    uint64_t trials = 0;
    for (auto _ : state) {
        auto seeds = build_partition(keys, config, table, config.buckets());
        trials += seeds.trial_count;
        benchmark::DoNotOptimize(seeds.seeds.data());
    }
    state.counters["trials_per_key"] =
        benchmark::Counter(static_cast<double>(trials) / keys.size(), benchmark::Counter::kAvgIterations);
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(keys.size()));
}
BENCHMARK(BM_BuildPartition)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

std::vector<uint64_t> geometric_values(size_t n) {
    std::mt19937_64 rng(3);
    std::geometric_distribution<uint64_t> dist(0.01);
    std::vector<uint64_t> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

template <class Vec>
void random_access(benchmark::State& state, const Vec& vec) {
    std::mt19937_64 rng(5);
    std::vector<uint64_t> idx(1 << 16);
    for (auto& i : idx) i = rng() % vec.size();
    size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(vec.get(idx[k]));
        k = (k + 1) & (idx.size() - 1);
    }
}

void BM_RiceGet(benchmark::State& state) {
    auto vec = RiceVector::encode(geometric_values(1 << 20));
    random_access(state, vec);
}
BENCHMARK(BM_RiceGet);

void BM_CompactGet(benchmark::State& state) {
    auto vec = CompactVector::encode(geometric_values(1 << 20));
    random_access(state, vec);
}
BENCHMARK(BM_CompactGet);

} // namespace

BENCHMARK_MAIN();
