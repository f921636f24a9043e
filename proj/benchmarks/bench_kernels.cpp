#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "blowup/interval.hpp"
#include "blowup/series.hpp"

using namespace blowup;

namespace {

std::vector<Interval> random_intervals(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> v(-2.0, 2.0);
    std::uniform_real_distribution<double> w(0.0, 1e-10);
    std::vector<Interval> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        double m = v(gen);
        out.emplace_back(m, m + w(gen));
    }
    return out;
}

void bench_interval_add(benchmark::State& state) {
    auto xs = random_intervals(1024, 11);
    auto ys = random_intervals(1024, 12);
    for (auto _ : state) {
        Interval acc(0.0);
        for (std::size_t i = 0; i < xs.size(); ++i)
            acc += xs[i] + ys[i];
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t)xs.size());
}
BENCHMARK(bench_interval_add);

void bench_interval_mul(benchmark::State& state) {
    auto xs = random_intervals(1024, 21);
    auto ys = random_intervals(1024, 22);
    for (auto _ : state) {
        Interval acc(0.0);
        for (std::size_t i = 0; i < xs.size(); ++i)
            acc += xs[i] * ys[i];
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t)xs.size());
}
BENCHMARK(bench_interval_mul);

void bench_cauchy_product(benchmark::State& state) {
    const int m = (int)state.range(0);
    const int N = (int)state.range(1);
    Series a = Series::zero(m, N);
    Series b = Series::zero(m, N);
    std::mt19937_64 gen(33);
    std::uniform_real_distribution<double> v(-1.0, 1.0);
    for (auto& c : a.c) c = Interval(v(gen));
    for (auto& c : b.c) c = Interval(v(gen));
    for (auto _ : state) {
        Series p = cauchy_product(a, b);
        benchmark::DoNotOptimize(p.c.data());
    }
}
BENCHMARK(bench_cauchy_product)->Args({1, 64})->Args({1, 256})->Args({2, 24})->Args({2, 48});

} // namespace

BENCHMARK_MAIN();
