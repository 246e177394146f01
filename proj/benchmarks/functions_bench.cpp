#include "fnapprox/benchmark_functions.hpp"

#include <benchmark/benchmark.h>

using namespace fnapprox;

namespace {

void BM_Eval(benchmark::State& state)
{
    const auto id = static_cast<FunctionId>(state.range(0));
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_function(id, x));
        x = x < kTwoPi ? x + 1e-3 : 0.0;
    }
}
BENCHMARK(BM_Eval)->DenseRange(1, 10);

void BM_SampleTrain(benchmark::State& state)
{
    for (auto _ : state) {
        Prng p(3);
        benchmark::DoNotOptimize(sample_train(FunctionId::F9, 1000, p));
    }
}
BENCHMARK(BM_SampleTrain);

} // namespace
