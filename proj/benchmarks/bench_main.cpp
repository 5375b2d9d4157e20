#include "conecert/analysis.hpp"
#include "conecert/dynamics.hpp"
#include "conecert/hilbert.hpp"
#include "conecert/rng.hpp"
#include "conecert/topology.hpp"

#include <benchmark/benchmark.h>

using namespace conecert;

namespace {

StateVector random_positive(int n, SplitRng& rng) {
    StateVector x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(0.1, 10.0);
    return x;
}

void bm_hilbert_distance(benchmark::State& state) {
    SplitRng rng(1);
    const int n = static_cast<int>(state.range(0));
    const StateVector x = random_positive(n, rng);
    const StateVector y = random_positive(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hilbert_distance(x, y));
    }
}
BENCHMARK(bm_hilbert_distance)->Arg(10)->Arg(100)->Arg(1000);

void bm_minimal_gamma(benchmark::State& state) {
    SplitRng rng(2);
    const StateVector x = random_positive(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimal_gamma(x));
    }
}
BENCHMARK(bm_minimal_gamma)->Arg(10)->Arg(100);

void bm_simulate_chain(benchmark::State& state) {
    const int n = 10;
    const SwitchingSignal signal = chain_random_activation(n, 0.2, 10.0, 42);
    const SystemModel model = SystemModel::kuramoto(signal);
    SplitRng rng(3);
    StateVector x0(n);
    for (int i = 0; i < n; ++i) x0[i] = rng.uniform(0.5, 2.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(model, x0, 0.0, 10.0, 0.01, Scheme::euler));
    }
}
BENCHMARK(bm_simulate_chain);

void bm_factorize_transition(benchmark::State& state) {
    Matrix a(3, 3);
    a << -1.0, 0.7, 0.3, 0.2, -0.2, 0.0, 0.5, 0.5, -1.0;
    const SystemModel model = SystemModel::ltv_constant(a);
    const StateVector x0 = (StateVector(3) << 1.0, 2.0, 3.0).finished();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            factorize_transition(model, 0.0, 1.0, x0, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(bm_factorize_transition)->Arg(1000)->Arg(10000);

void bm_lemma_contraction(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(verify_lemma_contraction(5, 0.3, 0.2, 1000, 7));
    }
}
BENCHMARK(bm_lemma_contraction);

void bm_accumulate(benchmark::State& state) {
    const SwitchingSignal signal = chain_random_activation(10, 0.2, 50.0, 11);
    const auto samples = signal.graph_samples();
    for (auto _ : state) {
        benchmark::DoNotOptimize(accumulate(samples, 0.0, 50.0));
    }
}
BENCHMARK(bm_accumulate);

} // namespace

BENCHMARK_MAIN();
