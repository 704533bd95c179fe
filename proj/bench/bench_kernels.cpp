// Serial-reference vs OpenMP-parallel kernel comparison. The two paths
// produce bit-identical results (asserted in the test suite); here they are
// timed against each other on representative workloads.

#include <benchmark/benchmark.h>

#include "qualm/analysis.hpp"
#include "qualm/parallel.hpp"
#include "qualm/sampling.hpp"

namespace {

using namespace qualm;

void bm_moment_kernel(benchmark::State& state) {
    const int threads = static_cast<int>(state.range(0));
    const int trials = 20000;
    const int D = 4;
    SeededStream root(1);
    for (auto _ : state) {
        std::vector<double> xs;
        parallel_map<double>(
            trials, xs,
            [&](std::size_t i) {
                SeededStream s = root.derive(i);
                return std::norm(sample_haar_unitary(D, s)(0, 0));
            },
            threads);
        double mean = compensated_sum(xs) / trials;
        benchmark::DoNotOptimize(mean);
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

void bm_exact_qk(benchmark::State& state) {
    const int threads = static_cast<int>(state.range(0));
    const int ell = 3, k = 2;
    SmPolicy policy = computational_sm_policy(ell, k);
    WgTable table = wg_unitary(k, 1 << ell);
    for (auto _ : state) {
        OutcomeDistribution q = exact_qk_sm(policy, table, threads);
        benchmark::DoNotOptimize(q.probabilities.data());
    }
}

void bm_execute_sm_trials(benchmark::State& state) {
    const int threads = static_cast<int>(state.range(0));
    const int ell = 2, k = 2, trials = 4000;
    SmPolicy policy = computational_sm_policy(ell, k);
    SeededStream root(2);
    for (auto _ : state) {
        std::vector<std::size_t> cells;
        parallel_map<std::size_t>(
            trials, cells,
            [&](std::size_t i) {
                SeededStream s = root.derive(i);
                LabOracle oracle(OracleKind::loq, ell, s.derive(1));
                SeededStream coin = s.derive(2);
                std::vector<int> tr = execute_sm(policy, oracle, coin);
                std::size_t idx = 0;
                for (int v : tr) idx = idx * 4 + v;
                return idx;
            },
            threads);
        benchmark::DoNotOptimize(cells.data());
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

}  // namespace

BENCHMARK(bm_moment_kernel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_exact_qk)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_execute_sm_trials)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
