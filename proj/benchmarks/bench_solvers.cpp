#include <benchmark/benchmark.h>

#include <random>

#include "mdtw/decomp.hpp"
#include "mdtw/solvers.hpp"

using namespace mdtw;

namespace {

// rows of the tw=3 scaling table
const int kRows[][2] = {{3, 1}, {6, 2}, {9, 3}, {12, 4}, {21, 7}, {33, 11}, {45, 15}, {57, 19}, {69, 23}, {81, 27}, {93, 31}};

Graph grid(int n) {
    Graph g;
    for (int i = 0; i < n * 3; ++i) g.add_vertex(std::to_string(i));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < 3; ++c) {
            const int v = r * 3 + c;
            if (c < 2) g.add_edge(v, v + 1);
            if (r + 1 < n) g.add_edge(v, v + 3);
        }
    return g;
}

}  // namespace

static void BM_PrimalityDecide(benchmark::State& state) {
    const auto& row = kRows[state.range(0)];
    const auto inst = generate_benchmark(row[0], row[1], 3, 1);
    int attribute = 0;
    for (auto e : inst.td.td.bags[inst.td.td.root])
        if (inst.schema.is_attribute_elem(e)) {
            attribute = static_cast<int>(e);
            break;
        }
    for (auto _ : state) benchmark::DoNotOptimize(primality_decide(inst.schema, inst.td, attribute));
    state.counters["tn"] = static_cast<double>(inst.td.size());
    state.SetComplexityN(static_cast<int64_t>(inst.td.size()));
}
BENCHMARK(BM_PrimalityDecide)->DenseRange(0, 10)->Complexity(benchmark::oN);

static void BM_EnumeratePrimes(benchmark::State& state) {
    const auto& row = kRows[state.range(0)];
    const auto inst = generate_benchmark(row[0], row[1], 3, 1);
    const auto m = prepare_enumeration(inst.td, inst.schema);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_primes(inst.schema, m));
    state.counters["tn"] = static_cast<double>(m.size());
    state.SetComplexityN(static_cast<int64_t>(m.size()));
}
BENCHMARK(BM_EnumeratePrimes)->DenseRange(0, 10, 2)->Complexity(benchmark::oN);

static void BM_ThreeColLadder(benchmark::State& state) {
    const auto g = grid(static_cast<int>(state.range(0)));
    const auto m = normalize_modified(heuristic_decompose(graph_to_structure(g), Strategy::MinFill));
    for (auto _ : state) benchmark::DoNotOptimize(three_col_decide(g, m));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ThreeColLadder)->RangeMultiplier(2)->Range(4, 256)->Complexity(benchmark::oN);

BENCHMARK_MAIN();
