#include <benchmark/benchmark.h>

#include "mdtw/decomp.hpp"
#include "mdtw/engine.hpp"
#include "mdtw/solvers.hpp"
#include "mdtw/tautd.hpp"

using namespace mdtw;

static Graph cycle(int n) {
    Graph g;
    for (int i = 0; i < n; ++i) g.add_vertex("v" + std::to_string(i));
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

static void BM_GroundAndEval(benchmark::State& state) {
    const auto g = cycle(static_cast<int>(state.range(0)));
    const auto a = graph_to_structure(g);
    const auto enc = encode(a, normalize_def21(heuristic_decompose(a, Strategy::MinFill), a));
    const auto prog = parse_program(three_col_program(enc.width));
    std::size_t rules = 0;
    for (auto _ : state) {
        EvalStats st;
        const auto m = evaluate(prog, enc.structure, &st);
        benchmark::DoNotOptimize(m.contains("success"));
        rules = st.ground_rules;
    }
    state.counters["ground_rules"] = static_cast<double>(rules);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GroundAndEval)->RangeMultiplier(2)->Range(8, 512)->Complexity(benchmark::oN);

static void BM_Normalize(benchmark::State& state) {
    const auto g = cycle(static_cast<int>(state.range(0)));
    const auto a = graph_to_structure(g);
    const auto td = heuristic_decompose(a, Strategy::MinDegree);
    for (auto _ : state) benchmark::DoNotOptimize(normalize_def21(td, a).td.size());
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Normalize)->RangeMultiplier(4)->Range(8, 2048)->Complexity(benchmark::oN);

BENCHMARK_MAIN();
