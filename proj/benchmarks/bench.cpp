#include <benchmark/benchmark.h>

#include "forestcalc/tree.hpp"

using namespace forestcalc;

namespace {

Tree wide_tree(int fanout, int depth) {
    Tree t = corolla(fanout);
    for (int d = 1; d < depth; ++d) {
        Tree bigger = t;
        for (int e = 0; e < t.edge_count(); ++e)
            if (bigger.is_leaf_edge(e)) {
                bigger = graft(bigger, e, corolla(fanout));
                break;
            }
        t = bigger;
    }
    return t;
}

void bm_canonicalize(benchmark::State& state) {
    Tree t = wide_tree(3, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        Tree c = t;
        benchmark::DoNotOptimize(canonicalize(c));
    }
}
BENCHMARK(bm_canonicalize)->Arg(2)->Arg(4)->Arg(6);

void bm_elementary_faces(benchmark::State& state) {
    Tree t = wide_tree(3, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(elementary_faces(t));
}
BENCHMARK(bm_elementary_faces)->Arg(2)->Arg(4);

void bm_automorphisms(benchmark::State& state) {
    Tree t = corolla(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(automorphisms(t));
}
BENCHMARK(bm_automorphisms)->Arg(4)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
