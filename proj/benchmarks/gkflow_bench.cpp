#include "gkflow/flow_engine.hpp"
#include "gkflow/gk_dictionary.hpp"
#include "gkflow/gvs_core.hpp"
#include "gkflow/lie_gk.hpp"
#include "gkflow/scenarios.hpp"
#include "gkflow/suites.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace gkflow;

namespace {

void BM_AssembleGk(benchmark::State& state) {
    const gk::BiHermitianPoint p = gk::random_bihermitian(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(gk::assemble_gk(p));
}
BENCHMARK(BM_AssembleGk)->DenseRange(1, 3);

void BM_RoundTrip(benchmark::State& state) {
    const gk::BiHermitianPoint p = gk::random_bihermitian(static_cast<int>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(gk::disassemble_gk(gk::assemble_gk(p)));
}
BENCHMARK(BM_RoundTrip)->DenseRange(1, 3);

void BM_Annihilator(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto l = gvs::i_eigenbundle(suites::random_gcs(static_cast<int>(state.range(0)), 0, rng));
    const gvs::Spinor rho = gvs::pure_spinor_of(l);
    for (auto _ : state) benchmark::DoNotOptimize(gvs::annihilator(rho));
}
BENCHMARK(BM_Annihilator)->DenseRange(1, 3);

void BM_BaerSum(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const auto l = gvs::i_eigenbundle(suites::random_gcs(static_cast<int>(state.range(0)), 2, rng));
    const auto lt = l.conjugate().transpose();
    for (auto _ : state) benchmark::DoNotOptimize(gvs::baer_sum(l, lt));
}
BENCHMARK(BM_BaerSum)->DenseRange(1, 3);

void BM_DeformPoissonGrid(benchmark::State& state) {
    const flow::Scenario s = scenarios::poisson_c2();
    const auto grid = flow::scenario_grid(s);
    for (auto _ : state) benchmark::DoNotOptimize(flow::deform(s, 0.05, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_DeformPoissonGrid)->Unit(benchmark::kMillisecond);

void BM_DegeneracyTest(benchmark::State& state) {
    std::mt19937_64 rng(5);
    const lie::ComplexBracket b = lie::random_degenerate_bracket(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(lie::degeneracy_test(b));
}
BENCHMARK(BM_DegeneracyTest)->DenseRange(2, 6, 2);

void BM_ConormalBracket(benchmark::State& state) {
    const lie::CompactAlgebra a = lie::build_compact_algebra(2, 2);
    const auto y = lie::parse_y_spec("pt x T^2", a);
    for (auto _ : state) benchmark::DoNotOptimize(lie::blowup_eligibility(2, 2, y));
}
BENCHMARK(BM_ConormalBracket);

}  // namespace

BENCHMARK_MAIN();
