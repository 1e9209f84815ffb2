#include <benchmark/benchmark.h>

#include <vector>

#include "moran/admissibility.hpp"
#include "moran/analyzer.hpp"
#include "moran/cyclotomic.hpp"
#include "moran/decider.hpp"
#include "moran/mask.hpp"
#include "moran/pairs.hpp"
#include "moran/render.hpp"
#include "moran/spectrum.hpp"
#include "systems.hpp"

using namespace moran;

namespace {

void BM_CyclotomicVanishes(benchmark::State& state) {
    const auto q = state.range(0);
    std::vector<std::int64_t> e;
    for (std::int64_t i = 0; i < q; ++i) e.push_back(i * 7);
    for (auto _ : state) benchmark::DoNotOptimize(cyclotomic_vanishes(std::span<const std::int64_t>(e), q));
}
BENCHMARK(BM_CyclotomicVanishes)->Arg(12)->Arg(30)->Arg(210);

void BM_FindZeroDirections(benchmark::State& state) {
    const auto D = fixtures::B1();
    for (auto _ : state) benchmark::DoNotOptimize(find_zero_directions(D, 5));
}
BENCHMARK(BM_FindZeroDirections);

void BM_PairVerify(benchmark::State& state) {
    std::vector<IntMatrix> R(static_cast<std::size_t>(state.range(0)), fixtures::diag(3, 3));
    std::vector<DigitSet> D(R.size(), fixtures::sierpinski_digits());
    std::vector<IntVector> Lbase{make_int_vector({0, 0}), make_int_vector({1, -1}), make_int_vector({-1, 1})};
    std::vector<CompatiblePair> pairs;
    for (std::size_t i = 0; i < R.size(); ++i) pairs.push_back(make_pair(R[i], D[i], Lbase));
    auto tower = tower_pair(pairs, VerifyMode::Numeric);
    const auto mode = state.range(1) ? VerifyMode::Exact : VerifyMode::Numeric;
    for (auto _ : state) benchmark::DoNotOptimize(is_compatible_pair(tower.R, tower.D, tower.L, mode));
    state.SetLabel(state.range(1) ? "exact" : "numeric");
}
BENCHMARK(BM_PairVerify)->Args({1, 1})->Args({2, 1})->Args({3, 1})->Args({3, 0});

void BM_BuildSpectrumLevel(benchmark::State& state) {
    const auto S = fixtures::sierpinski();
    const std::size_t K = choose_block_size(S).K;
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto B = build_blocks(S, K, k + 1);
        benchmark::DoNotOptimize(build_spectrum_level(B, k));
    }
}
BENCHMARK(BM_BuildSpectrumLevel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_QValue(benchmark::State& state) {
    const auto S = fixtures::sierpinski();
    auto B = build_blocks(S, 1, 3);
    const auto level = build_spectrum_level(B, 2);
    const FactorPlan plan(S, static_cast<std::size_t>(state.range(0)));
    const std::vector<double> xi{0.173, -0.291};
    for (auto _ : state) benchmark::DoNotOptimize(q_value(plan, level.elements, xi));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(level.elements.size()));
}
BENCHMARK(BM_QValue)->Arg(6)->Arg(12);

void BM_AdmissibilityScan(benchmark::State& state) {
    const auto S = state.range(0) ? fixtures::triangular_example(3, 6) : fixtures::sierpinski(9);
    for (auto _ : state) benchmark::DoNotOptimize(admissibility_scan(S));
    state.SetLabel(state.range(0) ? "triangular" : "diagonal");
}
BENCHMARK(BM_AdmissibilityScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Decide(benchmark::State& state) {
    const auto S = fixtures::triangular_example(3, 6);
    for (auto _ : state) benchmark::DoNotOptimize(decide(S));
}
BENCHMARK(BM_Decide)->Unit(benchmark::kMillisecond);

void BM_SupportPoints(benchmark::State& state) {
    const auto S = fixtures::diagonal_example(10, 5);
    const auto N = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(support_points(S, N));
}
BENCHMARK(BM_SupportPoints)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
