#include <vector>

#include <benchmark/benchmark.h>

#include "proxyforge/algo/config.hpp"
#include "proxyforge/algo/run.hpp"
#include "proxyforge/ela/design.hpp"
#include "proxyforge/ela/features.hpp"
#include "proxyforge/ela/wasserstein.hpp"
#include "proxyforge/gp/program.hpp"
#include "proxyforge/gp/tree.hpp"
#include "proxyforge/problems/photonics.hpp"
#include "proxyforge/problems/registry.hpp"
#include "proxyforge/problems/tmm.hpp"

using namespace proxyforge;

static void BM_Features(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto rng = seeded_rng(1, 0);
    ela::DesignSample s;
    s.X = ela::latin_hypercube(n, std::vector<double>(5, -5), std::vector<double>(5, 5), rng);
    for (Eigen::Index i = 0; i < s.X.rows(); ++i) s.y.push_back(s.X.row(i).squaredNorm() + rng.uniform(0, 1));
    for (auto _ : state) benchmark::DoNotOptimize(ela::compute_features(s));
}
BENCHMARK(BM_Features)->Arg(150)->Arg(600)->Unit(benchmark::kMillisecond);

static void BM_Wasserstein(benchmark::State& state) {
    auto rng = seeded_rng(2, 0);
    std::vector<double> a(state.range(0)), b(state.range(0));
    for (auto& v : a) v = rng.normal(0, 1);
    for (auto& v : b) v = rng.normal(1, 2);
    for (auto _ : state) benchmark::DoNotOptimize(ela::wasserstein_1d(a, b));
}
BENCHMARK(BM_Wasserstein)->Arg(5)->Arg(1000);

static void BM_Tmm(benchmark::State& state) {
    std::vector<double> t(state.range(0), 100.0);
    auto stack = problems::bragg_stack(t);
    double wl = 400;
    for (auto _ : state) {
        benchmark::DoNotOptimize(problems::tmm_reflectance(stack, wl));
        wl = wl >= 800 ? 400 : wl + 1;
    }
}
BENCHMARK(BM_Tmm)->Arg(10)->Arg(20);

static void BM_ProgramEval(benchmark::State& state) {
    auto tree = gp::ExpressionTree::parse("add(sum(square(x)), mul(a=10, sum(cos(x))))");
    gp::Program prog(tree, 10);
    auto rng = seeded_rng(3, 0);
    auto X = ela::latin_hypercube(1500, std::vector<double>(10, 0), std::vector<double>(10, 1), rng);
    auto noise = seeded_rng(4, 0);
    for (auto _ : state) benchmark::DoNotOptimize(prog.evaluate_batch(X, noise));
}
BENCHMARK(BM_ProgramEval)->Unit(benchmark::kMicrosecond);

static void BM_DeRun(benchmark::State& state) {
    auto p = problems::make_problem("mini-bragg");
    std::uint64_t seed = 0;
    for (auto _ : state) {
        BudgetedEvaluator ev(p, 500);
        benchmark::DoNotOptimize(algo::run(algo::default_config(), ev, seed++));
    }
}
BENCHMARK(BM_DeRun)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
