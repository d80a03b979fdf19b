#include <dlab/regularize.hpp>
#include <dlab/simulate.hpp>
#include <dlab/uvm.hpp>

#include <benchmark/benchmark.h>

using namespace dlab;

namespace {

UvmProblem call_problem(std::size_t n_steps, std::size_t nodes) {
    const TimeGrid grid(1.0, n_steps);
    UvmProblem p{.sigma_lo = 0.1,
                 .sigma_hi = 0.2,
                 .x0 = 100.0,
                 .mu = WeightMeasure(grid, std::vector<double>(n_steps, 0.5), {{n_steps, 0.5}}),
                 .payoff = Payoff{.kind = PayoffKind::CallOnAvg, .strike = 100.0},
                 .x_axis = {},
                 .a_axis = {}};
    p.x_axis.nodes = nodes;
    return p;
}

void BM_BsbSolve(benchmark::State& state) {
    const auto p = call_problem(static_cast<std::size_t>(state.range(0)),
                                static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bsb_solve(p));
    }
}
BENCHMARK(BM_BsbSolve)->Args({64, 400})->Args({256, 400})->Args({256, 1600})->Unit(benchmark::kMillisecond);

void BM_SampleBrownian(benchmark::State& state) {
    const TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
    ModelSpec model;
    model.kind = ModelKind::Brownian;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample(model, grid, SeedPlan{1}, 64));
    }
    state.SetItemsProcessed(state.iterations() * 64 * state.range(0));
}
BENCHMARK(BM_SampleBrownian)->Arg(1024)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_Coquadratic(benchmark::State& state) {
    const TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
    const DiscretePath x = brownian_path(grid, SeedPlan{1}, 0);
    const DiscretePath y = brownian_path(grid, SeedPlan{1}, 1);
    const Epsilon eps = default_eps_ladder(grid, 3, 3).front();
    for (auto _ : state) {
        benchmark::DoNotOptimize(coquadratic_curve(x, y, eps));
    }
}
BENCHMARK(BM_Coquadratic)->Arg(4096)->Arg(65536)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
