#include "pvlab/reductions.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

namespace {

using namespace pvlab;

std::shared_ptr<const Operators> make_ops(int dim, int n, double c0, double delta1)
{
    PhysParams pp;
    pp.c0 = c0;
    pp.delta1 = delta1;
    return std::make_shared<const Operators>(assemble_forms(build_mesh(dim, n), pp), SolverConfig{});
}

Vec smooth_pressure(const Operators& ops)
{
    return project_function(*ops.bundle().mesh,
                            [](const Point& x) { return std::cos(std::numbers::pi * x[0]) * std::cos(2.0 * x[1]); },
                            Space::PressureZeroMean)
        .coeffs;
}

void BM_ApplyB(benchmark::State& state)
{
    const auto ops = make_ops(2, static_cast<int>(state.range(0)), 1.0, 0.5);
    const Vec p = smooth_pressure(*ops);
    for (auto _ : state)
        benchmark::DoNotOptimize(ops->apply_B(p));
    state.SetComplexityN(ops->bundle().np());
}
BENCHMARK(BM_ApplyB)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_SolveCalB(benchmark::State& state)
{
    const auto ops = make_ops(2, static_cast<int>(state.range(0)), 1.0, 0.5);
    const Vec r = ops->apply_calB(smooth_pressure(*ops));
    for (auto _ : state)
        benchmark::DoNotOptimize(ops->solve_calB(r));
}
BENCHMARK(BM_SolveCalB)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

State initial_state(const Operators& ops)
{
    State s;
    s.p = smooth_pressure(ops);
    s.u = Vec::Zero(ops.bundle().nu());
    s.u_dot = s.u;
    return s;
}

void BM_FullStepFactorize(benchmark::State& state)
{
    const auto ops = make_ops(2, static_cast<int>(state.range(0)), 1.0, 0.5);
    const State s = initial_state(*ops);
    for (auto _ : state)
        benchmark::DoNotOptimize(step_full(ops, s, 1e-2, 0.5, SourceSpec::none()));
}
BENCHMARK(BM_FullStepFactorize)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FullStepCached(benchmark::State& state)
{
    const auto ops = make_ops(2, static_cast<int>(state.range(0)), 1.0, 0.5);
    const FullStepper stepper(ops, SourceSpec::none(), 1e-2);
    const State s = initial_state(*ops);
    stepper.step(s, 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(stepper.step(s, 0.5));
}
BENCHMARK(BM_FullStepCached)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ReducedBiot1D(benchmark::State& state)
{
    PhysParams pp;
    const auto ops = std::make_shared<const Operators>(assemble_forms(build_mesh(1, static_cast<int>(state.range(0))), pp),
                                                       SolverConfig{});
    ReducedInitial init;
    init.p0 = project_function(*ops->bundle().mesh, [](const Point& x) { return std::cos(std::numbers::pi * x[0]); },
                               Space::PressureZeroMean)
                  .coeffs;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_reduced_biot(ops, init, SourceSpec::none(), 1e-3, 0.05, 0.5));
}
BENCHMARK(BM_ReducedBiot1D)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
