// Serial against OpenMP: element assembly of the twisting column and the
// material-point sweeps.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "incel/bench.hpp"

namespace {

using namespace incel;

struct Column {
    ScenarioInstance inst{scenario_twisting_column()};
    State n = inst.initial_state();
    State np1 = n;
    Column()
    {
        np1.t = 0.01;
        np1.U = 0.01 * n.V;
    }
};

Column& column()
{
    static Column c;
    return c;
}

void assembly_system(benchmark::State& st, bool parallel)
{
    Column& c = column();
    AssemblyOptions opt;
    opt.parallel = parallel;
    Residual r;
    SparseMatrix k = c.inst.assembler().pattern();
    for (auto _ : st) {
        c.inst.assembler().system(c.n, c.np1, 0.01, opt, r, k);
        benchmark::DoNotOptimize(k.valuePtr());
    }
    st.counters["threads"] = parallel ? omp_get_max_threads() : 1;
    st.counters["elements"] = c.inst.discretization().elements();
}

void assembly_residual(benchmark::State& st, bool parallel)
{
    Column& c = column();
    AssemblyOptions opt;
    opt.parallel = parallel;
    for (auto _ : st) {
        Residual r = c.inst.assembler().residual(c.n, c.np1, 0.01, opt);
        benchmark::DoNotOptimize(r.m.data());
    }
    st.counters["threads"] = parallel ? omp_get_max_threads() : 1;
}

void sweep(benchmark::State& st, bool parallel)
{
    SweepSpec s = builtin_sweep("comp");
    s.samples = 3000;
    for (auto _ : st) {
        auto rows = run_sweep(s, parallel);
        benchmark::DoNotOptimize(rows.data());
    }
    st.counters["threads"] = parallel ? omp_get_max_threads() : 1;
}

}  // namespace

BENCHMARK_CAPTURE(assembly_system, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembly_system, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembly_residual, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembly_residual, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sweep, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sweep, parallel, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
