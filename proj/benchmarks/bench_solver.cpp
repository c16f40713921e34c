#include <benchmark/benchmark.h>

#include "mrfut/calibration.hpp"
#include "mrfut/vi_solver.hpp"

using namespace mrfut;

namespace {

SpotModel cir_base() { return {ModelKind::CIR, 8.57, 17.58, 4.55, 18.16, 5.33}; }
ContractSpec contract_base() { return {66.0 / 252.0, 22.0 / 252.0, 0.05, 0.005, 0.005}; }

void bm_psor_step(benchmark::State& state) {
    const SpotModel m = cir_base();
    const ContractSpec k = contract_base();
    GridSpec g = default_grid(m);
    g.n_space = static_cast<int>(state.range(0));
    g.n_time = 500;
    const CnSystem sys = assemble_cn(m, GeneratorConfig::historical(), k.rate_r,
                                     k.deadline_That, g);
    const int n = g.n_space - 1;
    std::vector<double> obstacle(n), rhs(n);
    const double ds = (g.s_max - g.s_min) / g.n_space;
    for (int i = 0; i < n; ++i) {
        const double s = g.s_min + (i + 1) * ds;
        obstacle[i] = futures_price(m, 0.0, s, k.maturity_T) - k.cost_c;
        rhs[i] = obstacle[i];  // exercise-heavy right-hand side
    }
    for (auto _ : state) {
        auto x = psor_solve(sys.m1, rhs, obstacle, obstacle, g.omega, g.epsilon, g.max_iter);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(bm_psor_step)->Arg(250)->Arg(500)->Arg(1000);

void bm_solve_exit_value(benchmark::State& state) {
    const SpotModel m = cir_base();
    const ContractSpec k = contract_base();
    GridSpec g = default_grid(m);
    g.n_time = g.n_space = static_cast<int>(state.range(0));
    auto xi = [&](double t, double s) {
        return futures_price(m, t, s, k.maturity_T) - k.cost_c;
    };
    for (auto _ : state) {
        auto v = solve_vi(m, GeneratorConfig::historical(), k, g, xi, Sense::Max, ProblemTag::V);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(bm_solve_exit_value)->Arg(125)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void bm_solve_all(benchmark::State& state) {
    const SpotModel m = cir_base();
    const ContractSpec k = contract_base();
    GridSpec g = default_grid(m);
    g.n_time = g.n_space = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto sol = solve_all(m, GeneratorConfig::historical(), k, g);
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(bm_solve_all)->Arg(125)->Arg(250)->Unit(benchmark::kMillisecond);

void bm_calibrate_cir(benchmark::State& state) {
    SpotModel truth{ModelKind::CIR, 4.55, 18.16, 4.55, 18.16, 5.0};
    std::vector<double> mats;
    for (int d = 27; d <= 237; d += 30) mats.push_back(d / 252.0);
    const FuturesCurve curve = term_structure(truth, 12.12, mats);
    for (auto _ : state) {
        auto r = calibrate(ModelKind::CIR, 12.12, curve);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(bm_calibrate_cir)->Unit(benchmark::kMillisecond);

void bm_simulate_paths(benchmark::State& state) {
    const SpotModel m = cir_base();
    PathSpec spec{12.12, 1.0 / 2520.0, 660, static_cast<int>(state.range(0)), 7};
    for (auto _ : state) {
        auto p = simulate(m, Measure::RiskNeutral, spec);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(bm_simulate_paths)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
